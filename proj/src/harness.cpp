#include "allocest/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace allocest {

namespace {

int thread_cap() {
  if (const char* env = std::getenv("ALLOCEST_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void compute_summary(RunTrace& trace) {
  TraceSummary& s = trace.summary;
  s = TraceSummary{};
  double cum = 0.0;
  std::vector<const RoundRecord*> explore;
  for (const RoundRecord& r : trace.records) {
    cum += r.expected_regret;
    if (r.exploit) {
      if (r.expected_regret > 0.0) ++s.exploit_mistakes;
    } else {
      explore.push_back(&r);
    }
    if (r.fallback) s.fallback_seen = true;
  }
  s.cum_regret = cum;
  const double T = static_cast<double>(trace.records.size());
  s.regret_over_logT = cum / std::log(std::max(T, 2.0));
  s.explore_count = static_cast<long>(explore.size());
  if (!explore.empty()) {
    const size_t from = explore.size() / 2;
    long members = 0;
    for (size_t i = from; i < explore.size(); ++i)
      if (explore[i]->lambda_member) ++members;
    s.membership_rate = static_cast<double>(members) / static_cast<double>(explore.size() - from);
  }
  if (!trace.records.empty()) {
    s.est_kl_cum = trace.records.back().est_kl_cum;
    s.final_greedy = trace.records.back().decision;
  }
}

RunTrace run_one(const ClassAnalysis& ca, const ExperimentSpec& spec, std::uint64_t seed) {
  RunTrace trace;
  trace.seed = seed;
  trace.true_model = spec.true_model;
  trace.records.reserve(spec.T);
  const std::uint64_t algo_cell = static_cast<std::uint64_t>(spec.algorithm);
  Rng rng(derive_seed(seed, algo_cell, static_cast<std::uint64_t>(spec.true_model)));
  const VectorXd& gap = ca.gap_info[spec.true_model].gap;
  const FiniteModelClass& cls = *ca.cls;

  switch (spec.algorithm) {
    case Algorithm::ae2: {
      Ae2Config cfg = spec.ae2;
      Ae2Runner runner(ca, cfg);
      for (long t = 1; t <= spec.T; ++t) {
        RoundRecord rec = runner.step(spec.true_model, rng);
        if (!rec.exploit) trace.explore_lambdas.push_back(runner.last_explore().lambda);
        trace.records.push_back(std::move(rec));
      }
      break;
    }
    case Algorithm::aestar: {
      AeStarRunner runner(ca, spec.aestar);
      for (long t = 1; t <= spec.T; ++t) {
        RoundRecord rec = runner.step(spec.true_model, rng);
        if (!rec.exploit) trace.explore_lambdas.push_back(runner.last_lambda());
        trace.records.push_back(std::move(rec));
      }
      break;
    }
    case Algorithm::ucb1: {
      UcbState state;
      state.counts.assign(cls.decision_count, 0);
      state.sums.assign(cls.decision_count, 0.0);
      for (long t = 1; t <= spec.T; ++t) {
        const int arm = baseline_ucb_step(state);
        const Outcome outcome = model_sample(cls, spec.true_model, arm, rng);
        baseline_ucb_record(state, arm, outcome.reward);
        RoundRecord rec;
        rec.t = t;
        rec.s = t;
        rec.decision = arm;
        rec.reward = outcome.reward;
        rec.obs = outcome.obs;
        rec.expected_regret = gap[arm];
        trace.records.push_back(rec);
      }
      break;
    }
    case Algorithm::uniform_commit: {
      UniformCommitState state;
      state.counts.assign(cls.decision_count, 0);
      state.sums.assign(cls.decision_count, 0.0);
      state.explore_rounds =
          static_cast<long>(std::ceil(std::pow(static_cast<double>(spec.T), 2.0 / 3.0)));
      const double mean_gap = gap.mean();
      for (long t = 1; t <= spec.T; ++t) {
        const int arm = baseline_uniform_commit_step(state, rng);
        const Outcome outcome = model_sample(cls, spec.true_model, arm, rng);
        baseline_uniform_commit_record(state, arm, outcome.reward);
        RoundRecord rec;
        rec.t = t;
        rec.decision = arm;
        rec.reward = outcome.reward;
        rec.obs = outcome.obs;
        if (t <= state.explore_rounds) {
          rec.s = t;
          rec.expected_regret = mean_gap;  // decision drawn uniformly
        } else {
          rec.exploit = true;
          rec.s = state.explore_rounds;
          rec.expected_regret = gap[arm];
        }
        trace.records.push_back(rec);
      }
      break;
    }
  }
  compute_summary(trace);
  return trace;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}
}  // namespace

std::vector<RunTrace> run_experiment(const ClassAnalysis& ca, const ExperimentSpec& spec) {
  if (spec.T < 1) throw std::invalid_argument("T must be >= 1");
  if (spec.seeds.empty()) throw std::invalid_argument("seed list must be nonempty");
  if (spec.true_model < 0 || spec.true_model >= ca.cls->size())
    throw std::invalid_argument("true model index out of range");

  std::vector<RunTrace> traces(spec.seeds.size());
  const int workers =
      std::min<int>(thread_cap(), static_cast<int>(spec.seeds.size()));
  std::atomic<size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto work = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= spec.seeds.size()) return;
      try {
        traces[i] = run_one(ca, spec, spec.seeds[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return traces;
}

ExtractedAllocation extract_allocation(const RunTrace& trace, const ClassAnalysis& ca,
                                       ExtractPolicy policy) {
  ExtractedAllocation out;
  const auto& lambdas = trace.explore_lambdas;
  if (lambdas.empty()) {
    out.lambda = VectorXd::Zero(ca.cls->decision_count);
    out.lambda[trace.summary.final_greedy] = 1.0;
    out.no_explore_fallback = true;
    return out;
  }
  if (policy == ExtractPolicy::last_explore_lambda) {
    out.lambda = lambdas.back();
    return out;
  }
  const size_t from = lambdas.size() / 2;
  VectorXd acc = VectorXd::Zero(ca.cls->decision_count);
  for (size_t i = from; i < lambdas.size(); ++i) acc += lambdas[i];
  out.lambda = acc / static_cast<double>(lambdas.size() - from);
  return out;
}

AllocationReport allocation_protocol_eval(const ClassAnalysis& ca, const ExperimentSpec& spec,
                                          double eps, double n_max_value,
                                          ExtractPolicy policy) {
  AllocationReport report;
  for (int m = 0; m < ca.cls->size(); ++m) {
    ExperimentSpec cell = spec;
    cell.true_model = m;
    const std::vector<RunTrace> traces = run_experiment(ca, cell);
    long ok = 0;
    for (const RunTrace& trace : traces) {
      ExtractedAllocation ex = extract_allocation(trace, ca, policy);
      MembershipResult mr = lambda_membership(ca, m, ex.lambda, eps, n_max_value);
      if (mr.member) ++ok;
      report.cells.push_back({m, trace.seed, ex.lambda, mr.member, mr.witness_n});
    }
    report.per_model_success.push_back(static_cast<double>(ok) /
                                       static_cast<double>(traces.size()));
  }
  for (double v : report.per_model_success)
    report.worst_success = std::min(report.worst_success, v);
  return report;
}

void export_csv(const std::vector<RunTrace>& traces, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "seed,t,phase,s,decision,reward,obs,expected_regret,cum_regret,est_kl_cum,"
         "lambda_member,exploit_candidate\n";
  for (const RunTrace& trace : traces) {
    double cum = 0.0;
    for (const RoundRecord& r : trace.records) {
      cum += r.expected_regret;
      out << trace.seed << ',' << r.t << ',' << (r.exploit ? "exploit" : "explore") << ','
          << r.s << ',' << r.decision << ',' << fmt(r.reward) << ',' << r.obs << ','
          << fmt(r.expected_regret) << ',' << fmt(cum) << ',' << fmt(r.est_kl_cum) << ','
          << (r.lambda_member ? 1 : 0) << ',' << (r.exploit_candidate ? 1 : 0) << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<RunTrace> import_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path);
  std::vector<RunTrace> traces;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    auto next = [&] {
      if (!std::getline(ss, field, ',')) throw std::runtime_error("short CSV row: " + line);
      return field;
    };
    const std::uint64_t seed = std::stoull(next());
    RoundRecord r;
    r.t = std::stol(next());
    r.exploit = next() == "exploit";
    r.s = std::stol(next());
    r.decision = std::stoi(next());
    r.reward = std::stod(next());
    r.obs = std::stoi(next());
    r.expected_regret = std::stod(next());
    next();  // cum_regret is derived
    r.est_kl_cum = std::stod(next());
    r.lambda_member = next() == "1";
    r.exploit_candidate = next() == "1";
    if (traces.empty() || traces.back().seed != seed || r.t <= traces.back().records.back().t) {
      traces.emplace_back();
      traces.back().seed = seed;
    }
    traces.back().records.push_back(r);
  }
  for (RunTrace& trace : traces) compute_summary(trace);
  return traces;
}

std::string summarize(const std::vector<RunTrace>& traces) {
  auto mean_sd = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.empty() ? 1.0 : static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    if (v.size() > 1) var /= static_cast<double>(v.size() - 1);
    return std::pair<double, double>{mean, std::sqrt(var)};
  };

  std::ostringstream os;
  os << std::left << std::setw(12) << "seed" << std::setw(14) << "cum_regret" << std::setw(12)
     << "reg/lnT" << std::setw(10) << "s_T" << std::setw(12) << "mistakes" << std::setw(12)
     << "member" << std::setw(14) << "est_kl" << '\n';
  std::vector<double> regs, slogs, ss, members, kls;
  for (const RunTrace& t : traces) {
    const TraceSummary& s = t.summary;
    os << std::left << std::setw(12) << t.seed << std::setw(14) << std::setprecision(6)
       << s.cum_regret << std::setw(12) << s.regret_over_logT << std::setw(10)
       << s.explore_count << std::setw(12) << s.exploit_mistakes << std::setw(12)
       << s.membership_rate << std::setw(14) << s.est_kl_cum << '\n';
    regs.push_back(s.cum_regret);
    slogs.push_back(s.regret_over_logT);
    ss.push_back(static_cast<double>(s.explore_count));
    members.push_back(s.membership_rate);
    kls.push_back(s.est_kl_cum);
  }
  if (!traces.empty()) {
    auto [rm, rs] = mean_sd(regs);
    auto [lm, ls] = mean_sd(slogs);
    auto [sm, ssd] = mean_sd(ss);
    auto [mm, msd] = mean_sd(members);
    os << "mean cum_regret " << rm << " +/- " << rs << "; reg/lnT " << lm << " +/- " << ls
       << "; s_T " << sm << " +/- " << ssd << "; membership " << mm << " +/- " << msd << '\n';
    // Regret-to-log ratio at decade checkpoints inside the horizon.
    for (double cp : {1e3, 1e4, 1e5}) {
      const long T = static_cast<long>(cp);
      if (traces.front().records.size() < static_cast<size_t>(T)) continue;
      std::vector<double> at;
      for (const RunTrace& t : traces) {
        double cum = 0.0;
        for (long i = 0; i < T; ++i) cum += t.records[i].expected_regret;
        at.push_back(cum / std::log(static_cast<double>(T)));
      }
      auto [am, asd] = mean_sd(at);
      os << "reg/lnT @ T=" << T << ": " << am << " +/- " << asd << '\n';
    }
  }
  return os.str();
}

std::string summarize_json(const std::vector<RunTrace>& traces) {
  nlohmann::json j = nlohmann::json::array();
  for (const RunTrace& t : traces) {
    const TraceSummary& s = t.summary;
    j.push_back({{"seed", t.seed},
                 {"true_model", t.true_model},
                 {"cum_regret", s.cum_regret},
                 {"regret_over_logT", s.regret_over_logT},
                 {"explore_count", s.explore_count},
                 {"exploit_mistakes", s.exploit_mistakes},
                 {"membership_rate", s.membership_rate},
                 {"est_kl_cum", s.est_kl_cum},
                 {"final_greedy", s.final_greedy},
                 {"fallback_seen", s.fallback_seen}});
  }
  return j.dump(2);
}

}  // namespace allocest
