#include "allocest/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace allocest {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kE = 2.718281828459045;

IndexSet full_scope(const ClassAnalysis& ca) {
  IndexSet s(ca.cls->size());
  for (int i = 0; i < ca.cls->size(); ++i) s[i] = i;
  return s;
}

VectorXd mix(const VectorXd& lambda, const VectorXd& omega, double q) {
  VectorXd p = q * lambda + (1.0 - q) * omega;
  p = p.cwiseMax(0.0);
  const double total = p.sum();
  if (total <= 0.0) throw std::runtime_error("exploration distribution degenerated to zero");
  return p / total;
}

// First greedy decision certified against every model for which it is not
// optimal; shared by both runners.
std::optional<int> certified_greedy(const ClassAnalysis& ca, const Posterior& xi,
                                    double cum_ref_loglik, const VectorXd& per_model_loglik,
                                    long t, double floor_value) {
  const double tau = exploit_threshold(t, floor_value);
  for (int pi_hat : greedy_set(xi, *ca.cls)) {
    bool ok = true;
    for (int m = 0; m < ca.cls->size(); ++m) {
      const IndexSet& opt = ca.gap_info[m].optimal_set;
      if (std::find(opt.begin(), opt.end(), pi_hat) != opt.end()) continue;
      if (cum_ref_loglik - per_model_loglik[m] < tau) {
        ok = false;
        break;
      }
    }
    if (ok) return pi_hat;
  }
  return std::nullopt;
}
}  // namespace

double exploit_threshold(long t, double floor_value) {
  const double td = static_cast<double>(t);
  const double inner = std::max(td, kE);
  return std::log(std::max(td * std::log(inner), floor_value));
}

Ae2Runner::Ae2Runner(const ClassAnalysis& ca, Ae2Config cfg) : ca_(ca), cfg_(cfg) {
  if (!(cfg.delta > 0.0 && cfg.delta <= 0.5))
    throw std::invalid_argument("delta must lie in (0, 1/2]");
  eps_ = cfg.delta / (4.0 + 2.0 * cfg.delta);
  double g_low = kInf;
  for (double g : ca.glc_value)
    if (g > 0.0) g_low = std::min(g_low, g);
  if (std::isinf(g_low)) {
    degenerate_ = true;  // every model separable at its optimum; play greedy
    n_max_ = kInf;
    q_ = 1.0;
  } else {
    n_max_ = n_max(ca, eps_, cfg.nmax_constant).value;
    q_ = (4.0 * n_max_ + cfg.delta * g_low) / (4.0 * n_max_ + 2.0 * cfg.delta * g_low);
    if (cfg.lambda_policy == LambdaPolicy::exact_subset && ca.cls->size() <= 16)
      candidates_ = aec_maximal_subsets(ca, full_scope(ca), eps_, n_max_);
  }
  xi_ = tempered_init_full(*ca.cls);
  per_model_loglik_ = VectorXd::Zero(ca.cls->size());
}

std::optional<int> Ae2Runner::exploit_candidate(long t) const {
  return certified_greedy(ca_, xi_, cum_ref_loglik_, per_model_loglik_, t,
                          cfg_.exploit_threshold_floor);
}

Ae2Runner::ExploreChoice Ae2Runner::explore_distribution() {
  if (degenerate_)
    throw std::runtime_error("class degenerate: every model separable at its optimum");
  const ReferencePoint ref = ReferencePoint::posterior(xi_.full_weights(ca_.cls->size()));
  const IndexSet scope = full_scope(ca_);
  AecSolution sol =
      (cfg_.lambda_policy == LambdaPolicy::exact_subset && ca_.cls->size() <= 16)
          ? aec_solve_from_candidates(ca_, scope, ref, eps_, n_max_, candidates_)
          : aec_solve(ca_, scope, ref, eps_, n_max_, AecMode::candidate_heuristic);
  ExploreChoice out;
  out.lambda = sol.lambda.probs;
  out.omega = sol.omega;
  out.q = q_;
  out.p = mix(out.lambda, out.omega, q_);
  return out;
}

void Ae2Runner::apply_explore_update(int true_model, int decision, const Outcome& outcome,
                                     const VectorXd& p) {
  ledger_record(ledger_, ca_, xi_, p, true_model);
  cum_ref_loglik_ += expected_log_lik(xi_, *ca_.cls, decision, outcome);
  for (int m = 0; m < ca_.cls->size(); ++m)
    per_model_loglik_[m] += model_loglik(*ca_.cls, m, decision, outcome);
  xi_ = tempered_update(xi_, *ca_.cls, decision, outcome);
  history_.push_back({decision, outcome});
  ++s_;
}

RoundRecord Ae2Runner::step(int true_model, Rng& rng) {
  ++t_;
  RoundRecord rec;
  rec.t = t_;
  const VectorXd& true_gap = ca_.gap_info[true_model].gap;

  std::optional<int> cand = exploit_candidate(t_);
  if (cand || degenerate_) {
    // Degenerate classes have no explore program; the greedy decision stands in.
    const int decision = cand ? *cand : greedy_set(xi_, *ca_.cls).front();
    const Outcome outcome = model_sample(*ca_.cls, true_model, decision, rng);
    rec.exploit = true;
    rec.exploit_candidate = cand.has_value();
    rec.decision = decision;
    rec.reward = outcome.reward;
    rec.obs = outcome.obs;
    rec.expected_regret = true_gap[decision];
    if (degenerate_ && !cand) {
      // Keep learning so the greedy decision can converge.
      VectorXd p = VectorXd::Zero(ca_.cls->decision_count);
      p[decision] = 1.0;
      rec.exploit = false;
      rec.lambda_member = lambda_membership(ca_, true_model, p, eps_, n_max_).member;
      apply_explore_update(true_model, decision, outcome, p);
    }
    rec.s = s_ - 1;
    rec.est_kl_cum = ledger_.kl_cum;
    return rec;
  }

  last_choice_ = explore_distribution();
  const int decision = rng.categorical(last_choice_.p);
  const Outcome outcome = model_sample(*ca_.cls, true_model, decision, rng);
  rec.decision = decision;
  rec.reward = outcome.reward;
  rec.obs = outcome.obs;
  rec.expected_regret = last_choice_.p.dot(true_gap);
  rec.lambda_member =
      lambda_membership(ca_, true_model, last_choice_.lambda, eps_, n_max_).member;
  apply_explore_update(true_model, decision, outcome, last_choice_.p);
  rec.s = s_ - 1;
  rec.est_kl_cum = ledger_.kl_cum;
  return rec;
}

double aec_sweep_value(const ClassAnalysis& ca, const IndexSet& scope, double eps,
                       double n_max_value) {
  if (scope.empty()) return 0.0;
  const int M = ca.cls->size();
  std::vector<VectorXd> refs;
  VectorXd uni = VectorXd::Zero(M);
  for (int m : scope) uni[m] = 1.0 / static_cast<double>(scope.size());
  refs.push_back(uni);
  for (int m : scope) {
    VectorXd point = VectorXd::Zero(M);
    point[m] = 1.0;
    refs.push_back(point);
  }
  double best = 0.0;
  if (static_cast<int>(scope.size()) <= 16) {
    const auto candidates = aec_maximal_subsets(ca, scope, eps, n_max_value);
    for (const auto& xi : refs) {
      AecSolution sol = aec_solve_from_candidates(ca, scope, ReferencePoint::posterior(xi),
                                                  eps, n_max_value, candidates);
      best = std::max(best, sol.value);
    }
  } else {
    for (const auto& xi : refs) {
      AecSolution sol = aec_solve(ca, scope, ReferencePoint::posterior(xi), eps, n_max_value,
                                  AecMode::candidate_heuristic);
      best = std::max(best, sol.value);
    }
  }
  return best;
}

AeStarRunner::AeStarRunner(const ClassAnalysis& ca, AeStarConfig cfg) : ca_(ca), cfg_(cfg) {
  if (!(cfg.delta > 0.0 && cfg.delta <= 0.5))
    throw std::invalid_argument("delta must lie in (0, 1/2]");
  if (!(cfg.alpha_n > 0.0 && cfg.alpha_n < cfg.alpha_q && cfg.alpha_q < cfg.alpha_m &&
        cfg.alpha_m <= 0.5))
    throw std::invalid_argument("exponents must satisfy 0 < alpha_n < alpha_q < alpha_m <= 1/2");
  eps_ = cfg.delta / (4.0 + 2.0 * cfg.delta);
  try {
    class_n_max_ = n_max(ca, eps_, cfg.nmax_constant).value;
  } catch (const std::exception&) {
    class_n_max_ = 1e6;  // class not uniformly regular; epoch filter budget only
  }
  info_content_.resize(ca.cls->size());
  for (int m = 0; m < ca.cls->size(); ++m) info_content_[m] = info_content(ca, m, eps_);
  active_ = full_scope(ca);
  xi_ = tempered_init_full(*ca.cls);
  per_model_loglik_ = VectorXd::Zero(ca.cls->size());
}

void AeStarRunner::start_epoch() {
  ++ell_;
  const double sd = static_cast<double>(s_);
  const double threshold = std::pow(sd, cfg_.alpha_m);

  // Smallest gap level whose restricted class has a small enough coefficient.
  std::vector<double> levels{0.0};
  for (const auto& gi : ca_.gap_info)
    if (gi.min_gap > 0.0) levels.push_back(gi.min_gap);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  IndexSet chosen_scope;
  delta_ell_ = levels.back();
  for (double d : levels) {
    IndexSet scope;
    const double budget = d > 0.0 ? 1.0 / d : kInf;
    for (int m = 0; m < ca_.cls->size(); ++m)
      if (ca_.gap_info[m].min_gap >= d && info_content_[m] <= budget) scope.push_back(m);
    if (scope.empty()) continue;
    if (aec_sweep_value(ca_, scope, eps_ / 2.0, class_n_max_) <= threshold) {
      delta_ell_ = d;
      chosen_scope = scope;
      break;
    }
    if (chosen_scope.empty()) {
      delta_ell_ = d;
      chosen_scope = scope;  // fallback: smallest level examined
    }
  }

  // Stability filter on the chosen scope.
  const double n_s = std::pow(sd, cfg_.alpha_n);
  const double cap = cfg_.filter_scale * std::sqrt(n_s);
  IndexSet filtered;
  for (int m : chosen_scope) {
    const double n = info_content_[m];
    const double g = ca_.glc_value[m];
    const double d = delta_ell_;
    double lhs;
    if (d <= 0.0) {
      lhs = kInf;
    } else {
      const double ratio = g > 0.0 ? 2.0 * n / g : (n > 0.0 ? kInf : 0.0);
      lhs = n + 1.0 / d + 4.0 * g / d + ratio + 4.0 / (d * eps_);
    }
    if (lhs <= cap) filtered.push_back(m);
  }
  if (filtered.empty()) {
    fallback_ = true;
    active_ = full_scope(ca_);
  } else {
    fallback_ = false;
    active_ = filtered;
  }
  xi_ = tempered_init(active_);
}

std::optional<int> AeStarRunner::exploit_candidate(long t) const {
  return certified_greedy(ca_, xi_, cum_ref_loglik_, per_model_loglik_, t,
                          cfg_.exploit_threshold_floor);
}

RoundRecord AeStarRunner::step(int true_model, Rng& rng) {
  if (s_ >= (1L << ell_)) start_epoch();
  ++t_;
  RoundRecord rec;
  rec.t = t_;
  rec.fallback = fallback_;
  const VectorXd& true_gap = ca_.gap_info[true_model].gap;

  std::optional<int> cand = exploit_candidate(t_);
  if (cand) {
    const Outcome outcome = model_sample(*ca_.cls, true_model, *cand, rng);
    rec.exploit = true;
    rec.exploit_candidate = true;
    rec.decision = *cand;
    rec.reward = outcome.reward;
    rec.obs = outcome.obs;
    rec.expected_regret = true_gap[*cand];
    rec.s = s_ - 1;
    rec.est_kl_cum = ledger_.kl_cum;
    return rec;
  }

  const double sd = static_cast<double>(s_);
  const double n_s = std::pow(sd, cfg_.alpha_n);
  const double q_s = 1.0 - std::pow(sd, -cfg_.alpha_q);
  const ReferencePoint ref = ReferencePoint::posterior(xi_.full_weights(ca_.cls->size()));
  AecSolution sol =
      static_cast<int>(active_.size()) <= 16
          ? aec_solve(ca_, active_, ref, eps_, n_s, AecMode::exact_subset)
          : aec_solve(ca_, active_, ref, eps_, n_s, AecMode::candidate_heuristic);
  const VectorXd p = mix(sol.lambda.probs, sol.omega, q_s);
  last_lambda_ = sol.lambda.probs;

  const int decision = rng.categorical(p);
  const Outcome outcome = model_sample(*ca_.cls, true_model, decision, rng);
  rec.decision = decision;
  rec.reward = outcome.reward;
  rec.obs = outcome.obs;
  rec.expected_regret = p.dot(true_gap);
  rec.lambda_member = lambda_membership(ca_, true_model, sol.lambda.probs, eps_, n_s).member;

  ledger_record(ledger_, ca_, xi_, p, true_model);
  cum_ref_loglik_ += expected_log_lik(xi_, *ca_.cls, decision, outcome);
  for (int m = 0; m < ca_.cls->size(); ++m)
    per_model_loglik_[m] += model_loglik(*ca_.cls, m, decision, outcome);
  xi_ = tempered_update(xi_, *ca_.cls, decision, outcome);
  ++s_;
  rec.s = s_ - 1;
  rec.est_kl_cum = ledger_.kl_cum;
  return rec;
}

int baseline_ucb_step(UcbState& state) {
  const int A = static_cast<int>(state.counts.size());
  ++state.t;
  for (int a = 0; a < A; ++a)
    if (state.counts[a] == 0) return a;
  int best = 0;
  double best_idx = -kInf;
  for (int a = 0; a < A; ++a) {
    const double mean = state.sums[a] / static_cast<double>(state.counts[a]);
    const double bonus =
        std::sqrt(2.0 * std::log(static_cast<double>(state.t)) / static_cast<double>(state.counts[a]));
    const double idx = mean + bonus;
    if (idx > best_idx) {
      best_idx = idx;
      best = a;
    }
  }
  return best;
}

void baseline_ucb_record(UcbState& state, int arm, double reward) {
  ++state.counts[arm];
  state.sums[arm] += reward;
}

int baseline_uniform_commit_step(UniformCommitState& state, Rng& rng) {
  const int A = static_cast<int>(state.counts.size());
  ++state.t;
  if (state.t <= state.explore_rounds) return rng.categorical(VectorXd::Constant(A, 1.0 / A));
  if (state.committed < 0) {
    int best = 0;
    double best_mean = -kInf;
    for (int a = 0; a < A; ++a) {
      const double mean =
          state.counts[a] > 0 ? state.sums[a] / static_cast<double>(state.counts[a]) : -kInf;
      if (mean > best_mean) {
        best_mean = mean;
        best = a;
      }
    }
    state.committed = best;
  }
  return state.committed;
}

void baseline_uniform_commit_record(UniformCommitState& state, int arm, double reward) {
  ++state.counts[arm];
  state.sums[arm] += reward;
}

}  // namespace allocest
