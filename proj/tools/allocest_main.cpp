#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "allocest/aec.hpp"
#include "allocest/class_io.hpp"
#include "allocest/generators.hpp"
#include "allocest/gravesl.hpp"
#include "allocest/harness.hpp"

using namespace allocest;
using nlohmann::json;

namespace {

int model_index(const FiniteModelClass& cls, const std::string& name) {
  for (int i = 0; i < cls.size(); ++i)
    if (cls.models[i].name == name) return i;
  throw std::invalid_argument("no model named '" + name + "' in class");
}

std::vector<std::uint64_t> parse_seeds(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stoull(tok));
  if (out.empty()) throw std::invalid_argument("seed list is empty");
  return out;
}

json vector_json(const VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

// Exit codes: 0 success, 1 input/validation error, 2 solver failure.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

FiniteModelClass load_checked(const std::string& path) {
  try {
    return load_class(path);
  } catch (const std::exception& e) {
    throw ValidationError(e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Instance-optimal allocation solvers and interactive-learning simulators"};
  app.require_subcommand(1);

  std::string class_file, model_name, ref_name, out_path, csv_path, algo = "ae2",
              true_model = "", seeds_csv = "1", kind, mode = "exact";
  double eps = 0.1, n_max_flag = 0.0, eta_cap = 1e6, constant = 64.0, delta = 0.2,
         beta = 0.9, dmin = 0.25, step = 0.5, p_min = 0.1, theta_step = 0.5;
  long T = 1000;
  int A = 5, N = 4, S = 2, H = 2, dim = 2, n_models = 4, arms = 2;
  std::uint64_t gen_seed = 1;
  bool json_out = false, unique_opt = true;

  auto add_json = [&](CLI::App* sub) { sub->add_flag("--json", json_out, "machine-readable output"); };

  auto* validate_cmd = app.add_subcommand("validate", "validate a class file");
  validate_cmd->add_option("--class", class_file, "class JSON file")->required();
  add_json(validate_cmd);

  auto* glc_cmd = app.add_subcommand("glc", "optimal-allocation program value for a model");
  glc_cmd->add_option("--class", class_file)->required();
  glc_cmd->add_option("--model", model_name)->required();
  glc_cmd->add_option("--eta-cap", eta_cap, "cap on allocation at optimal decisions");
  add_json(glc_cmd);

  auto* aec_cmd = app.add_subcommand("aec", "allocation-estimation coefficient");
  aec_cmd->add_option("--class", class_file)->required();
  aec_cmd->add_option("--ref", ref_name, "reference model name (default: uniform posterior)");
  aec_cmd->add_option("--eps", eps);
  aec_cmd->add_option("--nmax", n_max_flag, "normalization budget (default: computed)");
  aec_cmd->add_option("--mode", mode)->check(CLI::IsMember({"exact", "heuristic"}));
  add_json(aec_cmd);

  auto* nm_cmd = app.add_subcommand("nm", "information content of a model");
  nm_cmd->add_option("--class", class_file)->required();
  nm_cmd->add_option("--model", model_name)->required();
  nm_cmd->add_option("--eps", eps);
  add_json(nm_cmd);

  auto* nmax_cmd = app.add_subcommand("nmax", "class-level normalization budget");
  nmax_cmd->add_option("--class", class_file)->required();
  nmax_cmd->add_option("--eps", eps);
  nmax_cmd->add_option("--constant", constant);
  add_json(nmax_cmd);

  auto* sim_cmd = app.add_subcommand("simulate", "run an online algorithm and export traces");
  sim_cmd->add_option("--class", class_file)->required();
  sim_cmd->add_option("--algo", algo)->check(CLI::IsMember({"ae2", "aestar", "ucb1", "uniform_commit"}));
  sim_cmd->add_option("--true", true_model, "true model name")->required();
  sim_cmd->add_option("--T", T);
  sim_cmd->add_option("--delta", delta);
  sim_cmd->add_option("--seeds", seeds_csv, "comma-separated seeds");
  sim_cmd->add_option("--csv", csv_path, "trace CSV output path");
  add_json(sim_cmd);

  auto* alloc_cmd = app.add_subcommand("alloc-eval", "allocation-learning protocol over all models");
  alloc_cmd->add_option("--class", class_file)->required();
  alloc_cmd->add_option("--algo", algo)->check(CLI::IsMember({"ae2", "aestar"}));
  alloc_cmd->add_option("--T", T);
  alloc_cmd->add_option("--delta", delta);
  alloc_cmd->add_option("--eps", eps);
  alloc_cmd->add_option("--nmax", n_max_flag, "membership budget (default: computed)");
  alloc_cmd->add_option("--seeds", seeds_csv);
  add_json(alloc_cmd);

  auto* gen_cmd = app.add_subcommand("gen-class", "generate a class file");
  gen_cmd->add_option("kind", kind, "informative-arm | mab-grid | linear-grid | tabular-random")
      ->required();
  gen_cmd->add_option("--A", A);
  gen_cmd->add_option("--N", N);
  gen_cmd->add_option("--beta", beta);
  gen_cmd->add_option("--dmin", dmin);
  gen_cmd->add_option("--arms", arms);
  gen_cmd->add_option("--step", step);
  gen_cmd->add_flag("--unique-optimum,!--no-unique-optimum", unique_opt);
  gen_cmd->add_option("--dim", dim);
  gen_cmd->add_option("--theta-step", theta_step);
  gen_cmd->add_option("--S", S);
  gen_cmd->add_option("--H", H);
  gen_cmd->add_option("--p-min", p_min);
  gen_cmd->add_option("--models", n_models);
  gen_cmd->add_option("--seed", gen_seed);
  gen_cmd->add_option("--out", out_path)->required();
  add_json(gen_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; any parse failure is an input error.
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*validate_cmd) {
      FiniteModelClass cls = load_checked(class_file);
      if (json_out)
        std::cout << json{{"ok", true}, {"models", cls.size()}, {"decisions", cls.decision_count}}
                  << "\n";
      else
        std::cout << "ok: " << cls.size() << " models, " << cls.decision_count << " decisions\n";
      return 0;
    }

    if (*gen_cmd) {
      FiniteModelClass cls;
      json meta;
      meta["generator"] = kind;
      meta["seed"] = gen_seed;
      try {
        if (kind == "informative-arm") {
          cls = gen_informative_arm(A, N, beta, dmin);
          meta["params"] = {{"A", A}, {"N", N}, {"beta", beta}, {"dmin", dmin}};
        } else if (kind == "mab-grid") {
          cls = gen_mab_grid(arms, step, unique_opt);
          meta["params"] = {{"arms", arms}, {"step", step}, {"unique_optimum", unique_opt}};
        } else if (kind == "linear-grid") {
          cls = gen_linear_grid(dim, arms, theta_step, gen_seed);
          meta["params"] = {{"dim", dim}, {"arms", arms}, {"theta_step", theta_step}};
        } else if (kind == "tabular-random") {
          cls = gen_tabular_random(S, A, H, p_min, n_models, gen_seed);
          meta["params"] = {{"S", S}, {"A", A}, {"H", H}, {"p_min", p_min}, {"models", n_models}};
        } else {
          throw ValidationError("unknown class kind: " + kind);
        }
      } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
      }
      save_class(cls, out_path, meta.dump());
      if (json_out)
        std::cout << json{{"ok", true}, {"out", out_path}, {"models", cls.size()}} << "\n";
      else
        std::cout << "wrote " << out_path << " (" << cls.size() << " models)\n";
      return 0;
    }

    FiniteModelClass cls = load_checked(class_file);
    ClassAnalysis ca(cls, eta_cap);

    if (*glc_cmd) {
      const int m = model_index(cls, model_name);
      GlcSolution sol = glc(cls, m, eta_cap);
      if (json_out) {
        json j{{"model", model_name},
               {"value", sol.value},
               {"allocation", vector_json(sol.allocation.weights)},
               {"cap_binding", sol.cap_binding}};
        j["binding_alternatives"] = json::array();
        for (int b : sol.binding_alternatives) j["binding_alternatives"].push_back(cls.models[b].name);
        std::cout << j << "\n";
      } else {
        std::cout << sol.value << "\n";
      }
      return 0;
    }

    if (*nm_cmd) {
      const int m = model_index(cls, model_name);
      const double v = info_content(ca, m, eps);
      if (json_out)
        std::cout << json{{"model", model_name}, {"eps", eps}, {"value", v}} << "\n";
      else
        std::cout << v << "\n";
      return 0;
    }

    if (*nmax_cmd) {
      NmaxResult r = n_max(ca, eps, constant);
      if (json_out)
        std::cout << json{{"value", r.value},
                          {"delta_min", r.delta_min},
                          {"n_class", r.n_class},
                          {"max_program_value", r.max_glc}}
                  << "\n";
      else
        std::cout << r.value << "\n";
      return 0;
    }

    if (*aec_cmd) {
      const double budget = n_max_flag > 0.0 ? n_max_flag : n_max(ca, eps, constant).value;
      IndexSet scope(cls.size());
      for (int i = 0; i < cls.size(); ++i) scope[i] = i;
      ReferencePoint ref =
          ref_name.empty()
              ? ReferencePoint::posterior(VectorXd::Constant(cls.size(), 1.0 / cls.size()))
              : ReferencePoint::model_index(model_index(cls, ref_name));
      AecSolution sol = aec_solve(ca, scope, ref, eps, budget,
                                  mode == "exact" ? AecMode::exact_subset
                                                  : AecMode::candidate_heuristic);
      if (json_out) {
        json j{{"value", sol.value},
               {"lambda", vector_json(sol.lambda.probs)},
               {"omega", vector_json(sol.omega)},
               {"n_max", budget}};
        j["excluded"] = json::array();
        for (int e : sol.excluded_models) j["excluded"].push_back(cls.models[e].name);
        std::cout << j << "\n";
      } else {
        std::cout << sol.value << "\n";
      }
      return 0;
    }

    if (*sim_cmd) {
      ExperimentSpec spec;
      spec.T = T;
      spec.seeds = parse_seeds(seeds_csv);
      spec.ae2.delta = delta;
      spec.aestar.delta = delta;
      if (algo == "ae2") spec.algorithm = Algorithm::ae2;
      else if (algo == "aestar") spec.algorithm = Algorithm::aestar;
      else if (algo == "ucb1") spec.algorithm = Algorithm::ucb1;
      else spec.algorithm = Algorithm::uniform_commit;
      spec.true_model = model_index(cls, true_model);
      std::vector<RunTrace> traces = run_experiment(ca, spec);
      if (!csv_path.empty()) export_csv(traces, csv_path);
      if (json_out)
        std::cout << summarize_json(traces) << "\n";
      else
        std::cout << summarize(traces);
      return 0;
    }

    if (*alloc_cmd) {
      ExperimentSpec spec;
      spec.T = T;
      spec.seeds = parse_seeds(seeds_csv);
      spec.ae2.delta = delta;
      spec.aestar.delta = delta;
      spec.algorithm = algo == "aestar" ? Algorithm::aestar : Algorithm::ae2;
      const double budget = n_max_flag > 0.0 ? n_max_flag : n_max(ca, eps, constant).value;
      AllocationReport report = allocation_protocol_eval(ca, spec, eps, budget);
      if (json_out) {
        json j;
        j["worst_success"] = report.worst_success;
        j["per_model_success"] = json::array();
        for (size_t m = 0; m < report.per_model_success.size(); ++m)
          j["per_model_success"].push_back(
              {{"model", cls.models[m].name}, {"success", report.per_model_success[m]}});
        std::cout << j.dump(2) << "\n";
      } else {
        for (size_t m = 0; m < report.per_model_success.size(); ++m)
          std::cout << cls.models[m].name << " success " << report.per_model_success[m] << "\n";
        std::cout << "worst " << report.worst_success << "\n";
      }
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
