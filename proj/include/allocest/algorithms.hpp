#pragma once

#include <optional>

#include "allocest/aec.hpp"
#include "allocest/estimation.hpp"
#include "allocest/gravesl.hpp"

namespace allocest {

enum class LambdaPolicy { exact_subset, heuristic };

struct Ae2Config {
  double delta = 0.2;          // optimality tolerance, in (0, 1/2]
  double eta_opt_cap = 1e6;
  double nmax_constant = 64.0;
  LambdaPolicy lambda_policy = LambdaPolicy::exact_subset;
  double exploit_threshold_floor = 2.718281828459045;
};

struct AeStarConfig : Ae2Config {
  double alpha_m = 0.5;
  double alpha_n = 0.125;
  double alpha_q = 0.25;
  // Multiplier on the active-set filter threshold; 1 reproduces the source
  // constants (which keep the filter empty at desk scale — see fallback flag).
  double filter_scale = 1.0;
};

struct RoundRecord {
  long t = 0;
  bool exploit = false;
  long s = 0;                    // explore-round counter after this round
  int decision = 0;
  double reward = 0.0;
  int obs = 0;
  double expected_regret = 0.0;  // E_{pi ~ p^t}[gap], exploit: exact gap
  double est_kl_cum = 0.0;
  bool lambda_member = false;    // true model in Mgl(lambda^s) (explore only)
  bool exploit_candidate = false;
  bool fallback = false;         // AE*2 active-set fallback in effect
};

// Exploit-test threshold: ln(t ln t) floored to stay defined (and only ever
// relaxed, the safe direction) for small t.
double exploit_threshold(long t, double floor_value = 2.718281828459045);

class Ae2Runner {
 public:
  Ae2Runner(const ClassAnalysis& ca, Ae2Config cfg);

  RoundRecord step(int true_model, Rng& rng);

  // Greedy decision certified by the likelihood-ratio test, if any.
  std::optional<int> exploit_candidate(long t) const;

  struct ExploreChoice {
    VectorXd lambda;
    VectorXd omega;
    VectorXd p;
    double q = 1.0;
  };
  ExploreChoice explore_distribution();

  const ExploreChoice& last_explore() const { return last_choice_; }
  const Posterior& posterior() const { return xi_; }
  long explore_rounds() const { return s_ - 1; }
  double cum_ref_loglik() const { return cum_ref_loglik_; }
  const VectorXd& per_model_loglik() const { return per_model_loglik_; }
  const EstimationLedger& ledger() const { return ledger_; }
  double n_max_value() const { return n_max_; }
  double eps() const { return eps_; }
  double q_value() const { return q_; }
  bool degenerate() const { return degenerate_; }
  const std::vector<std::pair<int, Outcome>>& explore_history() const { return history_; }

 protected:
  const ClassAnalysis& ca_;
  Ae2Config cfg_;
  double eps_;
  double n_max_ = 0.0;
  double q_ = 1.0;
  bool degenerate_ = false;
  std::vector<AecSubsetCandidate> candidates_;  // feasibility is ref-independent

  long t_ = 0;
  long s_ = 1;
  Posterior xi_;
  double cum_ref_loglik_ = 0.0;
  VectorXd per_model_loglik_;
  ExploreChoice last_choice_;
  EstimationLedger ledger_;
  std::vector<std::pair<int, Outcome>> history_;

  void apply_explore_update(int true_model, int decision, const Outcome& outcome,
                            const VectorXd& p);
};

class AeStarRunner {
 public:
  AeStarRunner(const ClassAnalysis& ca, AeStarConfig cfg);

  RoundRecord step(int true_model, Rng& rng);

  const IndexSet& active_set() const { return active_; }
  const VectorXd& last_lambda() const { return last_lambda_; }
  bool fallback_active() const { return fallback_; }
  long explore_rounds() const { return s_ - 1; }
  int epoch() const { return ell_; }
  double current_delta_ell() const { return delta_ell_; }
  const Posterior& posterior() const { return xi_; }
  const EstimationLedger& ledger() const { return ledger_; }

 private:
  const ClassAnalysis& ca_;
  AeStarConfig cfg_;
  double eps_;
  double class_n_max_ = 0.0;

  long t_ = 0;
  long s_ = 1;
  int ell_ = 0;
  double delta_ell_ = 0.0;
  IndexSet active_;
  bool fallback_ = false;
  Posterior xi_;
  double cum_ref_loglik_ = 0.0;
  VectorXd per_model_loglik_;
  EstimationLedger ledger_;
  VectorXd last_lambda_;
  std::vector<double> info_content_;  // per model, at eps

  void start_epoch();
  std::optional<int> exploit_candidate(long t) const;
};

// Restricted-class AEC sweep: max over reference candidates (uniform posterior
// over the scope plus per-model point masses) of the exact solve. This is the
// finite lower bound on the hull supremum used wherever the analysis-facing
// AEC is needed.
double aec_sweep_value(const ClassAnalysis& ca, const IndexSet& scope, double eps,
                       double n_max);

struct UcbState {
  std::vector<long> counts;
  std::vector<double> sums;
  long t = 0;
};

int baseline_ucb_step(UcbState& state);
void baseline_ucb_record(UcbState& state, int arm, double reward);

struct UniformCommitState {
  long t = 0;
  long explore_rounds = 0;  // ceil(T^{2/3})
  std::vector<long> counts;
  std::vector<double> sums;
  int committed = -1;
};

int baseline_uniform_commit_step(UniformCommitState& state, Rng& rng);
void baseline_uniform_commit_record(UniformCommitState& state, int arm, double reward);

}  // namespace allocest
