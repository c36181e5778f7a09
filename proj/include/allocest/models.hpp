#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "allocest/rng.hpp"

namespace allocest {

using Eigen::VectorXd;
using IndexSet = std::vector<int>;

// Reward/observation law for a single decision: independent Gaussian reward
// and categorical observation over a shared alphabet (index 0 is the null
// observation). reward_uninformative marks decisions whose reward is
// identically zero (informative arms); their Gaussian part carries no
// information and is excluded from divergences and likelihoods.
struct OutcomeModel {
  double mean = 0.0;
  double variance = 1.0;
  VectorXd obs;  // size K, sums to 1
  bool reward_uninformative = false;
};

struct Outcome {
  double reward = 0.0;
  int obs = 0;
  // Per-step rewards for trajectory-valued outcomes (compiled MDP classes);
  // empty for plain bandit outcomes.
  std::vector<double> step_rewards;
};

struct FiniteModel {
  std::string name;
  std::vector<OutcomeModel> outcomes;  // one per decision
};

struct RegularityConstants {
  double l_kl = 0.0;
  double v_m = 0.0;
  double d_cov = 0.0;
  double c_cov = 1.0;
};

struct TabularMdp;      // mdp.hpp
struct MdpBacking;      // mdp.hpp

struct FiniteModelClass {
  int decision_count = 0;
  int obs_alphabet_size = 1;
  double sigma2 = 1.0;
  std::vector<FiniteModel> models;
  RegularityConstants regularity;
  // When set, divergences/likelihoods/sampling route through the MDPs the
  // models were compiled from (trajectory laws are not per-decision products).
  std::shared_ptr<const MdpBacking> mdp;

  int size() const { return static_cast<int>(models.size()); }
};

struct GapInfo {
  IndexSet optimal_set;
  VectorXd gap;
  double min_gap = 0.0;  // 0 when the optimal set is not a singleton
};

double kl_divergence(const OutcomeModel& a, const OutcomeModel& b);
double hellinger_sq(const OutcomeModel& a, const OutcomeModel& b);
double log_likelihood(const OutcomeModel& m, const Outcome& outcome);
Outcome sample(const OutcomeModel& m, Rng& rng);

GapInfo gaps(const FiniteModel& model);

enum class ClassKind { gaussian_bandit, informative_arm, linear_grid, tabular };

struct RegularityParams {
  double sigma = 1.0;
  int A = 1;
  double beta = 0.5;
  int H = 1;
  double p_min = 0.1;
  int S = 1;
};

RegularityConstants regularity_constants(ClassKind kind, const RegularityParams& params);

// Class-level dispatch: plain classes use the per-decision OutcomeModel laws,
// MDP-backed classes use the trajectory laws of the source MDPs.
double model_kl(const FiniteModelClass& cls, int m1, int m2, int decision);
double model_hellinger_sq(const FiniteModelClass& cls, int m1, int m2, int decision);
double model_loglik(const FiniteModelClass& cls, int m, int decision, const Outcome& outcome);
Outcome model_sample(const FiniteModelClass& cls, int m, int decision, Rng& rng);

// Validation used by the loader and generators; throws std::runtime_error
// with a message naming the offending model/decision.
void validate_class(const FiniteModelClass& cls);

}  // namespace allocest
