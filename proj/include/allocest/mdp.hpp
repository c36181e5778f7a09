#pragma once

#include <vector>

#include <Eigen/Core>

#include "allocest/models.hpp"

namespace allocest {

// Finite-horizon tabular MDP with a fixed initial state 0. transitions[h][s][a]
// is a probability vector over next states (unused at h = H-1); rewards are
// per-step means in [0, 1/H]; every transition probability is >= p_min.
struct TabularMdp {
  int S = 1, A = 1, H = 1;
  double p_min = 0.0;
  // [h][s][a] -> probs over S
  std::vector<std::vector<std::vector<VectorXd>>> transitions;
  // [h][s][a] -> mean reward
  std::vector<std::vector<std::vector<double>>> rewards;
};

using Policy = std::vector<std::vector<int>>;  // [h][s] -> a

// State-occupancy w_h(s) under a deterministic policy (forward DP).
std::vector<VectorXd> occupancies(const TabularMdp& m, const Policy& policy);

// Trajectory-level KL between the (reward, trajectory) laws of m1 and m2 under
// a shared policy, via the occupancy-weighted per-step decomposition.
double mdp_policy_kl(const TabularMdp& m1, const TabularMdp& m2, const Policy& policy,
                     double sigma2 = 1.0);

// Same quantity by explicit trajectory enumeration (test oracle; exponential).
double mdp_policy_kl_bruteforce(const TabularMdp& m1, const TabularMdp& m2,
                                const Policy& policy, double sigma2 = 1.0);

// Expected return V^{m,policy} from state 0 (backward induction).
double policy_value(const TabularMdp& m, const Policy& policy);

struct MdpBacking {
  std::vector<TabularMdp> mdps;   // parallel to class models
  std::vector<Policy> policies;   // decision index -> policy
  double sigma2 = 1.0;            // per-step reward noise variance
};

// Compiles a set of MDPs (shared S,A,H) into a finite model class whose
// decisions enumerate all A^{S*H} deterministic policies. Throws if the
// policy count exceeds policy_cap.
FiniteModelClass compile_mdps(const std::vector<TabularMdp>& mdps,
                              const std::vector<std::string>& names,
                              double sigma2 = 1.0, int policy_cap = 4096);

// Trajectory <-> observation-index codec (states s_2..s_H in base S).
int encode_trajectory(const std::vector<int>& states, int S, int H);
std::vector<int> decode_trajectory(int obs, int S, int H);

}  // namespace allocest
