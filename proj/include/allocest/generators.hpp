#pragma once

#include <cstdint>

#include "allocest/estimation.hpp"
#include "allocest/mdp.hpp"
#include "allocest/models.hpp"

namespace allocest {

// Bandit arms [0, A) plus revealing arms [A, A+N). Observation alphabet is
// {null} ∪ [A]; revealing arm k under the model whose revealing arm is k emits
// the optimal arm index with probability beta, otherwise uniform over [A].
// One model per (optimal arm, revealing arm) pair: A*N models with a two-level
// reward pattern (optimal arm at 2*dmin, other bandit arms at dmin).
FiniteModelClass gen_informative_arm(int A, int N, double beta, double dmin);

FiniteModelClass gen_mab_grid(int arms, double step, bool unique_optimum_only);

// Linear means theta . x clipped to [0,1]; arm features drawn once from the
// seed, theta on a component grid.
FiniteModelClass gen_linear_grid(int dim, int arms, double theta_step, std::uint64_t seed);

TabularMdp gen_tabular_mdp(int S, int A, int H, double p_min, Rng& rng);
FiniteModelClass gen_tabular_random(int S, int A, int H, double p_min, int n_models,
                                    std::uint64_t seed);

// Frozen reference classes used throughout the tests.
FiniteModelClass make_two_model_class();   // means (0.2,0.5) / (0.6,0.5)
FiniteModelClass make_five_arm_class();    // base (0.6,0.4,...) plus per-arm raises to 0.8
FiniteModelClass make_mixed_gap_class();   // per-model min gaps {0.3, 0.05, 0.3, 0.05}

// Random class in which every non-base model differs from the base at exactly
// one non-optimal arm (raised above the base optimum). For such classes the
// base model's allocation program decouples per arm and has the closed form
// used as a test oracle.
struct PerturbationClass {
  FiniteModelClass cls;
  double oracle_glc = 0.0;  // closed-form program value for model 0
};

PerturbationClass gen_single_perturbation_class(std::uint64_t seed, int max_arms = 5,
                                                int max_models = 12);

// Unstructured random grid-mean Gaussian class (membership / AEC fuzz input).
FiniteModelClass gen_random_grid_class(std::uint64_t seed, int max_arms, int max_models,
                                       double step = 0.1, bool unique_optima = false);

}  // namespace allocest
