#pragma once

#include <vector>

#include "allocest/gravesl.hpp"
#include "allocest/models.hpp"

namespace allocest {

// Posterior over class model indices. support lists the indices with
// (potentially) positive weight; weights is parallel to support.
struct Posterior {
  std::vector<int> support;
  VectorXd weights;

  VectorXd full_weights(int class_size) const {
    VectorXd w = VectorXd::Zero(class_size);
    for (size_t i = 0; i < support.size(); ++i) w[support[i]] = weights[static_cast<int>(i)];
    return w;
  }
};

Posterior tempered_init(const std::vector<int>& support);
Posterior tempered_init_full(const FiniteModelClass& cls);

// Square-root-likelihood reweighting, computed in log space.
Posterior tempered_update(const Posterior& xi, const FiniteModelClass& cls, int decision,
                          const Outcome& outcome);

VectorXd posterior_mean_rewards(const Posterior& xi, const FiniteModelClass& cls);
IndexSet greedy_set(const Posterior& xi, const FiniteModelClass& cls);

double expected_log_lik(const Posterior& xi, const FiniteModelClass& cls, int decision,
                        const Outcome& outcome);

struct EstimationLedger {
  std::vector<double> kl_records;       // E_{xi}E_p[KL(M*||Mhat)]
  std::vector<double> kl_flip_records;  // E_{xi}E_p[KL(Mhat||M*)]
  std::vector<double> hellinger_records;
  double kl_cum = 0.0;
  double kl_flip_cum = 0.0;
  double hellinger_cum = 0.0;
};

void ledger_record(EstimationLedger& ledger, const ClassAnalysis& ca, const Posterior& xi,
                   const VectorXd& p, int true_model);

struct GridCoverSpec {
  enum class Kind { mab_grid, linear_grid } kind = Kind::mab_grid;
  int arms = 2;
  double step = 0.5;
  double sigma2 = 1.0;
  // linear_grid: features per arm and the theta grid.
  std::vector<VectorXd> arm_features;
  std::vector<VectorXd> theta_grid;
  bool unique_optimum_only = false;
};

FiniteModelClass build_grid_cover(const GridCoverSpec& spec);

}  // namespace allocest
