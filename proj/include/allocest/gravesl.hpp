#pragma once

#include <optional>

#include "allocest/models.hpp"
#include "allocest/optimize.hpp"

namespace allocest {

struct Allocation {
  VectorXd weights;  // eta >= 0, unnormalized pull counts per log T
};

struct NormalizedAllocation {
  VectorXd probs;                      // lambda, simplex point
  std::optional<double> norm_factor;   // n
};

struct GlcSolution {
  double value = 0.0;
  Allocation allocation;
  IndexSet binding_alternatives;
  bool cap_binding = false;  // eta at an optimal decision hit the cap
};

// Precomputed per-class quantities most operations need. Everything is
// deterministic and immutable once built.
struct ClassAnalysis {
  const FiniteModelClass* cls = nullptr;
  std::vector<GapInfo> gap_info;
  std::vector<IndexSet> alt_sets;
  // kl[m1][m2] is the per-decision KL row between class models (computed lazily
  // would complicate threading; classes here are small, so precompute).
  std::vector<std::vector<VectorXd>> kl;
  std::vector<double> glc_value;
  std::vector<Allocation> glc_allocation;

  explicit ClassAnalysis(const FiniteModelClass& c, double eta_opt_cap = 1e6);
};

IndexSet alt_set(const FiniteModelClass& cls, int m);

// I_m(eta): min over alternatives of sum_pi eta(pi) KL(m(pi)||M'(pi));
// +inf when the alternative set is empty.
double info(const ClassAnalysis& ca, int m, const VectorXd& eta);

GlcSolution glc(const FiniteModelClass& cls, int m, double eta_opt_cap = 1e6);

struct MembershipResult {
  bool member = false;
  std::optional<double> witness_n;
};

MembershipResult lambda_membership(const ClassAnalysis& ca, int m, const VectorXd& lambda,
                                   double eps, double n_max);

IndexSet mgl_set(const ClassAnalysis& ca, const VectorXd& lambda, double eps, double n_max);

// Smallest pull budget n beyond which the optimal decision stops yielding
// distinguishing information against alternatives (per-alternative LP max).
double info_content(const ClassAnalysis& ca, int m, double eps);

struct NmaxResult {
  double value = 0.0;
  double delta_min = 0.0;
  double n_class = 0.0;
  double max_glc = 0.0;
};

NmaxResult n_max(const ClassAnalysis& ca, double eps, double constant = 64.0);

// Normalized allocation from the glc solution with eta(optimal) set to the
// model's information content before normalizing.
NormalizedAllocation normalized_glc_allocation(const ClassAnalysis& ca, int m, double eps);

}  // namespace allocest
