#pragma once

#include <optional>
#include <variant>

#include "allocest/gravesl.hpp"
#include "allocest/models.hpp"

namespace allocest {

// Reference for divergence rows: a class model index, an external model, or a
// probability vector over class models.
struct ReferencePoint {
  std::variant<int, FiniteModel, VectorXd> ref;

  static ReferencePoint model_index(int i) { return {i}; }
  static ReferencePoint external(FiniteModel m) { return {std::move(m)}; }
  static ReferencePoint posterior(VectorXd xi) { return {std::move(xi)}; }
};

enum class AecMode { exact_subset, candidate_heuristic };

struct AecSolution {
  double value = 0.0;  // may be +inf
  NormalizedAllocation lambda;
  VectorXd omega;
  IndexSet excluded_models;  // scope \ mgl_set(lambda)
  AecMode mode = AecMode::exact_subset;
};

// Divergence row: entry pi = E_{ref}[KL(ref(pi) || m(pi))].
VectorXd divergence_row(const ClassAnalysis& ca, const ReferencePoint& ref, int m);

// Inner problem at fixed lambda: best omega against the models in scope for
// which lambda is not eps-optimal. Value conventions: 0 if nothing is
// excluded; +inf if some excluded model is indistinguishable from ref.
struct FixedLambdaResult {
  double value = 0.0;
  VectorXd omega;
  IndexSet excluded;
};

FixedLambdaResult aec_fixed_lambda(const ClassAnalysis& ca, const IndexSet& scope,
                                   const ReferencePoint& ref, const VectorXd& lambda,
                                   double eps, double n_max);

AecSolution aec_solve(const ClassAnalysis& ca, const IndexSet& scope,
                      const ReferencePoint& ref, double eps, double n_max, AecMode mode,
                      const std::vector<VectorXd>& extra_candidates = {});

// Models sharing the reference's optimal decisions and indistinguishable from
// it when playing them.
IndexSet m_opt_set(const ClassAnalysis& ca, const IndexSet& scope, int ref_model);

struct CexpResult {
  double c = 0.0;  // may be +inf
  VectorXd p;
  bool certificate = false;
};

// Uniform exploration coefficient diagnostic: search for (C, p) such that any
// pair separated by more than eps in sup-KL is detectable under p at rate 1/C;
// the certificate is an exhaustive pair check.
CexpResult c_exp_heuristic(const ClassAnalysis& ca, const VectorXd& xi, double eps);
bool c_exp_certificate(const ClassAnalysis& ca, const VectorXd& xi, double eps, double c,
                       const VectorXd& p);

// Feasibility of a membership pattern: is there a lambda with S ⊆ mgl_set?
// Returns the witness lambda when feasible. Exposed for tests.
std::optional<VectorXd> subset_feasible_lambda(const ClassAnalysis& ca, const IndexSet& subset,
                                               double eps, double n_max);

// Maximal feasible membership patterns over the scope, with witness lambdas.
// Independent of the reference point, so callers that solve the program with a
// changing reference (the online algorithms) can compute this once.
struct AecSubsetCandidate {
  IndexSet subset;
  VectorXd lambda;
};

std::vector<AecSubsetCandidate> aec_maximal_subsets(const ClassAnalysis& ca,
                                                    const IndexSet& scope, double eps,
                                                    double n_max);

// Exact solve restricted to precomputed candidates (plus a uniform fallback
// when the list is empty).
AecSolution aec_solve_from_candidates(const ClassAnalysis& ca, const IndexSet& scope,
                                      const ReferencePoint& ref, double eps, double n_max,
                                      const std::vector<AecSubsetCandidate>& candidates);

}  // namespace allocest
