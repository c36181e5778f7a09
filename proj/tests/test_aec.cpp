#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "allocest/aec.hpp"
#include "allocest/generators.hpp"
#include "allocest/rng.hpp"

using namespace allocest;

namespace {
IndexSet all_models(const FiniteModelClass& cls) {
  IndexSet s(cls.size());
  for (int i = 0; i < cls.size(); ++i) s[i] = i;
  return s;
}

VectorXd random_simplex(int n, Rng& rng) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = -std::log(rng.uniform() + 1e-12);
  return v / v.sum();
}
}  // namespace

TEST_CASE("divergence rows: point-mass posterior equals model reference") {
  FiniteModelClass cls = make_five_arm_class();
  ClassAnalysis ca(cls);
  for (int m = 0; m < cls.size(); ++m) {
    VectorXd xi = VectorXd::Zero(cls.size());
    xi[m] = 1.0;
    for (int j = 0; j < cls.size(); ++j) {
      VectorXd a = divergence_row(ca, ReferencePoint::model_index(m), j);
      VectorXd b = divergence_row(ca, ReferencePoint::posterior(xi), j);
      CHECK((a - b).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("fixed-lambda conventions") {
  FiniteModelClass cls = make_two_model_class();
  ClassAnalysis ca(cls);
  const IndexSet scope = all_models(cls);
  // Pointed allocation keeps both models inside: nothing excluded, value 0.
  VectorXd pointed(2);
  pointed << 1.0, 0.0;
  FixedLambdaResult r =
      aec_fixed_lambda(ca, scope, ReferencePoint::model_index(0), pointed, 0.1, 100.0);
  CHECK(r.excluded.empty());
  CHECK(r.value == doctest::Approx(0.0));
  // Blind allocation excludes everything; omega must pay for both models.
  VectorXd blind(2);
  blind << 0.0, 1.0;
  FixedLambdaResult b =
      aec_fixed_lambda(ca, scope, ReferencePoint::model_index(0), blind, 0.1, 100.0);
  CHECK(b.excluded == IndexSet{0, 1});
  // Best omega is all mass on arm 0: min over the two divergence rows there is
  // min(KL(M0||M0), KL(M0||M1)) at arm 0 = min(0, 0.08) = 0 -> value inf? No:
  // excluded includes the reference itself with zero divergence everywhere.
  CHECK(std::isinf(b.value));
}

TEST_CASE("solution excluded set is consistent with its lambda") {
  Rng rng(5);
  for (int seed = 0; seed < 10; ++seed) {
    FiniteModelClass cls = gen_random_grid_class(derive_seed(21, seed), 4, 6, 0.1, true);
    ClassAnalysis ca(cls);
    const IndexSet scope = all_models(cls);
    VectorXd xi = random_simplex(cls.size(), rng);
    AecSolution sol =
        aec_solve(ca, scope, ReferencePoint::posterior(xi), 0.2, 50.0, AecMode::exact_subset);
    IndexSet recomputed;
    for (int m : scope)
      if (!lambda_membership(ca, m, sol.lambda.probs, 0.2, 50.0).member)
        recomputed.push_back(m);
    CHECK(sol.excluded_models == recomputed);
  }
}

TEST_CASE("exact solve never exceeds the candidate heuristic") {
  for (int seed = 0; seed < 30; ++seed) {
    FiniteModelClass cls = gen_random_grid_class(derive_seed(33, seed), 4, 6, 0.1, true);
    ClassAnalysis ca(cls);
    const IndexSet scope = all_models(cls);
    Rng rng(derive_seed(34, seed));
    VectorXd xi = random_simplex(cls.size(), rng);
    const ReferencePoint ref = ReferencePoint::posterior(xi);
    AecSolution exact = aec_solve(ca, scope, ref, 0.2, 50.0, AecMode::exact_subset);
    AecSolution heur = aec_solve(ca, scope, ref, 0.2, 50.0, AecMode::candidate_heuristic);
    CHECK(exact.value <= heur.value + 1e-9);
  }
}

TEST_CASE("value is monotone in scope and antitone in eps") {
  for (int seed = 0; seed < 8; ++seed) {
    FiniteModelClass cls = gen_random_grid_class(derive_seed(41, seed), 4, 6, 0.1, true);
    if (cls.size() < 3) continue;
    ClassAnalysis ca(cls);
    Rng rng(derive_seed(42, seed));
    VectorXd xi = random_simplex(cls.size(), rng);
    const ReferencePoint ref = ReferencePoint::posterior(xi);
    IndexSet small_scope = all_models(cls);
    small_scope.pop_back();
    const double v_small =
        aec_solve(ca, small_scope, ref, 0.2, 50.0, AecMode::exact_subset).value;
    const double v_full =
        aec_solve(ca, all_models(cls), ref, 0.2, 50.0, AecMode::exact_subset).value;
    CHECK(v_small <= v_full + 1e-9);
    const double v_loose =
        aec_solve(ca, all_models(cls), ref, 0.4, 50.0, AecMode::exact_subset).value;
    CHECK(v_loose <= v_full + 1e-9);
  }
}

TEST_CASE("mixture reference value bounded by weighted point masses") {
  // The divergence rows are nonnegative, so at any allocation the mixture game
  // value dominates xi_j times the point-mass game value: for every j,
  // value(xi) <= value(delta_j) / xi_j. (The unweighted "worst point mass"
  // bound fails: a mixture pays dilution from near-zero self-divergence mass
  // that no single point-mass solve suffers.)
  for (int seed = 0; seed < 10; ++seed) {
    FiniteModelClass cls = gen_random_grid_class(derive_seed(55, seed), 3, 5, 0.1, true);
    ClassAnalysis ca(cls);
    const IndexSet scope = all_models(cls);
    Rng rng(derive_seed(56, seed));
    VectorXd xi = random_simplex(cls.size(), rng);
    const double mixed =
        aec_solve(ca, scope, ReferencePoint::posterior(xi), 0.2, 50.0, AecMode::exact_subset)
            .value;
    double bound = std::numeric_limits<double>::infinity();
    for (int m = 0; m < cls.size(); ++m) {
      const double v =
          aec_solve(ca, scope, ReferencePoint::model_index(m), 0.2, 50.0, AecMode::exact_subset)
              .value;
      if (xi[m] > 0.0) bound = std::min(bound, v / xi[m]);
    }
    CHECK(mixed <= bound * (1.0 + 1e-9) + 1e-9);
  }
}

TEST_CASE("maximal subsets are feasible, maximal, and reference-free") {
  FiniteModelClass cls = make_five_arm_class();
  ClassAnalysis ca(cls);
  const IndexSet scope = all_models(cls);
  auto cands = aec_maximal_subsets(ca, scope, 0.2, 200.0);
  REQUIRE(!cands.empty());
  for (const auto& c : cands) {
    // Witness realizes at least its own pattern.
    IndexSet members = mgl_set(ca, c.lambda, 0.2, 200.0);
    for (int m : c.subset)
      CHECK(std::find(members.begin(), members.end(), m) != members.end());
    // No candidate strictly contains another.
    for (const auto& other : cands) {
      if (&other == &c) continue;
      const bool contains = std::includes(other.subset.begin(), other.subset.end(),
                                          c.subset.begin(), c.subset.end());
      CHECK(!(contains && other.subset.size() > c.subset.size()));
    }
  }
}

TEST_CASE("scope guard for exact enumeration") {
  FiniteModelClass cls = gen_informative_arm(5, 4, 0.9, 0.25);  // 20 models
  ClassAnalysis ca(cls);
  CHECK_THROWS_WITH_AS(aec_maximal_subsets(ca, all_models(cls), 0.2, 50.0),
                       doctest::Contains("heuristic"), std::runtime_error);
}

TEST_CASE("reference-optimal indistinguishable set") {
  FiniteModelClass cls = make_five_arm_class();
  // M0's optimum is arm 0; every other model shares the same law at arm 0 but
  // has a different optimum, so only M0 itself qualifies.
  ClassAnalysis ca(cls);
  CHECK(m_opt_set(ca, all_models(cls), 0) == IndexSet{0});
  // A duplicate of the reference (same optimal arm, same law there) joins.
  FiniteModelClass dup = make_two_model_class();
  dup.models.push_back(dup.models[0]);
  dup.models[2].name = "M0b";
  dup.models[2].outcomes[0].mean = 0.25;  // differs off-optimum only
  ClassAnalysis ca2(dup);
  CHECK(m_opt_set(ca2, all_models(dup), 0) == IndexSet{0, 2});
}

TEST_CASE("uniform exploration coefficient certificate") {
  FiniteModelClass cls = make_two_model_class();
  ClassAnalysis ca(cls);
  VectorXd xi = VectorXd::Constant(2, 0.5);
  CexpResult r = c_exp_heuristic(ca, xi, 0.01);
  CHECK(r.certificate);
  CHECK(std::isfinite(r.c));
  // Hand value: only violating pair (0,1); uniform p already optimal-ish with
  // detection rate E_xi E_p[KL] = 0.5 * 0.5 * 0.08 = 0.02 either side.
  CHECK(r.c <= 1.0 / 0.02 + 1e-6);
  CHECK(c_exp_certificate(ca, xi, 0.01, r.c, r.p));
  // Threshold above every pairwise divergence: nothing to separate.
  CexpResult none = c_exp_heuristic(ca, xi, 10.0);
  CHECK(none.certificate);
  CHECK(none.c == doctest::Approx(1.0));
}
