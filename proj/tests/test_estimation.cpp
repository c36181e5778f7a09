#include <doctest.h>

#include <cmath>

#include "allocest/estimation.hpp"
#include "allocest/generators.hpp"
#include "allocest/rng.hpp"

using namespace allocest;

namespace {
FiniteModelClass eight_model_class(std::uint64_t seed) {
  Rng rng(seed);
  FiniteModelClass cls;
  cls.decision_count = 3;
  cls.obs_alphabet_size = 1;
  cls.sigma2 = 1.0;
  RegularityParams rp;
  rp.A = 3;
  cls.regularity = regularity_constants(ClassKind::gaussian_bandit, rp);
  for (int m = 0; m < 8; ++m) {
    FiniteModel fm;
    fm.name = "m" + std::to_string(m);
    for (int a = 0; a < 3; ++a) {
      OutcomeModel om;
      om.mean = 0.1 * (1 + static_cast<int>(rng.uniform() * 9));
      om.obs = VectorXd::Ones(1);
      fm.outcomes.push_back(om);
    }
    cls.models.push_back(std::move(fm));
  }
  validate_class(cls);
  return cls;
}
}  // namespace

TEST_CASE("tempered update hand computation") {
  FiniteModelClass cls = make_two_model_class();
  Posterior xi = tempered_init_full(cls);
  Outcome o;
  o.reward = 0.0;
  o.obs = 0;
  // Arm 0 means 0.2 / 0.6: half log-likelihood ratio = (0.36 - 0.04)/4 = 0.08.
  Posterior next = tempered_update(xi, cls, 0, o);
  const double ratio = next.weights[0] / next.weights[1];
  CHECK(ratio == doctest::Approx(std::exp(0.08)).epsilon(1e-12));
  CHECK(next.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tempered update is deterministic and keeps support order") {
  FiniteModelClass cls = make_five_arm_class();
  Posterior xi = tempered_init({1, 3});
  Outcome o;
  o.reward = 0.5;
  o.obs = 0;
  Posterior a = tempered_update(xi, cls, 2, o);
  Posterior b = tempered_update(xi, cls, 2, o);
  CHECK(a.support == std::vector<int>{1, 3});
  CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("all-zero likelihood rejected") {
  FiniteModelClass cls = gen_informative_arm(5, 2, 0.9, 0.25);
  Posterior xi = tempered_init_full(cls);
  Outcome impossible;
  impossible.reward = 0.0;
  impossible.obs = 1;  // bandit arms emit only the null symbol
  CHECK_THROWS_AS(tempered_update(xi, cls, 0, impossible), std::runtime_error);
}

TEST_CASE("posterior mean rewards and greedy ties") {
  FiniteModelClass cls = make_two_model_class();
  Posterior xi = tempered_init_full(cls);
  VectorXd means = posterior_mean_rewards(xi, cls);
  CHECK(means[0] == doctest::Approx(0.4));
  CHECK(means[1] == doctest::Approx(0.5));
  CHECK(greedy_set(xi, cls) == IndexSet{1});
  // Exact tie reported in index order.
  Posterior tilted;
  tilted.support = {0, 1};
  tilted.weights = Eigen::Vector2d(0.25, 0.75);
  VectorXd m2 = posterior_mean_rewards(tilted, cls);
  CHECK(m2[0] == doctest::Approx(0.5));
  CHECK(greedy_set(tilted, cls) == IndexSet{0, 1});
}

TEST_CASE("posterior consistency under forced exploration") {
  FiniteModelClass cls = make_two_model_class();
  int ok = 0;
  const int runs = 20;
  for (int seed = 0; seed < runs; ++seed) {
    Rng rng(derive_seed(61, seed));
    Posterior xi = tempered_init_full(cls);
    for (int t = 0; t < 2000; ++t) {
      Outcome o = model_sample(cls, 0, 0, rng);  // arm 0 separates the models
      xi = tempered_update(xi, cls, 0, o);
    }
    if (xi.weights[0] >= 0.99) ++ok;
  }
  CHECK(ok >= runs - 1);
}

TEST_CASE("expected log likelihood propagates impossible outcomes") {
  FiniteModelClass cls = gen_informative_arm(5, 2, 0.9, 0.25);
  Posterior xi = tempered_init_full(cls);
  Outcome o;
  o.reward = 0.1;
  o.obs = 1;
  CHECK(std::isinf(expected_log_lik(xi, cls, 0, o)));  // -inf
  Outcome fine;
  fine.reward = 0.1;
  fine.obs = 0;
  CHECK(std::isfinite(expected_log_lik(xi, cls, 0, fine)));
}

TEST_CASE("ledger prefix sums are exact") {
  FiniteModelClass cls = make_five_arm_class();
  ClassAnalysis ca(cls);
  EstimationLedger led;
  Rng rng(9);
  Posterior xi = tempered_init_full(cls);
  VectorXd p = VectorXd::Constant(5, 0.2);
  for (int t = 0; t < 50; ++t) {
    ledger_record(led, ca, xi, p, 0);
    Outcome o = model_sample(cls, 0, rng.categorical(p), rng);
  }
  double kl = 0.0, hel = 0.0;
  for (double v : led.kl_records) kl += v;
  for (double v : led.hellinger_records) hel += v;
  CHECK(led.kl_cum == doctest::Approx(kl).epsilon(1e-15));
  CHECK(led.hellinger_cum == doctest::Approx(hel).epsilon(1e-15));
}

TEST_CASE("cumulative hellinger error concentrates under the aggregation bound") {
  FiniteModelClass cls = eight_model_class(123);
  ClassAnalysis ca(cls);
  const double bound = 2.0 * std::log(8.0 / 0.05);
  const int runs = 50;
  int violations = 0;
  VectorXd p = VectorXd::Constant(3, 1.0 / 3.0);
  for (int seed = 0; seed < runs; ++seed) {
    Rng rng(derive_seed(71, seed));
    Posterior xi = tempered_init_full(cls);
    EstimationLedger led;
    for (int t = 0; t < 200; ++t) {
      ledger_record(led, ca, xi, p, 0);
      const int d = rng.categorical(p);
      Outcome o = model_sample(cls, 0, d, rng);
      xi = tempered_update(xi, cls, d, o);
    }
    if (led.hellinger_cum > bound) ++violations;
  }
  CHECK(violations <= runs / 10);
}

TEST_CASE("grid cover enumeration counts") {
  FiniteModelClass all = gen_mab_grid(2, 0.5, false);
  CHECK(all.size() == 9);
  FiniteModelClass unique = gen_mab_grid(2, 0.5, true);
  CHECK(unique.size() == 6);
  for (const auto& m : unique.models) CHECK(gaps(m).optimal_set.size() == 1);
}

TEST_CASE("linear grid covers clip to the reward range") {
  FiniteModelClass cls = gen_linear_grid(2, 4, 0.5, 99);
  CHECK(cls.decision_count == 4);
  CHECK(cls.size() == 9);  // theta grid {0,.5,1}^2
  for (const auto& m : cls.models)
    for (const auto& om : m.outcomes) {
      CHECK(om.mean >= 0.0);
      CHECK(om.mean <= 1.0);
    }
}
