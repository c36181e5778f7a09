#include <doctest.h>

#include <cmath>
#include <limits>

#include "allocest/generators.hpp"
#include "allocest/models.hpp"
#include "allocest/rng.hpp"

using namespace allocest;

namespace {
OutcomeModel gauss(double mean, double var = 1.0) {
  OutcomeModel om;
  om.mean = mean;
  om.variance = var;
  om.obs = Eigen::VectorXd::Ones(1);
  return om;
}

OutcomeModel categorical(std::initializer_list<double> probs, double mean = 0.0) {
  OutcomeModel om;
  om.mean = mean;
  om.obs = Eigen::VectorXd(static_cast<int>(probs.size()));
  int i = 0;
  for (double p : probs) om.obs[i++] = p;
  return om;
}
}  // namespace

TEST_CASE("gaussian kl closed form") {
  CHECK(kl_divergence(gauss(0.2), gauss(0.6)) == doctest::Approx(0.08).epsilon(1e-12));
  CHECK(kl_divergence(gauss(0.5), gauss(0.5)) == doctest::Approx(0.0));
  // Variance enters through the first argument only (shared-variance class).
  CHECK(kl_divergence(gauss(0.0, 0.25), gauss(1.0, 0.25)) == doctest::Approx(2.0));
}

TEST_CASE("categorical kl and support violations") {
  const double v = kl_divergence(categorical({0.9, 0.1}), categorical({0.1, 0.9}));
  CHECK(v == doctest::Approx(0.8 * std::log(9.0)).epsilon(1e-12));
  CHECK(std::isinf(kl_divergence(categorical({0.5, 0.5}), categorical({1.0, 0.0}))));
  // Zero mass in the first argument skips the term.
  CHECK(kl_divergence(categorical({1.0, 0.0}), categorical({0.5, 0.5})) ==
        doctest::Approx(std::log(2.0)));
}

TEST_CASE("hellinger closed forms") {
  const double h = hellinger_sq(gauss(0.2), gauss(0.6));
  CHECK(h == doctest::Approx(2.0 * (1.0 - std::exp(-0.02))).epsilon(1e-12));
  // Disjoint categorical supports: maximal distance 2.
  CHECK(hellinger_sq(categorical({1.0, 0.0}), categorical({0.0, 1.0})) == doctest::Approx(2.0));
  CHECK(hellinger_sq(gauss(0.3), gauss(0.3)) == doctest::Approx(0.0));
}

TEST_CASE("kl dominates squared hellinger") {
  Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    OutcomeModel a = gauss(rng.uniform(), 0.5 + rng.uniform());
    OutcomeModel b = gauss(rng.uniform(), a.variance);
    double p = 0.05 + 0.9 * rng.uniform();
    double q = 0.05 + 0.9 * rng.uniform();
    a.obs = Eigen::Vector2d(p, 1.0 - p);
    b.obs = Eigen::Vector2d(q, 1.0 - q);
    const double kl = kl_divergence(a, b);
    const double h2 = hellinger_sq(a, b);
    CHECK(kl >= h2 - 1e-12);
  }
}

TEST_CASE("reward-uninformative decisions drop the gaussian part") {
  OutcomeModel a = categorical({0.9, 0.1}, 0.0);
  OutcomeModel b = categorical({0.9, 0.1}, 0.0);
  a.reward_uninformative = b.reward_uninformative = true;
  a.mean = 0.0;
  b.mean = 0.9;  // would contribute if the flag were ignored
  CHECK(kl_divergence(a, b) == doctest::Approx(0.0));
  CHECK(hellinger_sq(a, b) == doctest::Approx(0.0));
  Outcome o;
  o.reward = 0.0;
  o.obs = 0;
  CHECK(log_likelihood(a, o) == doctest::Approx(std::log(0.9)));
}

TEST_CASE("log likelihood at the mean") {
  Outcome o;
  o.reward = 0.3;
  o.obs = 0;
  CHECK(log_likelihood(gauss(0.3), o) ==
        doctest::Approx(-0.5 * std::log(2.0 * 3.14159265358979323846)).epsilon(1e-12));
  OutcomeModel zero = categorical({0.0, 1.0});
  o.obs = 0;
  CHECK(std::isinf(log_likelihood(zero, o)));
}

TEST_CASE("gap computation with ties") {
  FiniteModel m;
  m.name = "t";
  for (double mean : {0.5, 0.5, 0.2}) m.outcomes.push_back(gauss(mean));
  GapInfo gi = gaps(m);
  CHECK(gi.optimal_set == IndexSet{0, 1});
  CHECK(gi.gap[2] == doctest::Approx(0.3));
  CHECK(gi.min_gap == 0.0);  // non-unique optimum

  FiniteModel u;
  u.name = "u";
  for (double mean : {0.6, 0.4, 0.1}) u.outcomes.push_back(gauss(mean));
  GapInfo gu = gaps(u);
  CHECK(gu.optimal_set == IndexSet{0});
  CHECK(gu.min_gap == doctest::Approx(0.2));
}

TEST_CASE("sampling matches the law") {
  Rng rng(7);
  OutcomeModel om = categorical({0.3, 0.7}, 0.4);
  om.mean = 0.4;
  const int n = 20000;
  double mean = 0.0;
  int ones = 0;
  for (int i = 0; i < n; ++i) {
    Outcome o = sample(om, rng);
    mean += o.reward;
    ones += o.obs == 1;
  }
  mean /= n;
  CHECK(mean == doctest::Approx(0.4).epsilon(0.05));
  CHECK(static_cast<double>(ones) / n == doctest::Approx(0.7).epsilon(0.05));
}

TEST_CASE("regularity constants") {
  RegularityParams p;
  p.sigma = 1.0;
  p.A = 5;
  RegularityConstants g = regularity_constants(ClassKind::gaussian_bandit, p);
  CHECK(g.v_m == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(g.d_cov == doctest::Approx(5.0));

  p.beta = 0.9;
  RegularityConstants ia = regularity_constants(ClassKind::informative_arm, p);
  CHECK(ia.v_m == doctest::Approx(std::max(2.0, std::log(5.0 / 0.1))));

  p.H = 2;
  p.p_min = 0.1;
  p.S = 2;
  RegularityConstants tb = regularity_constants(ClassKind::tabular, p);
  CHECK(tb.l_kl == doctest::Approx(2.0 * (4.0 + std::log(10.0))));
  CHECK(tb.d_cov == doctest::Approx(2.0 * 2.0 * 5.0 * 2.0));
  CHECK(tb.c_cov == doctest::Approx(20.0));
}

TEST_CASE("class validation names the offender") {
  FiniteModelClass cls = make_two_model_class();
  CHECK_NOTHROW(validate_class(cls));
  cls.models[1].outcomes[0].obs = Eigen::Vector2d(0.5, 0.6);
  cls.models[1].outcomes[0].obs.resize(1);
  cls.models[1].outcomes[0].obs[0] = 1.1;
  CHECK_THROWS_WITH_AS(validate_class(cls), doctest::Contains("model M1 arm 0"),
                       std::runtime_error);
}
