#include <doctest.h>

#include <cmath>

#include "allocest/optimize.hpp"
#include "allocest/rng.hpp"

using namespace allocest;

TEST_CASE("lp with two binding constraints") {
  LinearProgram lp;
  lp.c = Eigen::Vector2d(1.0, 1.0);
  lp.A = Eigen::MatrixXd(2, 2);
  lp.A << 1.0, 2.0, 2.0, 1.0;
  lp.b = Eigen::Vector2d(2.0, 2.0);
  LpSolution s = lp_solve(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.value == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  CHECK(s.x[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(s.x[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  // Strong duality: b . y = value, y >= 0.
  CHECK(s.dual.dot(lp.b) == doctest::Approx(s.value).epsilon(1e-8));
  CHECK(s.dual.minCoeff() >= -1e-9);
}

TEST_CASE("upper bounds") {
  LinearProgram lp;
  lp.c = VectorXd::Constant(1, -1.0);
  lp.A = MatrixXd::Ones(1, 1);
  lp.b = VectorXd::Zero(1);
  lp.upper = {5.0};
  LpSolution s = lp_solve(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.value == doctest::Approx(-5.0));
  CHECK(s.x[0] == doctest::Approx(5.0));
}

TEST_CASE("infeasible and unbounded detection") {
  LinearProgram bad;
  bad.c = VectorXd::Ones(1);
  bad.A = MatrixXd(2, 1);
  bad.A << 1.0, -1.0;
  bad.b = Eigen::Vector2d(2.0, -1.0);  // x >= 2 and x <= 1
  CHECK(lp_solve(bad).status == LpStatus::infeasible);

  LinearProgram unb;
  unb.c = VectorXd::Constant(1, -1.0);
  unb.A = MatrixXd::Ones(1, 1);
  unb.b = VectorXd::Zero(1);
  CHECK(lp_solve(unb).status == LpStatus::unbounded);
}

TEST_CASE("degenerate rhs") {
  // Redundant row duplicated; simplex must still terminate (Bland's rule).
  LinearProgram lp;
  lp.c = Eigen::Vector2d(1.0, 2.0);
  lp.A = MatrixXd(3, 2);
  lp.A << 1.0, 1.0, 1.0, 1.0, 1.0, 0.0;
  lp.b = Eigen::Vector3d(1.0, 1.0, 0.0);
  LpSolution s = lp_solve(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("diagonal game closed form") {
  MatrixXd g(2, 2);
  g << 0.08, 0.0, 0.0, 0.18;
  GameSolution s = solve_game(g);
  CHECK(s.value == doctest::Approx(0.08 * 0.18 / 0.26).epsilon(1e-9));
  CHECK(s.row_strategy[0] == doctest::Approx(0.18 / 0.26).epsilon(1e-8));
  CHECK(s.row_strategy[1] == doctest::Approx(0.08 / 0.26).epsilon(1e-8));
}

TEST_CASE("matching pennies") {
  MatrixXd g(2, 2);
  g << 1.0, -1.0, -1.0, 1.0;
  GameSolution s = solve_game(g);
  CHECK(s.value == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(s.row_strategy[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(s.col_strategy[0] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("game value duality on random matrices") {
  Rng rng(123);
  for (int it = 0; it < 30; ++it) {
    const int r = 2 + static_cast<int>(rng.uniform() * 3);
    const int c = 2 + static_cast<int>(rng.uniform() * 3);
    MatrixXd g(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) g(i, j) = 2.0 * rng.uniform() - 1.0;
    GameSolution s = solve_game(g);
    // Swapping roles negates the value.
    GameSolution t = solve_game((-g.transpose()).eval());
    CHECK(s.value == doctest::Approx(-t.value).epsilon(1e-7));
    // The returned strategies certify the value from both sides.
    VectorXd col_payoff = g.transpose() * s.row_strategy;
    CHECK(col_payoff.minCoeff() >= s.value - 1e-7);
    VectorXd row_payoff = g * s.col_strategy;
    CHECK(row_payoff.maxCoeff() <= s.value + 1e-7);
  }
}

TEST_CASE("solver determinism") {
  MatrixXd g(3, 3);
  g << 0.2, 0.5, 0.1, 0.4, 0.3, 0.6, 0.9, 0.1, 0.2;
  GameSolution a = solve_game(g);
  GameSolution b = solve_game(g);
  CHECK(a.value == b.value);
  CHECK((a.row_strategy - b.row_strategy).cwiseAbs().maxCoeff() == 0.0);
}
