#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace allocest {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// min c.x  s.t.  A x >= b,  0 <= x <= upper (upper optional per variable).
struct LinearProgram {
  VectorXd c;
  MatrixXd A;
  VectorXd b;
  std::vector<std::optional<double>> upper;  // empty = no bounds
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::optimal;
  double value = 0.0;
  VectorXd x;
  VectorXd dual;  // one multiplier per row of A (>= rows; >= 0)
};

// Dense two-phase simplex with Bland's rule. Throws std::runtime_error on
// numerical failure; never silently returns a wrong answer.
LpSolution lp_solve(const LinearProgram& lp);

// Zero-sum matrix game: rows = maximizer strategies, columns = minimizer
// strategies; value = max_row min_col of the mixed-strategy payoff.
struct GameSolution {
  double value = 0.0;
  VectorXd row_strategy;
  VectorXd col_strategy;
};

GameSolution solve_game(const MatrixXd& payoff);

}  // namespace allocest
