#include "allocest/optimize.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace allocest {

namespace {
constexpr double kTol = 1e-9;

struct Tableau {
  // Equality system E z = d, d >= 0, with basis maintained in canonical form.
  MatrixXd E;
  VectorXd d;
  std::vector<int> basis;       // basis variable per row
  std::vector<bool> artificial; // per variable

  int rows() const { return static_cast<int>(E.rows()); }
  int cols() const { return static_cast<int>(E.cols()); }

  void pivot(int row, int col) {
    const double piv = E(row, col);
    E.row(row) /= piv;
    d[row] /= piv;
    for (int r = 0; r < rows(); ++r) {
      if (r == row) continue;
      const double f = E(r, col);
      if (f == 0.0) continue;
      E.row(r) -= f * E.row(row);
      d[r] -= f * d[row];
    }
    basis[row] = col;
  }

  // Bland's-rule simplex on objective vector obj (minimize). Returns false if
  // unbounded. allow(j) gates entering candidates.
  template <typename Allow>
  bool run(const VectorXd& obj, Allow allow, long max_iters) {
    for (long it = 0; it < max_iters; ++it) {
      // Reduced costs via current basis: r = obj - y^T E with y from basic costs.
      VectorXd y = VectorXd::Zero(rows());
      for (int r = 0; r < rows(); ++r) y[r] = obj[basis[r]];
      // Since E is in canonical form, reduced cost of column j is
      // obj_j - sum_r y_r * E(r,j).
      int enter = -1;
      for (int j = 0; j < cols(); ++j) {
        if (!allow(j)) continue;
        double rc = obj[j];
        for (int r = 0; r < rows(); ++r) rc -= y[r] * E(r, j);
        if (rc < -kTol) {
          enter = j;
          break;  // Bland: smallest index
        }
      }
      if (enter < 0) return true;  // optimal
      int leave = -1;
      double best_ratio = 0.0;
      for (int r = 0; r < rows(); ++r) {
        if (E(r, enter) > kTol) {
          const double ratio = d[r] / E(r, enter);
          if (leave < 0 || ratio < best_ratio - kTol ||
              (ratio < best_ratio + kTol && basis[r] < basis[leave])) {
            leave = r;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0) return false;  // unbounded
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex iteration limit exceeded");
  }
};
}  // namespace

LpSolution lp_solve(const LinearProgram& lp) {
  const int n = static_cast<int>(lp.c.size());
  const int m_orig = static_cast<int>(lp.A.rows());
  if (m_orig > 0 && lp.A.cols() != n)
    throw std::invalid_argument("LP dimension mismatch");
  if (!lp.c.allFinite() || (m_orig > 0 && !(lp.A.allFinite() && lp.b.allFinite())))
    throw std::invalid_argument("LP entries must be finite");

  // Append upper bounds as rows -x_i >= -u_i.
  std::vector<std::pair<int, double>> ubs;
  if (!lp.upper.empty()) {
    for (int i = 0; i < n; ++i)
      if (lp.upper[i]) ubs.push_back({i, *lp.upper[i]});
  }
  const int m = m_orig + static_cast<int>(ubs.size());

  if (m == 0) {
    // No constraints: minimum at x = 0 unless some cost is negative.
    for (int j = 0; j < n; ++j)
      if (lp.c[j] < -kTol) return {LpStatus::unbounded, 0.0, VectorXd(), VectorXd()};
    LpSolution sol;
    sol.x = VectorXd::Zero(n);
    sol.value = 0.0;
    sol.dual = VectorXd();
    return sol;
  }

  MatrixXd A(m, n);
  VectorXd b(m);
  if (m_orig > 0) {
    A.topRows(m_orig) = lp.A;
    b.head(m_orig) = lp.b;
  }
  for (size_t k = 0; k < ubs.size(); ++k) {
    A.row(m_orig + static_cast<int>(k)).setZero();
    A(m_orig + static_cast<int>(k), ubs[k].first) = -1.0;
    b[m_orig + static_cast<int>(k)] = -ubs[k].second;
  }

  // Equality form: rows with b<0 are negated (slack +1, no artificial);
  // rows with b>=0 keep a surplus (-1) and get an artificial.
  std::vector<bool> negated(m);
  std::vector<int> art_of_row(m, -1);
  int n_art = 0;
  for (int i = 0; i < m; ++i) {
    negated[i] = b[i] < 0.0;
    if (!negated[i]) art_of_row[i] = n_art++;
  }
  const int N = n + m + n_art;
  Tableau t;
  t.E = MatrixXd::Zero(m, N);
  t.d = VectorXd(m);
  t.basis.resize(m);
  t.artificial.assign(N, false);
  for (int i = 0; i < m; ++i) {
    const double sign = negated[i] ? -1.0 : 1.0;
    t.E.row(i).head(n) = sign * A.row(i);
    t.d[i] = sign * b[i];
    t.E(i, n + i) = negated[i] ? 1.0 : -1.0;  // slack / surplus
    if (negated[i]) {
      t.basis[i] = n + i;
    } else {
      const int art = n + m + art_of_row[i];
      t.E(i, art) = 1.0;
      t.artificial[art] = true;
      t.basis[i] = art;
    }
  }

  const long max_iters = 20000L + 200L * static_cast<long>(N) * m;

  // Phase 1.
  if (n_art > 0) {
    VectorXd obj1 = VectorXd::Zero(N);
    for (int j = 0; j < N; ++j)
      if (t.artificial[j]) obj1[j] = 1.0;
    if (!t.run(obj1, [](int) { return true; }, max_iters))
      throw std::runtime_error("phase-1 LP unbounded (internal error)");
    double art_sum = 0.0;
    for (int r = 0; r < t.rows(); ++r)
      if (t.artificial[t.basis[r]]) art_sum += t.d[r];
    if (art_sum > 1e-7) return {LpStatus::infeasible, 0.0, VectorXd(), VectorXd()};
    // Drive remaining artificials out of the basis where possible.
    for (int r = 0; r < t.rows(); ++r) {
      if (!t.artificial[t.basis[r]]) continue;
      for (int j = 0; j < n + m; ++j) {
        if (std::abs(t.E(r, j)) > 1e-7) {
          t.pivot(r, j);
          break;
        }
      }
    }
  }

  // Phase 2.
  VectorXd obj2 = VectorXd::Zero(N);
  obj2.head(n) = lp.c;
  const auto& art = t.artificial;
  const auto& basis = t.basis;
  auto allow = [&art](int j) { return !art[j]; };
  if (!t.run(obj2, allow, max_iters)) return {LpStatus::unbounded, 0.0, VectorXd(), VectorXd()};

  LpSolution sol;
  sol.x = VectorXd::Zero(n);
  for (int r = 0; r < t.rows(); ++r)
    if (basis[r] < n) sol.x[basis[r]] = t.d[r];
  sol.value = lp.c.dot(sol.x);

  // Duals: solve B^T y = c_B from the original equality system columns.
  MatrixXd B(m, m);
  VectorXd cb(m);
  for (int r = 0; r < m; ++r) {
    const int j = basis[r];
    VectorXd col = VectorXd::Zero(m);
    if (j < n) {
      for (int i = 0; i < m; ++i) col[i] = (negated[i] ? -1.0 : 1.0) * A(i, j);
    } else if (j < n + m) {
      col[j - n] = negated[j - n] ? 1.0 : -1.0;
    } else {
      // Artificial still basic (at zero) on a redundant row: identity column.
      for (int i = 0; i < m; ++i)
        if (art_of_row[i] == j - (n + m)) col[i] = 1.0;
    }
    B.col(r) = col;
    cb[r] = j < n ? lp.c[j] : 0.0;
  }
  VectorXd y = B.transpose().colPivHouseholderQr().solve(cb);
  VectorXd mu(m);
  for (int i = 0; i < m; ++i) mu[i] = negated[i] ? -y[i] : y[i];
  double dual_obj = 0.0;
  for (int i = 0; i < m; ++i) dual_obj += mu[i] * b[i];
  // Upper-bound rows contribute to the dual objective but are internal; return
  // only the caller-visible multipliers.
  sol.dual = mu.head(m_orig);
#ifndef NDEBUG
  assert(std::abs(dual_obj - sol.value) <= 1e-8 * (1.0 + std::abs(sol.value)) &&
         "LP strong duality violated");
#endif
  (void)dual_obj;
  return sol;
}

GameSolution solve_game(const MatrixXd& payoff) {
  const int R = static_cast<int>(payoff.rows());
  const int C = static_cast<int>(payoff.cols());
  if (R == 0 || C == 0) throw std::invalid_argument("empty game matrix");
  const double shift = 1.0 - payoff.minCoeff();
  MatrixXd G = payoff.array() + shift;  // all entries >= 1

  // min sum(u) s.t. G^T u >= 1, u >= 0; shifted value = 1/sum(u).
  LinearProgram lp;
  lp.c = VectorXd::Ones(R);
  lp.A = G.transpose();
  lp.b = VectorXd::Ones(C);
  LpSolution s = lp_solve(lp);
  if (s.status != LpStatus::optimal)
    throw std::runtime_error("game LP failed to solve");
  const double total = s.x.sum();
  if (total <= 0.0) throw std::runtime_error("degenerate game LP solution");
  GameSolution g;
  g.value = 1.0 / total - shift;
  g.row_strategy = s.x / total;
  double dual_total = s.dual.sum();
  if (dual_total <= kTol) {
    g.col_strategy = VectorXd::Constant(C, 1.0 / C);
  } else {
    g.col_strategy = (s.dual / dual_total).cwiseMax(0.0);
    g.col_strategy /= g.col_strategy.sum();
  }
  return g;
}

}  // namespace allocest
