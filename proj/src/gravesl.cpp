#include "allocest/gravesl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace allocest {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Dot product treating 0 * inf as 0 (unplayed decisions contribute nothing
// even when the divergence there is infinite).
double safe_dot(const VectorXd& weights, const VectorXd& divs) {
  double acc = 0.0;
  for (int i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    if (std::isinf(divs[i])) return kInf;
    acc += weights[i] * divs[i];
  }
  return acc;
}

bool disjoint(const IndexSet& a, const IndexSet& b) {
  for (int x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) return false;
  return true;
}
}  // namespace

IndexSet alt_set(const FiniteModelClass& cls, int m) {
  const GapInfo gm = gaps(cls.models[m]);
  IndexSet out;
  for (int j = 0; j < cls.size(); ++j) {
    if (j == m) continue;
    const GapInfo gj = gaps(cls.models[j]);
    if (disjoint(gm.optimal_set, gj.optimal_set)) out.push_back(j);
  }
  return out;
}

ClassAnalysis::ClassAnalysis(const FiniteModelClass& c, double eta_opt_cap) : cls(&c) {
  const int M = c.size();
  gap_info.reserve(M);
  for (int m = 0; m < M; ++m) gap_info.push_back(gaps(c.models[m]));
  alt_sets.resize(M);
  for (int m = 0; m < M; ++m) {
    for (int j = 0; j < M; ++j) {
      if (j == m) continue;
      if (disjoint(gap_info[m].optimal_set, gap_info[j].optimal_set))
        alt_sets[m].push_back(j);
    }
  }
  kl.assign(M, std::vector<VectorXd>(M));
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      VectorXd row(c.decision_count);
      for (int p = 0; p < c.decision_count; ++p)
        row[p] = (a == b) ? 0.0 : model_kl(c, a, b, p);
      kl[a][b] = std::move(row);
    }
  glc_value.resize(M);
  glc_allocation.resize(M);
  for (int m = 0; m < M; ++m) {
    GlcSolution s = glc(c, m, eta_opt_cap);
    glc_value[m] = s.value;
    glc_allocation[m] = s.allocation;
  }
}

double info(const ClassAnalysis& ca, int m, const VectorXd& eta) {
  if (ca.alt_sets[m].empty()) return kInf;
  double best = kInf;
  for (int j : ca.alt_sets[m]) best = std::min(best, safe_dot(eta, ca.kl[m][j]));
  return best;
}

GlcSolution glc(const FiniteModelClass& cls, int m, double eta_opt_cap) {
  const int P = cls.decision_count;
  const GapInfo gi = gaps(cls.models[m]);
  const IndexSet alts = alt_set(cls, m);

  GlcSolution sol;
  sol.allocation.weights = VectorXd::Zero(P);
  if (alts.empty()) {
    sol.value = 0.0;
    return sol;
  }

  LinearProgram lp;
  lp.c = gi.gap;
  lp.A = MatrixXd::Zero(static_cast<int>(alts.size()), P);
  lp.b = VectorXd::Ones(static_cast<int>(alts.size()));
  for (size_t k = 0; k < alts.size(); ++k)
    for (int p = 0; p < P; ++p) {
      double v = model_kl(cls, m, alts[k], p);
      // +inf divergences mean one pull suffices; cap to keep the LP finite.
      lp.A(static_cast<int>(k), p) = std::isinf(v) ? 1e12 : v;
    }
  lp.upper.assign(P, std::nullopt);
  for (int p : gi.optimal_set) lp.upper[p] = eta_opt_cap;

  LpSolution s = lp_solve(lp);
  if (s.status == LpStatus::infeasible) {
    // Some alternative carries no distinguishing information within the cap.
    int witness = alts[0];
    for (size_t k = 0; k < alts.size(); ++k) {
      bool all_zero = true;
      for (int p = 0; p < P; ++p)
        if (lp.A(static_cast<int>(k), p) > 1e-12 &&
            (gi.gap[p] > 0 || lp.upper[p])) { all_zero = false; }
      if (all_zero) { witness = alts[k]; break; }
    }
    throw std::runtime_error("indistinguishable alternative: model " +
                             cls.models[witness].name);
  }
  if (s.status != LpStatus::optimal)
    throw std::runtime_error("glc LP did not reach an optimum");

  sol.value = std::max(s.value, 0.0);
  sol.allocation.weights = s.x.cwiseMax(0.0);
  for (size_t k = 0; k < alts.size(); ++k) {
    const double lhs = lp.A.row(static_cast<int>(k)).dot(s.x);
    if (lhs <= 1.0 + 1e-8) sol.binding_alternatives.push_back(alts[k]);
  }
  for (int p : gi.optimal_set)
    if (s.x[p] >= eta_opt_cap - 1e-6) sol.cap_binding = true;
  return sol;
}

MembershipResult lambda_membership(const ClassAnalysis& ca, int m, const VectorXd& lambda,
                                   double eps, double n_max) {
  const double g = ca.glc_value[m];
  const double gap = ca.gap_info[m].gap.dot(lambda);
  const double I = info(ca, m, lambda);

  // Feasible n interval: n >= (1-eps)/I (information) and, when gap > 0,
  // n <= (1+eps) g / gap (budget); additionally n <= n_max and n > 0.
  double lower = 0.0;
  if (!std::isinf(I)) {
    if (I <= 0.0) {
      if (eps < 1.0) return {false, std::nullopt};
      lower = 0.0;
    } else {
      lower = (1.0 - eps) / I;
    }
  }
  double upper = n_max;
  // Tolerance absorbs allocation dust (tiny lambda mass on costly arms); a
  // residual expected gap this small never constrains the budget in practice.
  if (gap > 1e-9) {
    const double budget = (1.0 + eps) * g / gap;
    upper = std::min(upper, budget);
  }
  if (upper <= 0.0) return {false, std::nullopt};
  const double slack = 1e-9 * (1.0 + std::abs(upper) + std::abs(lower));
  if (lower > upper + slack) return {false, std::nullopt};
  const double witness = lower > 0.0 ? lower : std::min(1.0, upper);
  return {true, witness};
}

IndexSet mgl_set(const ClassAnalysis& ca, const VectorXd& lambda, double eps, double n_max) {
  IndexSet out;
  for (int m = 0; m < ca.cls->size(); ++m)
    if (lambda_membership(ca, m, lambda, eps, n_max).member) out.push_back(m);
  return out;
}

double info_content(const ClassAnalysis& ca, int m, double eps) {
  const auto& alts = ca.alt_sets[m];
  if (alts.empty()) return 0.0;
  const int P = ca.cls->decision_count;
  const GapInfo& gi = ca.gap_info[m];
  const double g = ca.glc_value[m];

  double best = 0.0;
  for (int j : alts) {
    double B = 0.0;  // divergence available at the optimal decisions
    for (int p : gi.optimal_set) B += ca.kl[m][j][p];
    // Infinite divergence at the optimal decision: a single pull suffices, so
    // this alternative never forces a budget (contributes 0), same as B = 0.
    if (B <= 1e-15 || std::isinf(B)) continue;
    // Worst allocation: minimize the off-optimal divergence paid against j,
    // over eta meeting the budget and all information constraints.
    LinearProgram lp;
    lp.c = VectorXd::Zero(P);
    for (int p = 0; p < P; ++p) {
      const double v = ca.kl[m][j][p];
      lp.c[p] = std::isinf(v) ? 1e12 : v;
    }
    for (int p : gi.optimal_set) lp.c[p] = 0.0;  // only off-optimal terms count
    const int rows = 1 + static_cast<int>(alts.size());
    lp.A = MatrixXd::Zero(rows, P);
    lp.b = VectorXd::Zero(rows);
    // Budget: sum eta gap <= (1+eps) g  ->  -sum eta gap >= -(1+eps) g
    lp.A.row(0) = -gi.gap.transpose();
    lp.b[0] = -(1.0 + eps) * g;
    for (size_t k = 0; k < alts.size(); ++k) {
      for (int p = 0; p < P; ++p) {
        double v = ca.kl[m][alts[k]][p];
        lp.A(1 + static_cast<int>(k), p) = std::isinf(v) ? 1e12 : v;
      }
      lp.b[1 + static_cast<int>(k)] = 1.0 - eps;
    }
    LpSolution s = lp_solve(lp);
    if (s.status == LpStatus::infeasible) continue;  // vacuous for this alternative
    if (s.status != LpStatus::optimal)
      throw std::runtime_error("info_content LP did not reach an optimum");
    const double n = ((1.0 - 2.0 * eps) - s.value) / B;
    best = std::max(best, n);
  }
  return best;
}

NmaxResult n_max(const ClassAnalysis& ca, double eps, double constant) {
  NmaxResult r;
  r.delta_min = kInf;
  for (const auto& gi : ca.gap_info) {
    if (gi.optimal_set.size() > 1 || gi.min_gap <= 0.0)
      throw std::runtime_error("uniform regularity violated: a model lacks a unique optimum");
    r.delta_min = std::min(r.delta_min, gi.min_gap);
  }
  for (int m = 0; m < ca.cls->size(); ++m)
    r.n_class = std::max(r.n_class, info_content(ca, m, eps));
  for (double g : ca.glc_value) r.max_glc = std::max(r.max_glc, g);
  const double v = ca.cls->regularity.v_m;
  r.value = constant / (r.delta_min * r.delta_min) * (1.0 / eps + v * r.n_class) * r.max_glc;
  return r;
}

NormalizedAllocation normalized_glc_allocation(const ClassAnalysis& ca, int m, double eps) {
  VectorXd eta = ca.glc_allocation[m].weights;
  const double nm = info_content(ca, m, eps);
  for (int p : ca.gap_info[m].optimal_set) eta[p] = nm / ca.gap_info[m].optimal_set.size();
  double total = eta.sum();
  NormalizedAllocation out;
  if (total <= 0.0) {
    // Degenerate: no information needed anywhere; fall back to the optimal set.
    out.probs = VectorXd::Zero(eta.size());
    for (int p : ca.gap_info[m].optimal_set)
      out.probs[p] = 1.0 / ca.gap_info[m].optimal_set.size();
    out.norm_factor = std::nullopt;
    return out;
  }
  out.probs = eta / total;
  out.norm_factor = total;
  return out;
}

}  // namespace allocest
