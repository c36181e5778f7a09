#include "allocest/aec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace allocest {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kKlCap = 1e12;  // stand-in for infinite divergences inside LPs

double capped(double v) { return std::isinf(v) ? kKlCap : v; }

double ref_mass(const ReferencePoint& ref, const IndexSet& subset) {
  if (const int* idx = std::get_if<int>(&ref.ref)) {
    return std::find(subset.begin(), subset.end(), *idx) != subset.end() ? 1.0 : 0.0;
  }
  if (const VectorXd* xi = std::get_if<VectorXd>(&ref.ref)) {
    double m = 0.0;
    for (int i : subset) m += (*xi)[i];
    return m;
  }
  return 0.0;
}
}  // namespace

VectorXd divergence_row(const ClassAnalysis& ca, const ReferencePoint& ref, int m) {
  const FiniteModelClass& cls = *ca.cls;
  const int P = cls.decision_count;
  VectorXd row = VectorXd::Zero(P);
  if (const int* idx = std::get_if<int>(&ref.ref)) {
    row = ca.kl[*idx][m];
  } else if (const VectorXd* xi = std::get_if<VectorXd>(&ref.ref)) {
    for (int j = 0; j < cls.size(); ++j) {
      const double w = (*xi)[j];
      if (w <= 0.0) continue;
      for (int p = 0; p < P; ++p) {
        const double v = ca.kl[j][m][p];
        row[p] = std::isinf(row[p]) || std::isinf(v) ? kInf : row[p] + w * v;
      }
    }
  } else {
    const FiniteModel& ext = std::get<FiniteModel>(ref.ref);
    if (cls.mdp)
      throw std::invalid_argument("external reference models are not supported for MDP classes");
    for (int p = 0; p < P; ++p)
      row[p] = kl_divergence(ext.outcomes[p], cls.models[m].outcomes[p]);
  }
  return row;
}

FixedLambdaResult aec_fixed_lambda(const ClassAnalysis& ca, const IndexSet& scope,
                                   const ReferencePoint& ref, const VectorXd& lambda,
                                   double eps, double n_max) {
  FixedLambdaResult out;
  for (int m : scope)
    if (!lambda_membership(ca, m, lambda, eps, n_max).member) out.excluded.push_back(m);
  const int P = ca.cls->decision_count;
  if (out.excluded.empty()) {
    out.value = 0.0;
    out.omega = VectorXd::Constant(P, 1.0 / P);
    return out;
  }
  MatrixXd G(P, static_cast<int>(out.excluded.size()));
  for (size_t k = 0; k < out.excluded.size(); ++k) {
    VectorXd row = divergence_row(ca, ref, out.excluded[k]);
    for (int p = 0; p < P; ++p) G(p, static_cast<int>(k)) = capped(row[p]);
  }
  GameSolution g = solve_game(G);
  out.omega = g.row_strategy;
  out.value = g.value <= 1e-12 ? kInf : 1.0 / g.value;
  return out;
}

std::optional<VectorXd> subset_feasible_lambda(const ClassAnalysis& ca, const IndexSet& subset,
                                               double eps, double n_max) {
  const int P = ca.cls->decision_count;
  // Variables: lambda (P) then one information proxy t_m per subset member
  // with a nonempty alternative set.
  std::vector<int> t_owner;
  for (int m : subset)
    if (!ca.alt_sets[m].empty()) t_owner.push_back(m);
  const int T = static_cast<int>(t_owner.size());
  const int n_vars = P + T;

  std::vector<VectorXd> rows;
  std::vector<double> rhs;
  auto add_row = [&](const VectorXd& r, double b) {
    rows.push_back(r);
    rhs.push_back(b);
  };

  // Simplex constraint as a pair of inequalities.
  VectorXd ones = VectorXd::Zero(n_vars);
  ones.head(P).setOnes();
  add_row(ones, 1.0);
  add_row(-ones, -1.0);

  const double t_floor = std::max(std::isinf(n_max) ? 0.0 : (1.0 - eps) / n_max, 1e-12);
  for (int m : subset) {
    const GapInfo& gi = ca.gap_info[m];
    const double g = ca.glc_value[m];
    const auto it = std::find(t_owner.begin(), t_owner.end(), m);
    if (it == t_owner.end()) {
      // Empty alternative set (g = 0): membership needs zero expected gap.
      VectorXd r = VectorXd::Zero(n_vars);
      r.head(P) = -gi.gap;
      add_row(r, 0.0);
      continue;
    }
    const int t_idx = P + static_cast<int>(it - t_owner.begin());
    // Budget: (1+eps) g t_m - (1-eps) sum lambda gap >= 0.
    VectorXd r = VectorXd::Zero(n_vars);
    r.head(P) = -(1.0 - eps) * gi.gap;
    r[t_idx] = (1.0 + eps) * g;
    add_row(r, 0.0);
    // Information: t_m <= sum lambda KL(m || j) for every alternative j.
    for (int j : ca.alt_sets[m]) {
      VectorXd ri = VectorXd::Zero(n_vars);
      for (int p = 0; p < P; ++p) ri[p] = capped(ca.kl[m][j][p]);
      ri[t_idx] = -1.0;
      add_row(ri, 0.0);
    }
    // Normalization-factor clause: t_m >= (1-eps)/n_max (and strictly positive).
    VectorXd rf = VectorXd::Zero(n_vars);
    rf[t_idx] = 1.0;
    add_row(rf, t_floor);
  }

  LinearProgram lp;
  lp.c = VectorXd::Zero(n_vars);
  for (int k = 0; k < T; ++k) lp.c[P + k] = -1.0;  // push t up for an interior witness
  lp.A = MatrixXd(static_cast<int>(rows.size()), n_vars);
  lp.b = VectorXd(static_cast<int>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    lp.A.row(static_cast<int>(i)) = rows[i];
    lp.b[static_cast<int>(i)] = rhs[i];
  }
  LpSolution s = lp_solve(lp);
  if (s.status != LpStatus::optimal) return std::nullopt;
  VectorXd lambda = s.x.head(P).cwiseMax(0.0);
  // Basic-variable residue from the simplex solve (~1e-16) would otherwise
  // leak expected gap onto arms the witness never plays.
  const double dust = 1e-12 * lambda.maxCoeff();
  for (int p = 0; p < P; ++p)
    if (lambda[p] <= dust) lambda[p] = 0.0;
  const double total = lambda.sum();
  if (total <= 0.0) return std::nullopt;
  lambda /= total;
  return lambda;
}

std::vector<AecSubsetCandidate> aec_maximal_subsets(const ClassAnalysis& ca,
                                                    const IndexSet& scope, double eps,
                                                    double n_max) {
  const int n = static_cast<int>(scope.size());
  if (n > 16) throw std::runtime_error(
      "exact subset enumeration limited to 16 models in scope; use the heuristic mode");
  std::vector<unsigned> masks;
  masks.reserve(1u << n);
  for (unsigned m = 0; m < (1u << n); ++m) masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) {
    return std::popcount(a) > std::popcount(b);
  });
  std::vector<unsigned> feasible_masks;
  std::vector<AecSubsetCandidate> out;
  for (unsigned mask : masks) {
    bool dominated = false;
    for (unsigned f : feasible_masks)
      if ((mask & f) == mask) { dominated = true; break; }
    if (dominated) continue;
    IndexSet subset;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) subset.push_back(scope[i]);
    std::optional<VectorXd> lambda = subset_feasible_lambda(ca, subset, eps, n_max);
    if (!lambda) continue;
    feasible_masks.push_back(mask);
    out.push_back({std::move(subset), std::move(*lambda)});
  }
  return out;
}

namespace {
struct LambdaPicker {
  const ClassAnalysis& ca;
  const IndexSet& scope;
  const ReferencePoint& ref;
  double eps, n_max;
  AecSolution best;
  bool found = false;
  double best_mass = -1.0;

  LambdaPicker(const ClassAnalysis& c, const IndexSet& s, const ReferencePoint& r, double e,
               double n, AecMode mode)
      : ca(c), scope(s), ref(r), eps(e), n_max(n) {
    best.mode = mode;
    best.value = kInf;
  }

  void consider(const VectorXd& lambda) {
    FixedLambdaResult r = aec_fixed_lambda(ca, scope, ref, lambda, eps, n_max);
    IndexSet member;
    for (int m : scope)
      if (std::find(r.excluded.begin(), r.excluded.end(), m) == r.excluded.end())
        member.push_back(m);
    const double mass = ref_mass(ref, member);
    const bool better =
        !found || r.value < best.value - 1e-12 ||
        (r.value < best.value + 1e-12 && mass > best_mass + 1e-15);
    if (better) {
      found = true;
      best.value = r.value;
      best.lambda.probs = lambda;
      best.lambda.norm_factor = std::nullopt;
      best.omega = r.omega;
      best.excluded_models = r.excluded;
      best_mass = mass;
    }
  }
};
}  // namespace

AecSolution aec_solve_from_candidates(const ClassAnalysis& ca, const IndexSet& scope,
                                      const ReferencePoint& ref, double eps, double n_max,
                                      const std::vector<AecSubsetCandidate>& candidates) {
  LambdaPicker picker(ca, scope, ref, eps, n_max, AecMode::exact_subset);
  for (const auto& cand : candidates) picker.consider(cand.lambda);
  if (!picker.found) {
    // No nonempty pattern feasible: fall back to a uniform lambda.
    picker.consider(VectorXd::Constant(ca.cls->decision_count, 1.0 / ca.cls->decision_count));
  }
  return picker.best;
}

AecSolution aec_solve(const ClassAnalysis& ca, const IndexSet& scope,
                      const ReferencePoint& ref, double eps, double n_max, AecMode mode,
                      const std::vector<VectorXd>& extra_candidates) {
  const int P = ca.cls->decision_count;
  if (mode == AecMode::exact_subset)
    return aec_solve_from_candidates(ca, scope, ref, eps, n_max,
                                     aec_maximal_subsets(ca, scope, eps, n_max));
  LambdaPicker picker(ca, scope, ref, eps, n_max, AecMode::candidate_heuristic);
  for (int m : scope) picker.consider(normalized_glc_allocation(ca, m, eps).probs);
  for (int p = 0; p < P; ++p) {
    VectorXd delta = VectorXd::Zero(P);
    delta[p] = 1.0;
    picker.consider(delta);
  }
  picker.consider(VectorXd::Constant(P, 1.0 / P));
  for (const auto& extra : extra_candidates) picker.consider(extra);
  return picker.best;
}

IndexSet m_opt_set(const ClassAnalysis& ca, const IndexSet& scope, int ref_model) {
  const IndexSet& ref_opt = ca.gap_info[ref_model].optimal_set;
  IndexSet out;
  for (int m : scope) {
    const IndexSet& opt = ca.gap_info[m].optimal_set;
    bool subset = std::all_of(opt.begin(), opt.end(), [&](int p) {
      return std::find(ref_opt.begin(), ref_opt.end(), p) != ref_opt.end();
    });
    if (!subset) continue;
    bool indist = true;
    for (int p : ref_opt)
      if (ca.kl[ref_model][m][p] > 1e-12) { indist = false; break; }
    if (indist) out.push_back(m);
  }
  return out;
}

namespace {
// Minimum over separated pairs of the best single-sided detection rate under p.
double cexp_score(const ClassAnalysis& ca, const VectorXd& xi, double eps, const VectorXd& p,
                  int* argmin_a = nullptr, int* argmin_b = nullptr) {
  const int M = ca.cls->size();
  double worst = kInf;
  for (int a = 0; a < M; ++a) {
    for (int b = 0; b < M; ++b) {
      if (a == b) continue;
      double sup_kl = 0.0;
      for (int q = 0; q < ca.cls->decision_count; ++q)
        sup_kl = std::max(sup_kl, capped(ca.kl[a][b][q]));
      if (sup_kl <= eps) continue;  // not a violating pair
      double rate = 0.0;
      for (int target : {a, b}) {
        double r = 0.0;
        for (int j = 0; j < M; ++j) {
          if (xi[j] <= 0.0) continue;
          for (int q = 0; q < ca.cls->decision_count; ++q)
            if (p[q] > 0.0) r += xi[j] * p[q] * capped(ca.kl[j][target][q]);
        }
        rate = std::max(rate, r);
      }
      if (rate < worst) {
        worst = rate;
        if (argmin_a) *argmin_a = a;
        if (argmin_b) *argmin_b = b;
      }
    }
  }
  return worst;  // +inf when there are no violating pairs
}
}  // namespace

bool c_exp_certificate(const ClassAnalysis& ca, const VectorXd& xi, double eps, double c,
                       const VectorXd& p) {
  if (std::isinf(c)) return false;
  const double score = cexp_score(ca, xi, eps, p);
  if (std::isinf(score)) return true;  // no violating pairs: any C works
  return score >= 1.0 / c - 1e-12;
}

CexpResult c_exp_heuristic(const ClassAnalysis& ca, const VectorXd& xi, double eps) {
  const int P = ca.cls->decision_count;
  VectorXd p = VectorXd::Constant(P, 1.0 / P);
  double score = cexp_score(ca, xi, eps, p);
  if (std::isinf(score)) return {1.0, p, true};

  // Frank-Wolfe-flavored ascent on the (non-concave) min over pairs.
  VectorXd best_p = p;
  double best_score = score;
  for (int it = 0; it < 200; ++it) {
    int a = -1, b = -1;
    const double s = cexp_score(ca, xi, eps, p, &a, &b);
    if (s > best_score) {
      best_score = s;
      best_p = p;
    }
    if (a < 0) break;
    // Gradient of the binding pair's better side; move toward its best decision.
    int target = a;
    double ra = 0.0, rb = 0.0;
    for (int j = 0; j < ca.cls->size(); ++j) {
      if (xi[j] <= 0.0) continue;
      for (int q = 0; q < P; ++q) {
        if (p[q] <= 0.0) continue;
        ra += xi[j] * p[q] * capped(ca.kl[j][a][q]);
        rb += xi[j] * p[q] * capped(ca.kl[j][b][q]);
      }
    }
    if (rb > ra) target = b;
    VectorXd grad = VectorXd::Zero(P);
    for (int j = 0; j < ca.cls->size(); ++j) {
      if (xi[j] <= 0.0) continue;
      for (int q = 0; q < P; ++q) grad[q] += xi[j] * capped(ca.kl[j][target][q]);
    }
    int q_star = 0;
    grad.maxCoeff(&q_star);
    const double step = 2.0 / (it + 2.0);
    p *= (1.0 - step);
    p[q_star] += step;
  }
  const double final_score = std::max(best_score, 0.0);
  if (final_score <= 0.0) return {kInf, best_p, false};
  CexpResult out;
  out.c = 1.0 / final_score;
  out.p = best_p;
  out.certificate = c_exp_certificate(ca, xi, eps, out.c, out.p);
  return out;
}

}  // namespace allocest
