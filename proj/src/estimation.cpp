#include "allocest/estimation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace allocest {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Posterior tempered_init(const std::vector<int>& support) {
  if (support.empty()) throw std::invalid_argument("empty posterior support");
  Posterior xi;
  xi.support = support;
  xi.weights = VectorXd::Constant(static_cast<int>(support.size()),
                                  1.0 / static_cast<double>(support.size()));
  return xi;
}

Posterior tempered_init_full(const FiniteModelClass& cls) {
  std::vector<int> support(cls.size());
  for (int i = 0; i < cls.size(); ++i) support[i] = i;
  return tempered_init(support);
}

Posterior tempered_update(const Posterior& xi, const FiniteModelClass& cls, int decision,
                          const Outcome& outcome) {
  const int n = static_cast<int>(xi.support.size());
  VectorXd logw(n);
  double max_lw = -kInf;
  for (int i = 0; i < n; ++i) {
    const double w = xi.weights[i];
    if (w <= 0.0) {
      logw[i] = -kInf;
      continue;
    }
    const double ll = model_loglik(cls, xi.support[i], decision, outcome);
    logw[i] = std::log(w) + 0.5 * ll;
    max_lw = std::max(max_lw, logw[i]);
  }
  if (std::isinf(max_lw))
    throw std::runtime_error("tempered update: every supported model has zero likelihood");
  Posterior out;
  out.support = xi.support;
  out.weights = VectorXd(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double w = std::isinf(logw[i]) ? 0.0 : std::exp(logw[i] - max_lw);
    if (w > 0.0 && w < 1e-300) w = 1e-300;
    out.weights[i] = w;
    total += w;
  }
  out.weights /= total;
  return out;
}

VectorXd posterior_mean_rewards(const Posterior& xi, const FiniteModelClass& cls) {
  VectorXd means = VectorXd::Zero(cls.decision_count);
  for (size_t i = 0; i < xi.support.size(); ++i) {
    const double w = xi.weights[static_cast<int>(i)];
    if (w <= 0.0) continue;
    for (int p = 0; p < cls.decision_count; ++p)
      means[p] += w * cls.models[xi.support[i]].outcomes[p].mean;
  }
  return means;
}

IndexSet greedy_set(const Posterior& xi, const FiniteModelClass& cls) {
  const VectorXd means = posterior_mean_rewards(xi, cls);
  const double best = means.maxCoeff();
  const double tol = 1e-9 * std::max(1.0, std::abs(best));
  IndexSet out;
  for (int p = 0; p < means.size(); ++p)
    if (best - means[p] <= tol) out.push_back(p);
  return out;
}

double expected_log_lik(const Posterior& xi, const FiniteModelClass& cls, int decision,
                        const Outcome& outcome) {
  double acc = 0.0;
  for (size_t i = 0; i < xi.support.size(); ++i) {
    const double w = xi.weights[static_cast<int>(i)];
    if (w <= 0.0) continue;
    const double ll = model_loglik(cls, xi.support[i], decision, outcome);
    if (std::isinf(ll)) return -kInf;
    acc += w * ll;
  }
  return acc;
}

void ledger_record(EstimationLedger& ledger, const ClassAnalysis& ca, const Posterior& xi,
                   const VectorXd& p, int true_model) {
  const FiniteModelClass& cls = *ca.cls;
  double kl = 0.0, kl_flip = 0.0, hel = 0.0;
  for (size_t i = 0; i < xi.support.size(); ++i) {
    const double w = xi.weights[static_cast<int>(i)];
    if (w <= 0.0) continue;
    const int m = xi.support[i];
    for (int q = 0; q < cls.decision_count; ++q) {
      if (p[q] <= 0.0) continue;
      const double f = w * p[q];
      const double d1 = ca.kl[true_model][m][q];
      const double d2 = ca.kl[m][true_model][q];
      kl += std::isinf(d1) ? 0.0 : f * d1;  // inf only off the true support; never realized
      kl_flip += std::isinf(d2) ? 0.0 : f * d2;
      hel += f * model_hellinger_sq(cls, true_model, m, q);
    }
  }
  ledger.kl_records.push_back(kl);
  ledger.kl_flip_records.push_back(kl_flip);
  ledger.hellinger_records.push_back(hel);
  ledger.kl_cum += kl;
  ledger.kl_flip_cum += kl_flip;
  ledger.hellinger_cum += hel;
}

FiniteModelClass build_grid_cover(const GridCoverSpec& spec) {
  FiniteModelClass cls;
  cls.sigma2 = spec.sigma2;
  cls.obs_alphabet_size = 1;
  auto make_model = [&](const std::string& name, const VectorXd& means) {
    FiniteModel fm;
    fm.name = name;
    for (int a = 0; a < means.size(); ++a) {
      OutcomeModel om;
      om.mean = means[a];
      om.variance = spec.sigma2;
      om.obs = VectorXd::Ones(1);
      fm.outcomes.push_back(std::move(om));
    }
    return fm;
  };

  if (spec.kind == GridCoverSpec::Kind::mab_grid) {
    if (spec.step <= 0.0) throw std::invalid_argument("grid step must be positive");
    cls.decision_count = spec.arms;
    const int levels = static_cast<int>(std::floor(1.0 / spec.step + 1e-9)) + 1;
    std::vector<int> idx(spec.arms, 0);
    int count = 0;
    while (true) {
      VectorXd means(spec.arms);
      for (int a = 0; a < spec.arms; ++a) means[a] = std::min(1.0, idx[a] * spec.step);
      bool keep = true;
      if (spec.unique_optimum_only) {
        const double best = means.maxCoeff();
        int ties = 0;
        for (int a = 0; a < spec.arms; ++a)
          if (means[a] == best) ++ties;
        keep = ties == 1;
      }
      if (keep) cls.models.push_back(make_model("g" + std::to_string(count++), means));
      int pos = spec.arms - 1;
      while (pos >= 0 && ++idx[pos] == levels) idx[pos--] = 0;
      if (pos < 0) break;
    }
  } else {
    if (spec.arm_features.empty() || spec.theta_grid.empty())
      throw std::invalid_argument("linear grid needs arm features and a theta grid");
    cls.decision_count = static_cast<int>(spec.arm_features.size());
    int count = 0;
    for (const auto& theta : spec.theta_grid) {
      VectorXd means(cls.decision_count);
      for (int a = 0; a < cls.decision_count; ++a)
        means[a] = std::clamp(theta.dot(spec.arm_features[a]), 0.0, 1.0);
      cls.models.push_back(make_model("lin" + std::to_string(count++), means));
    }
  }
  if (cls.models.empty()) throw std::runtime_error("grid cover is empty");
  RegularityParams rp;
  rp.sigma = std::sqrt(spec.sigma2);
  rp.A = cls.decision_count;
  cls.regularity = regularity_constants(
      spec.kind == GridCoverSpec::Kind::mab_grid ? ClassKind::gaussian_bandit
                                                 : ClassKind::linear_grid,
      rp);
  validate_class(cls);
  return cls;
}

}  // namespace allocest
