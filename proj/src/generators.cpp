#include "allocest/generators.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace allocest {

namespace {

FiniteModel plain_model(const std::string& name, const VectorXd& means, double sigma2) {
  FiniteModel m;
  m.name = name;
  for (int a = 0; a < means.size(); ++a) {
    OutcomeModel om;
    om.mean = means[a];
    om.variance = sigma2;
    om.obs = VectorXd::Ones(1);
    m.outcomes.push_back(std::move(om));
  }
  return m;
}

FiniteModelClass plain_class(int arms, double sigma2) {
  FiniteModelClass cls;
  cls.decision_count = arms;
  cls.obs_alphabet_size = 1;
  cls.sigma2 = sigma2;
  RegularityParams rp;
  rp.sigma = std::sqrt(sigma2);
  rp.A = arms;
  cls.regularity = regularity_constants(ClassKind::gaussian_bandit, rp);
  return cls;
}

}  // namespace

FiniteModelClass gen_informative_arm(int A, int N, double beta, double dmin) {
  if (A < 2 || N < 1) throw std::invalid_argument("informative-arm class needs A >= 2, N >= 1");
  if (beta < 4.0 / A || beta > 0.9)
    throw std::invalid_argument("beta must lie in [4/A, 9/10]");
  if (dmin <= 0.0 || 2.0 * dmin > 1.0)
    throw std::invalid_argument("dmin must lie in (0, 1/2]");

  FiniteModelClass cls;
  cls.decision_count = A + N;
  cls.obs_alphabet_size = A + 1;  // index 0 is the null observation
  cls.sigma2 = 1.0;
  RegularityParams rp;
  rp.A = A;
  rp.beta = beta;
  cls.regularity = regularity_constants(ClassKind::informative_arm, rp);

  VectorXd null_obs = VectorXd::Zero(A + 1);
  null_obs[0] = 1.0;
  VectorXd unif_obs = VectorXd::Zero(A + 1);
  for (int i = 1; i <= A; ++i) unif_obs[i] = 1.0 / A;

  for (int opt = 0; opt < A; ++opt) {
    for (int rev = 0; rev < N; ++rev) {
      FiniteModel m;
      m.name = "a" + std::to_string(opt) + "_k" + std::to_string(rev);
      for (int a = 0; a < A; ++a) {
        OutcomeModel om;
        om.mean = a == opt ? 2.0 * dmin : dmin;
        om.variance = cls.sigma2;
        om.obs = null_obs;
        m.outcomes.push_back(std::move(om));
      }
      for (int k = 0; k < N; ++k) {
        OutcomeModel om;
        om.mean = 0.0;
        om.variance = cls.sigma2;
        om.reward_uninformative = true;
        if (k == rev) {
          VectorXd obs = (1.0 - beta) * unif_obs;
          obs[1 + opt] += beta;
          om.obs = obs;
        } else {
          om.obs = unif_obs;
        }
        m.outcomes.push_back(std::move(om));
      }
      cls.models.push_back(std::move(m));
    }
  }
  validate_class(cls);
  return cls;
}

FiniteModelClass gen_mab_grid(int arms, double step, bool unique_optimum_only) {
  GridCoverSpec spec;
  spec.kind = GridCoverSpec::Kind::mab_grid;
  spec.arms = arms;
  spec.step = step;
  spec.unique_optimum_only = unique_optimum_only;
  return build_grid_cover(spec);
}

FiniteModelClass gen_linear_grid(int dim, int arms, double theta_step, std::uint64_t seed) {
  if (dim < 1 || arms < 1) throw std::invalid_argument("linear grid needs dim, arms >= 1");
  GridCoverSpec spec;
  spec.kind = GridCoverSpec::Kind::linear_grid;
  spec.sigma2 = 1.0;
  Rng rng(derive_seed(seed, 0xfea7));
  for (int a = 0; a < arms; ++a) {
    VectorXd x(dim);
    for (int d = 0; d < dim; ++d) x[d] = rng.uniform();
    const double norm = x.norm();
    if (norm > 0.0) x /= norm;
    spec.arm_features.push_back(x);
  }
  const int levels = static_cast<int>(std::floor(1.0 / theta_step + 1e-9)) + 1;
  std::vector<int> idx(dim, 0);
  while (true) {
    VectorXd theta(dim);
    for (int d = 0; d < dim; ++d) theta[d] = idx[d] * theta_step;
    spec.theta_grid.push_back(theta);
    int pos = dim - 1;
    while (pos >= 0 && ++idx[pos] == levels) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return build_grid_cover(spec);
}

TabularMdp gen_tabular_mdp(int S, int A, int H, double p_min, Rng& rng) {
  if (p_min < 0.0 || p_min * S > 1.0)
    throw std::invalid_argument("p_min must satisfy p_min * S <= 1");
  TabularMdp m;
  m.S = S;
  m.A = A;
  m.H = H;
  m.p_min = p_min;
  m.transitions.resize(H);
  m.rewards.resize(H);
  for (int h = 0; h < H; ++h) {
    m.transitions[h].resize(S);
    m.rewards[h].resize(S);
    for (int s = 0; s < S; ++s) {
      m.transitions[h][s].resize(A);
      m.rewards[h][s].resize(A);
      for (int a = 0; a < A; ++a) {
        VectorXd w(S);
        for (int s2 = 0; s2 < S; ++s2) w[s2] = rng.uniform() + 1e-6;
        w /= w.sum();
        // Mix toward uniform so every entry clears the floor.
        m.transitions[h][s][a] = (1.0 - S * p_min) * w + p_min * VectorXd::Ones(S);
        m.rewards[h][s][a] = rng.uniform() / H;
      }
    }
  }
  return m;
}

FiniteModelClass gen_tabular_random(int S, int A, int H, double p_min, int n_models,
                                    std::uint64_t seed) {
  std::vector<TabularMdp> mdps;
  std::vector<std::string> names;
  for (int i = 0; i < n_models; ++i) {
    Rng rng(derive_seed(seed, 0x3d9, static_cast<std::uint64_t>(i)));
    mdps.push_back(gen_tabular_mdp(S, A, H, p_min, rng));
    names.push_back("mdp" + std::to_string(i));
  }
  return compile_mdps(mdps, names);
}

FiniteModelClass make_two_model_class() {
  FiniteModelClass cls = plain_class(2, 1.0);
  VectorXd m0(2), m1(2);
  m0 << 0.2, 0.5;
  m1 << 0.6, 0.5;
  cls.models.push_back(plain_model("M0", m0, 1.0));
  cls.models.push_back(plain_model("M1", m1, 1.0));
  validate_class(cls);
  return cls;
}

FiniteModelClass make_five_arm_class() {
  FiniteModelClass cls = plain_class(5, 1.0);
  VectorXd base(5);
  base << 0.6, 0.4, 0.4, 0.4, 0.4;
  cls.models.push_back(plain_model("M0", base, 1.0));
  for (int i = 1; i < 5; ++i) {
    VectorXd m = base;
    m[i] = 0.8;
    cls.models.push_back(plain_model("M" + std::to_string(i), m, 1.0));
  }
  validate_class(cls);
  return cls;
}

FiniteModelClass make_mixed_gap_class() {
  FiniteModelClass cls = plain_class(3, 1.0);
  VectorXd m0(3), m1(3), m2(3), m3(3);
  m0 << 0.6, 0.3, 0.3;    // min gap 0.3
  m1 << 0.6, 1.0, 0.95;   // min gap 0.05
  m2 << 0.6, 0.3, 0.9;    // min gap 0.3
  m3 << 0.6, 0.95, 1.0;   // min gap 0.05
  cls.models.push_back(plain_model("wide0", m0, 1.0));
  cls.models.push_back(plain_model("narrow1", m1, 1.0));
  cls.models.push_back(plain_model("wide2", m2, 1.0));
  cls.models.push_back(plain_model("narrow3", m3, 1.0));
  validate_class(cls);
  return cls;
}

PerturbationClass gen_single_perturbation_class(std::uint64_t seed, int max_arms,
                                                int max_models) {
  Rng rng(derive_seed(seed, 0x9e1));
  const int arms = 2 + static_cast<int>(rng.uniform() * (max_arms - 1));
  const int models = 2 + static_cast<int>(rng.uniform() * (max_models - 1));
  const double grid = 0.1;

  // Base means on the grid with a strictly unique optimum at a random arm.
  const int opt = static_cast<int>(rng.uniform() * arms);
  VectorXd base(arms);
  for (int a = 0; a < arms; ++a) {
    const int lv = 1 + static_cast<int>(rng.uniform() * 5);  // 0.1 .. 0.5
    base[a] = lv * grid;
  }
  base[opt] = 0.7;

  FiniteModelClass cls = plain_class(arms, 1.0);
  cls.models.push_back(plain_model("base", base, 1.0));

  // Per-arm minimum squared shift among alternatives touching that arm.
  std::vector<double> min_shift_sq(arms, 0.0);
  for (int i = 1; i < models; ++i) {
    const int arm = [&] {
      int a = static_cast<int>(rng.uniform() * arms);
      while (a == opt) a = static_cast<int>(rng.uniform() * arms);
      return a;
    }();
    const int up = 1 + static_cast<int>(rng.uniform() * 3);  // raise 0.1 .. 0.3 above optimum
    VectorXd m = base;
    m[arm] = base[opt] + up * grid;
    cls.models.push_back(plain_model("alt" + std::to_string(i), m, 1.0));
    const double shift = m[arm] - base[arm];
    const double s2 = shift * shift;
    if (min_shift_sq[arm] == 0.0 || s2 < min_shift_sq[arm]) min_shift_sq[arm] = s2;
  }
  validate_class(cls);

  // Every alternative is ruled out by pulls of the single arm it moves, so the
  // base model's program splits per arm: eta(arm) = 2 sigma^2 / min shift^2.
  double oracle = 0.0;
  for (int a = 0; a < arms; ++a) {
    if (a == opt || min_shift_sq[a] == 0.0) continue;
    oracle += (base[opt] - base[a]) * 2.0 * cls.sigma2 / min_shift_sq[a];
  }
  return {std::move(cls), oracle};
}

FiniteModelClass gen_random_grid_class(std::uint64_t seed, int max_arms, int max_models,
                                       double step, bool unique_optima) {
  Rng rng(derive_seed(seed, 0x77c1));
  const int arms = 2 + static_cast<int>(rng.uniform() * (max_arms - 1));
  const int models = 2 + static_cast<int>(rng.uniform() * (max_models - 1));
  const int levels = static_cast<int>(std::floor(1.0 / step + 1e-9)) + 1;

  FiniteModelClass cls = plain_class(arms, 1.0);
  std::set<std::vector<int>> seen;
  int guard = 0;
  while (static_cast<int>(cls.models.size()) < models && ++guard < 10000) {
    std::vector<int> lv(arms);
    for (int a = 0; a < arms; ++a) lv[a] = static_cast<int>(rng.uniform() * levels);
    if (unique_optima) {
      const int best = *std::max_element(lv.begin(), lv.end());
      if (std::count(lv.begin(), lv.end(), best) != 1) continue;
    }
    if (!seen.insert(lv).second) continue;
    VectorXd means(arms);
    for (int a = 0; a < arms; ++a) means[a] = std::min(1.0, lv[a] * step);
    cls.models.push_back(plain_model("m" + std::to_string(cls.models.size()), means, 1.0));
  }
  if (cls.size() < 2) throw std::runtime_error("random grid class generation stalled");
  validate_class(cls);
  return cls;
}

}  // namespace allocest
