#include "allocest/models.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "allocest/mdp.hpp"

namespace allocest {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_alphabet(const OutcomeModel& a, const OutcomeModel& b) {
  if (a.obs.size() != b.obs.size())
    throw std::invalid_argument("observation alphabet size mismatch");
}

double gaussian_log_density(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
}
}  // namespace

double kl_divergence(const OutcomeModel& a, const OutcomeModel& b) {
  check_alphabet(a, b);
  double kl = 0.0;
  if (!a.reward_uninformative && !b.reward_uninformative) {
    const double d = a.mean - b.mean;
    kl += d * d / (2.0 * a.variance);
  }
  for (int i = 0; i < a.obs.size(); ++i) {
    const double p = a.obs[i];
    if (p <= 0.0) continue;
    const double q = b.obs[i];
    if (q <= 0.0) return kInf;
    kl += p * std::log(p / q);
  }
  return std::max(kl, 0.0);
}

double hellinger_sq(const OutcomeModel& a, const OutcomeModel& b) {
  check_alphabet(a, b);
  // Bhattacharyya affinities; product law via H^2 = 2(1 - bc_r * bc_o).
  double bc_r = 1.0;
  if (!a.reward_uninformative && !b.reward_uninformative) {
    const double d = a.mean - b.mean;
    bc_r = std::exp(-d * d / (8.0 * a.variance));
  }
  double bc_o = 0.0;
  for (int i = 0; i < a.obs.size(); ++i)
    bc_o += std::sqrt(std::max(a.obs[i], 0.0) * std::max(b.obs[i], 0.0));
  bc_o = std::min(bc_o, 1.0);
  return 2.0 * (1.0 - bc_r * bc_o);
}

double log_likelihood(const OutcomeModel& m, const Outcome& outcome) {
  double ll = 0.0;
  if (!m.reward_uninformative)
    ll += gaussian_log_density(outcome.reward, m.mean, m.variance);
  const double p = m.obs[outcome.obs];
  if (p <= 0.0) return -kInf;
  return ll + std::log(p);
}

Outcome sample(const OutcomeModel& m, Rng& rng) {
  Outcome out;
  out.reward = m.reward_uninformative ? 0.0 : rng.normal(m.mean, std::sqrt(m.variance));
  out.obs = rng.categorical(m.obs);
  return out;
}

GapInfo gaps(const FiniteModel& model) {
  GapInfo info;
  const int P = static_cast<int>(model.outcomes.size());
  double best = -kInf;
  for (const auto& om : model.outcomes) best = std::max(best, om.mean);
  // Means within rounding dust of the maximum are genuine ties; snapping them
  // keeps downstream budget ratios (g / gap) away from 0/epsilon artifacts.
  const double tol = 1e-9 * std::max(1.0, std::abs(best));
  info.gap.resize(P);
  for (int i = 0; i < P; ++i) {
    const double gap = best - model.outcomes[i].mean;
    if (gap <= tol) {
      info.gap[i] = 0.0;
      info.optimal_set.push_back(i);
    } else {
      info.gap[i] = gap;
    }
  }
  if (info.optimal_set.size() > 1 || P == static_cast<int>(info.optimal_set.size())) {
    info.min_gap = 0.0;
  } else {
    double mg = kInf;
    for (int i = 0; i < P; ++i)
      if (info.gap[i] > 0.0) mg = std::min(mg, info.gap[i]);
    info.min_gap = (mg == kInf) ? 0.0 : mg;
  }
  return info;
}

RegularityConstants regularity_constants(ClassKind kind, const RegularityParams& p) {
  RegularityConstants rc;
  switch (kind) {
    case ClassKind::gaussian_bandit:
    case ClassKind::linear_grid:
      rc.l_kl = rc.v_m = 2.0 * std::sqrt(2.0) / p.sigma;
      rc.d_cov = p.A;
      rc.c_cov = 1.0;
      break;
    case ClassKind::informative_arm:
      rc.v_m = std::max(2.0, std::log(p.A / (1.0 - p.beta)));
      rc.l_kl = rc.v_m;
      rc.d_cov = p.A;
      rc.c_cov = 1.0;
      break;
    case ClassKind::tabular:
      rc.l_kl = rc.v_m = p.H * (4.0 + std::log(1.0 / p.p_min));
      rc.d_cov = static_cast<double>(p.S) * p.S * p.A * p.H;
      rc.c_cov = p.H / p.p_min;
      break;
    default:
      throw std::invalid_argument("unknown class kind");
  }
  return rc;
}

double model_kl(const FiniteModelClass& cls, int m1, int m2, int decision) {
  if (cls.mdp)
    return mdp_policy_kl(cls.mdp->mdps[m1], cls.mdp->mdps[m2],
                         cls.mdp->policies[decision], cls.mdp->sigma2);
  return kl_divergence(cls.models[m1].outcomes[decision], cls.models[m2].outcomes[decision]);
}

double model_hellinger_sq(const FiniteModelClass& cls, int m1, int m2, int decision) {
  if (!cls.mdp)
    return hellinger_sq(cls.models[m1].outcomes[decision], cls.models[m2].outcomes[decision]);
  // Trajectory enumeration; Bhattacharyya affinity factorizes over steps.
  const TabularMdp& a = cls.mdp->mdps[m1];
  const TabularMdp& b = cls.mdp->mdps[m2];
  const Policy& pol = cls.mdp->policies[decision];
  const double sig2 = cls.mdp->sigma2;
  const int S = a.S, H = a.H;
  int traj_count = 1;
  for (int h = 1; h < H; ++h) traj_count *= S;
  double bc = 0.0;
  for (int tr = 0; tr < traj_count; ++tr) {
    std::vector<int> states = decode_trajectory(tr, S, H);
    double affinity = 1.0;
    for (int h = 0; h < H; ++h) {
      const int s = states[h];
      const int act = pol[h][s];
      const double dr = a.rewards[h][s][act] - b.rewards[h][s][act];
      affinity *= std::exp(-dr * dr / (8.0 * sig2));
      if (h + 1 < H) {
        const int sn = states[h + 1];
        affinity *= std::sqrt(a.transitions[h][s][act][sn] * b.transitions[h][s][act][sn]);
      }
    }
    bc += affinity;
  }
  return 2.0 * (1.0 - std::min(bc, 1.0));
}

double model_loglik(const FiniteModelClass& cls, int m, int decision, const Outcome& outcome) {
  if (!cls.mdp) return log_likelihood(cls.models[m].outcomes[decision], outcome);
  const TabularMdp& mdp = cls.mdp->mdps[m];
  const Policy& pol = cls.mdp->policies[decision];
  const double sig2 = cls.mdp->sigma2;
  std::vector<int> states = decode_trajectory(outcome.obs, mdp.S, mdp.H);
  double ll = 0.0;
  for (int h = 0; h < mdp.H; ++h) {
    const int s = states[h];
    const int act = pol[h][s];
    ll += gaussian_log_density(outcome.step_rewards[h], mdp.rewards[h][s][act], sig2);
    if (h + 1 < mdp.H) {
      const double p = mdp.transitions[h][s][act][states[h + 1]];
      if (p <= 0.0) return -kInf;
      ll += std::log(p);
    }
  }
  return ll;
}

Outcome model_sample(const FiniteModelClass& cls, int m, int decision, Rng& rng) {
  if (!cls.mdp) return sample(cls.models[m].outcomes[decision], rng);
  const TabularMdp& mdp = cls.mdp->mdps[m];
  const Policy& pol = cls.mdp->policies[decision];
  const double sig = std::sqrt(cls.mdp->sigma2);
  Outcome out;
  std::vector<int> states(mdp.H);
  states[0] = 0;
  for (int h = 0; h < mdp.H; ++h) {
    const int s = states[h];
    const int act = pol[h][s];
    const double r = rng.normal(mdp.rewards[h][s][act], sig);
    out.step_rewards.push_back(r);
    out.reward += r;
    if (h + 1 < mdp.H) states[h + 1] = rng.categorical(mdp.transitions[h][s][act]);
  }
  out.obs = encode_trajectory(states, mdp.S, mdp.H);
  return out;
}

void validate_class(const FiniteModelClass& cls) {
  std::ostringstream err;
  if (cls.decision_count < 1) throw std::runtime_error("decision_count must be >= 1");
  if (cls.obs_alphabet_size < 1) throw std::runtime_error("obs_alphabet_size must be >= 1");
  if (cls.sigma2 <= 0.0) throw std::runtime_error("sigma2 must be positive");
  std::set<std::string> names;
  for (const auto& model : cls.models) {
    if (!names.insert(model.name).second)
      throw std::runtime_error("duplicate model name: " + model.name);
    if (static_cast<int>(model.outcomes.size()) != cls.decision_count) {
      err << "model " << model.name << ": expected " << cls.decision_count
          << " arms, got " << model.outcomes.size();
      throw std::runtime_error(err.str());
    }
    for (size_t a = 0; a < model.outcomes.size(); ++a) {
      const auto& om = model.outcomes[a];
      if (om.mean < 0.0 || om.mean > 1.0) {
        err << "model " << model.name << " arm " << a << ": mean " << om.mean
            << " outside [0,1]";
        throw std::runtime_error(err.str());
      }
      if (om.variance <= 0.0) {
        err << "model " << model.name << " arm " << a << ": non-positive variance";
        throw std::runtime_error(err.str());
      }
      if (om.obs.size() != cls.obs_alphabet_size) {
        err << "model " << model.name << " arm " << a << ": obs vector size "
            << om.obs.size() << " != alphabet size " << cls.obs_alphabet_size;
        throw std::runtime_error(err.str());
      }
      double sum = 0.0;
      for (int i = 0; i < om.obs.size(); ++i) {
        if (om.obs[i] < 0.0) {
          err << "model " << model.name << " arm " << a << ": negative obs probability at index "
              << i;
          throw std::runtime_error(err.str());
        }
        sum += om.obs[i];
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        err << "model " << model.name << " arm " << a << ": obs probabilities sum to " << sum;
        throw std::runtime_error(err.str());
      }
    }
  }
}

}  // namespace allocest
