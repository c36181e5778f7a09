#include "allocest/mdp.hpp"

#include <cmath>
#include <stdexcept>

namespace allocest {

namespace {
double categorical_kl(const VectorXd& p, const VectorXd& q) {
  double kl = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(kl, 0.0);
}

void check_shapes(const TabularMdp& a, const TabularMdp& b) {
  if (a.S != b.S || a.A != b.A || a.H != b.H)
    throw std::invalid_argument("MDP shape mismatch");
}
}  // namespace

int encode_trajectory(const std::vector<int>& states, int S, int H) {
  int idx = 0;
  for (int h = 1; h < H; ++h) idx = idx * S + states[h];
  return idx;
}

std::vector<int> decode_trajectory(int obs, int S, int H) {
  std::vector<int> states(H, 0);
  for (int h = H - 1; h >= 1; --h) {
    states[h] = obs % S;
    obs /= S;
  }
  states[0] = 0;
  return states;
}

std::vector<VectorXd> occupancies(const TabularMdp& m, const Policy& policy) {
  std::vector<VectorXd> w(m.H, VectorXd::Zero(m.S));
  w[0][0] = 1.0;
  for (int h = 0; h + 1 < m.H; ++h) {
    for (int s = 0; s < m.S; ++s) {
      const double ws = w[h][s];
      if (ws == 0.0) continue;
      const VectorXd& tr = m.transitions[h][s][policy[h][s]];
      for (int sn = 0; sn < m.S; ++sn) w[h + 1][sn] += ws * tr[sn];
    }
  }
  return w;
}

double mdp_policy_kl(const TabularMdp& m1, const TabularMdp& m2, const Policy& policy,
                     double sigma2) {
  check_shapes(m1, m2);
  const auto w = occupancies(m1, policy);
  double kl = 0.0;
  for (int h = 0; h < m1.H; ++h) {
    for (int s = 0; s < m1.S; ++s) {
      const double ws = w[h][s];
      if (ws == 0.0) continue;
      const int a = policy[h][s];
      const double dr = m1.rewards[h][s][a] - m2.rewards[h][s][a];
      double term = dr * dr / (2.0 * sigma2);
      if (h + 1 < m1.H)
        term += categorical_kl(m1.transitions[h][s][a], m2.transitions[h][s][a]);
      kl += ws * term;
    }
  }
  return kl;
}

double mdp_policy_kl_bruteforce(const TabularMdp& m1, const TabularMdp& m2,
                                const Policy& policy, double sigma2) {
  check_shapes(m1, m2);
  const int S = m1.S, H = m1.H;
  int traj_count = 1;
  for (int h = 1; h < H; ++h) traj_count *= S;
  double kl = 0.0;
  for (int tr = 0; tr < traj_count; ++tr) {
    std::vector<int> states = decode_trajectory(tr, S, H);
    double p1 = 1.0, p2 = 1.0, reward_kl = 0.0;
    for (int h = 0; h < H; ++h) {
      const int s = states[h];
      const int a = policy[h][s];
      const double dr = m1.rewards[h][s][a] - m2.rewards[h][s][a];
      reward_kl += dr * dr / (2.0 * sigma2);
      if (h + 1 < H) {
        p1 *= m1.transitions[h][s][a][states[h + 1]];
        p2 *= m2.transitions[h][s][a][states[h + 1]];
      }
    }
    if (p1 <= 0.0) continue;
    // Trajectory probability ratio plus the integrated Gaussian reward terms
    // along this trajectory.
    kl += p1 * (std::log(p1 / p2) + reward_kl);
  }
  return kl;
}

double policy_value(const TabularMdp& m, const Policy& policy) {
  VectorXd v = VectorXd::Zero(m.S);
  for (int h = m.H - 1; h >= 0; --h) {
    VectorXd vn = VectorXd::Zero(m.S);
    for (int s = 0; s < m.S; ++s) {
      const int a = policy[h][s];
      double val = m.rewards[h][s][a];
      if (h + 1 < m.H) val += m.transitions[h][s][a].dot(v);
      vn[s] = val;
    }
    v = vn;
  }
  return v[0];
}

FiniteModelClass compile_mdps(const std::vector<TabularMdp>& mdps,
                              const std::vector<std::string>& names, double sigma2,
                              int policy_cap) {
  if (mdps.empty()) throw std::invalid_argument("no MDPs to compile");
  const TabularMdp& first = mdps[0];
  for (const auto& m : mdps) check_shapes(first, m);
  const int S = first.S, A = first.A, H = first.H;
  double count = std::pow(static_cast<double>(A), static_cast<double>(S) * H);
  if (count > policy_cap)
    throw std::runtime_error("policy space size " + std::to_string(count) +
                             " exceeds cap " + std::to_string(policy_cap));
  const int P = static_cast<int>(count);

  auto backing = std::make_shared<MdpBacking>();
  backing->mdps = mdps;
  backing->sigma2 = sigma2;
  backing->policies.reserve(P);
  for (int idx = 0; idx < P; ++idx) {
    Policy pol(H, std::vector<int>(S, 0));
    int rem = idx;
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s) {
        pol[h][s] = rem % A;
        rem /= A;
      }
    backing->policies.push_back(std::move(pol));
  }

  int traj_count = 1;
  for (int h = 1; h < H; ++h) traj_count *= S;

  FiniteModelClass cls;
  cls.decision_count = P;
  cls.obs_alphabet_size = traj_count;
  cls.sigma2 = sigma2;
  cls.mdp = backing;
  for (size_t i = 0; i < mdps.size(); ++i) {
    FiniteModel fm;
    fm.name = i < names.size() ? names[i] : ("mdp" + std::to_string(i));
    fm.outcomes.resize(P);
    for (int d = 0; d < P; ++d) {
      OutcomeModel& om = fm.outcomes[d];
      om.mean = policy_value(mdps[i], backing->policies[d]);
      om.variance = sigma2 * H;  // variance of the summed per-step rewards
      om.obs = VectorXd::Zero(traj_count);
      om.obs[0] = 1.0;  // placeholder; real laws live in the backing
    }
    cls.models.push_back(std::move(fm));
  }
  RegularityParams rp;
  rp.H = H;
  rp.S = S;
  rp.A = A;
  rp.p_min = first.p_min > 0.0 ? first.p_min : 1e-3;
  cls.regularity = regularity_constants(ClassKind::tabular, rp);
  return cls;
}

}  // namespace allocest
