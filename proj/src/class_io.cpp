#include "allocest/class_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace allocest {

using nlohmann::json;

namespace {
std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

FiniteModelClass parse_class(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("JSON parse error: ") + e.what());
  }
  FiniteModelClass cls;
  cls.decision_count = j.at("decision_count").get<int>();
  cls.obs_alphabet_size = j.at("obs_alphabet_size").get<int>();
  cls.sigma2 = j.value("sigma2", 1.0);
  for (const auto& jm : j.at("models")) {
    FiniteModel fm;
    fm.name = jm.at("name").get<std::string>();
    for (const auto& ja : jm.at("arms")) {
      OutcomeModel om;
      om.mean = ja.at("mean").get<double>();
      om.variance = cls.sigma2;
      om.reward_uninformative = ja.value("reward_uninformative", false);
      const auto& obs = ja.at("obs");
      om.obs = VectorXd::Zero(static_cast<int>(obs.size()));
      for (size_t i = 0; i < obs.size(); ++i) om.obs[static_cast<int>(i)] = obs[i].get<double>();
      fm.outcomes.push_back(std::move(om));
    }
    cls.models.push_back(std::move(fm));
  }
  if (j.contains("regularity")) {
    const auto& jr = j["regularity"];
    cls.regularity.l_kl = jr.value("l_kl", 0.0);
    cls.regularity.v_m = jr.value("v_m", 0.0);
    cls.regularity.d_cov = jr.value("d_cov", 0.0);
    cls.regularity.c_cov = jr.value("c_cov", 1.0);
  } else {
    RegularityParams rp;
    rp.sigma = std::sqrt(cls.sigma2);
    rp.A = cls.decision_count;
    cls.regularity = regularity_constants(ClassKind::gaussian_bandit, rp);
  }
  validate_class(cls);
  return cls;
}

FiniteModelClass load_class(const std::string& path) {
  try {
    return parse_class(read_file(path));
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string class_to_json(const FiniteModelClass& cls, const std::string& meta) {
  json j;
  j["decision_count"] = cls.decision_count;
  j["obs_alphabet_size"] = cls.obs_alphabet_size;
  j["sigma2"] = cls.sigma2;
  j["regularity"] = {{"l_kl", cls.regularity.l_kl},
                     {"v_m", cls.regularity.v_m},
                     {"d_cov", cls.regularity.d_cov},
                     {"c_cov", cls.regularity.c_cov}};
  if (!meta.empty()) j["meta"] = json::parse(meta);
  j["models"] = json::array();
  for (const auto& fm : cls.models) {
    json jm;
    jm["name"] = fm.name;
    jm["arms"] = json::array();
    for (const auto& om : fm.outcomes) {
      json ja;
      ja["mean"] = om.mean;
      std::vector<double> obs(om.obs.data(), om.obs.data() + om.obs.size());
      ja["obs"] = obs;
      if (om.reward_uninformative) ja["reward_uninformative"] = true;
      jm["arms"].push_back(std::move(ja));
    }
    j["models"].push_back(std::move(jm));
  }
  return j.dump(2);
}

void save_class(const FiniteModelClass& cls, const std::string& path, const std::string& meta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << class_to_json(cls, meta) << "\n";
}

TabularMdp parse_mdp(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("JSON parse error: ") + e.what());
  }
  TabularMdp m;
  m.S = j.at("S").get<int>();
  m.A = j.at("A").get<int>();
  m.H = j.at("H").get<int>();
  m.p_min = j.at("p_min").get<double>();
  if (m.S < 1 || m.A < 1 || m.H < 1) throw std::runtime_error("S, A, H must be positive");
  if (m.p_min <= 0.0 || m.p_min >= 1.0) throw std::runtime_error("p_min must be in (0,1)");
  const auto& jt = j.at("transitions");
  const auto& jr = j.at("rewards");
  m.transitions.resize(m.H);
  m.rewards.resize(m.H);
  for (int h = 0; h < m.H; ++h) {
    m.transitions[h].resize(m.S);
    m.rewards[h].resize(m.S);
    for (int s = 0; s < m.S; ++s) {
      m.transitions[h][s].resize(m.A);
      m.rewards[h][s].resize(m.A);
      for (int a = 0; a < m.A; ++a) {
        m.rewards[h][s][a] = jr.at(h).at(s).at(a).get<double>();
        if (m.rewards[h][s][a] < 0.0 || m.rewards[h][s][a] > 1.0 / m.H + 1e-12)
          throw std::runtime_error("reward mean outside [0, 1/H] at h=" + std::to_string(h) +
                                   " s=" + std::to_string(s) + " a=" + std::to_string(a));
        VectorXd tr = VectorXd::Zero(m.S);
        double sum = 0.0;
        for (int sn = 0; sn < m.S; ++sn) {
          tr[sn] = jt.at(h).at(s).at(a).at(sn).get<double>();
          if (tr[sn] < m.p_min - 1e-12)
            throw std::runtime_error("transition below p_min at h=" + std::to_string(h) +
                                     " s=" + std::to_string(s) + " a=" + std::to_string(a));
          sum += tr[sn];
        }
        if (std::abs(sum - 1.0) > 1e-12)
          throw std::runtime_error("transition row does not sum to 1 at h=" + std::to_string(h) +
                                   " s=" + std::to_string(s) + " a=" + std::to_string(a));
        m.transitions[h][s][a] = std::move(tr);
      }
    }
  }
  return m;
}

TabularMdp load_mdp(const std::string& path) {
  try {
    return parse_mdp(read_file(path));
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string mdp_to_json(const TabularMdp& m) {
  json j;
  j["S"] = m.S;
  j["A"] = m.A;
  j["H"] = m.H;
  j["p_min"] = m.p_min;
  json jt = json::array(), jr = json::array();
  for (int h = 0; h < m.H; ++h) {
    json ht = json::array(), hr = json::array();
    for (int s = 0; s < m.S; ++s) {
      json st = json::array(), sr = json::array();
      for (int a = 0; a < m.A; ++a) {
        std::vector<double> tr(m.transitions[h][s][a].data(),
                               m.transitions[h][s][a].data() + m.S);
        st.push_back(tr);
        sr.push_back(m.rewards[h][s][a]);
      }
      ht.push_back(std::move(st));
      hr.push_back(std::move(sr));
    }
    jt.push_back(std::move(ht));
    jr.push_back(std::move(hr));
  }
  j["transitions"] = std::move(jt);
  j["rewards"] = std::move(jr);
  return j.dump(2);
}

}  // namespace allocest
