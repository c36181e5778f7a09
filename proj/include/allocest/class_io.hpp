#pragma once

#include <string>

#include "allocest/mdp.hpp"
#include "allocest/models.hpp"

namespace allocest {

// JSON model-class files:
//   {decision_count, obs_alphabet_size, sigma2,
//    models: [{name, arms: [{mean, obs: [..], reward_uninformative?}]}],
//    meta?: {...}}            (meta is provenance only, round-tripped verbatim)
FiniteModelClass load_class(const std::string& path);
FiniteModelClass parse_class(const std::string& json_text);
std::string class_to_json(const FiniteModelClass& cls, const std::string& meta = "");
void save_class(const FiniteModelClass& cls, const std::string& path,
                const std::string& meta = "");

// JSON MDP files: {S, A, H, p_min, transitions[h][s][a][s'], rewards[h][s][a]}
TabularMdp load_mdp(const std::string& path);
TabularMdp parse_mdp(const std::string& json_text);
std::string mdp_to_json(const TabularMdp& mdp);

}  // namespace allocest
