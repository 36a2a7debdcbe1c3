#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rlrank/analysis.hpp"
#include "rlrank/epi_sim.hpp"
#include "rlrank/fsio.hpp"
#include "rlrank/policies.hpp"

namespace rlrank {

// The whole toolkit run described in one place: binning, analysis knobs,
// ranking knobs, the experiment grid, and the policy roster. Every default
// below is a deliberate constant, mirrored in configs/default.json.
struct ToolkitConfig {
    BinningSpec binning = BinningSpec::defaults();
    ValidityMask validity = ValidityMask::defaults();
    long long best_state = 0; // everything-low: the target of sequence metrics

    double gamma = 0.95;
    double reward_k = 1.0;
    double certain_max = 0.25;
    double uncertain_min = 0.75;
    double p_min = 0.1;
    int max_seq_len = 10;
    int pair_budget = 8;
    double unified_weight = 0.5;

    double cvar_alpha = 0.05;
    int iqr_windows = 3;

    int train_episodes = 40;
    int exploit_episodes = 10;
    std::uint64_t seed = 7041;
    double noise_scale = 0.1;

    QLearnConfig qlearn;
    SimConfig sim; // base simulation shared by all experiments
    // Experiment name -> fully resolved simulation config.
    std::map<std::string, SimConfig> experiments;
    std::vector<PolicyVariant> variants = default_variants();

    AnalysisParams analysis_params() const {
        AnalysisParams p;
        p.binning = binning;
        p.validity = validity;
        p.gamma = gamma;
        p.reward_k = reward_k;
        p.certain_max = certain_max;
        p.uncertain_min = uncertain_min;
        p.p_min = p_min;
        p.max_seq_len = max_seq_len;
        p.best_state = best_state;
        p.pair_budget = pair_budget;
        p.unified_weight = unified_weight;
        return p;
    }

    // Three mask-availability scenarios around a common base: the stock
    // split drives how strongly masks damp transmission.
    static ToolkitConfig defaults() {
        ToolkitConfig c;
        SimConfig base; // the baseline scenario is the plain simulation default
        c.sim = base;
        SimConfig high_mask = base;
        high_mask.mask_stock_high = 800;
        high_mask.mask_stock_low = 1000;
        SimConfig low_mask = base;
        low_mask.mask_stock_high = 100;
        low_mask.mask_stock_low = 1000;
        c.experiments = {{"Baseline", base}, {"HighMask", high_mask}, {"LowMask", low_mask}};
        return c;
    }

    void validate() const {
        binning.validate();
        if (experiments.empty()) throw InputError("config: no experiments defined");
        for (const auto& [name, sim_cfg] : experiments) {
            if (name.empty()) throw InputError("config: experiment with empty name");
            try {
                sim_cfg.validate();
            } catch (const InputError& e) {
                throw InputError("config: experiment '" + name + "': " + e.what());
            }
        }
        if (variants.empty()) throw InputError("config: no policy variants defined");
        std::set<std::string> labels;
        for (const PolicyVariant& v : variants)
            if (!labels.insert(v.label()).second)
                throw InputError("config: duplicate policy variant '" + v.label() + "'");
        if (train_episodes < 1 || exploit_episodes < 1)
            throw InputError("config: need at least one training and one exploit episode");
        if (!(cvar_alpha > 0.0 && cvar_alpha < 1.0))
            throw InputError("config: cvar_alpha outside (0, 1)");
        if (iqr_windows < 1) throw InputError("config: iqr_windows must be positive");
        if (!(gamma >= 0.0 && gamma <= 1.0)) throw InputError("config: gamma outside [0, 1]");
        if (pair_budget < 1) throw InputError("config: pair_budget must be positive");
        if (!(unified_weight >= 0.0 && unified_weight <= 1.0))
            throw InputError("config: unified_weight outside [0, 1]");
        if (noise_scale < 0.0) throw InputError("config: negative noise_scale");
    }

    std::vector<std::string> experiment_names() const {
        std::vector<std::string> out;
        for (const auto& [name, _] : experiments) out.push_back(name);
        return out;
    }

    const SimConfig& experiment(const std::string& name) const {
        auto it = experiments.find(name);
        if (it == experiments.end()) {
            std::string msg = "unknown experiment '" + name + "'; known:";
            for (const auto& [known, _] : experiments) msg += " " + known;
            throw InputError(msg);
        }
        return it->second;
    }

    nlohmann::json to_json() const;
    static ToolkitConfig from_json(const nlohmann::json& j);

    static ToolkitConfig load_file(const std::string& path) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_file(path));
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError("config " + path + ": malformed JSON: " + e.what());
        }
        try {
            return from_json(j);
        } catch (const nlohmann::json::exception& e) {
            throw InputError("config " + path + ": " + e.what());
        }
    }

    void save_file(const std::string& path) const {
        write_file_atomic(path, to_json().dump(2) + "\n");
    }
};

// ---------------------------------------------------------------------------
// JSON mapping. Simulation blocks inside "experiments" are partial overlays
// on the "simulation" base block; to_json writes them fully resolved so the
// file spells out every constant in play.

namespace detail {

inline nlohmann::json sim_to_json(const SimConfig& s) {
    return {{"population", s.population},
            {"days", s.days},
            {"ticks_per_day", s.ticks_per_day},
            {"policy_period_ticks", s.policy_period_ticks},
            {"households", s.households},
            {"offices", s.offices},
            {"schools", s.schools},
            {"shops", s.shops},
            {"age_group_fractions", s.age_group_fractions},
            {"initial_exposed", s.initial_exposed},
            {"beta", s.beta},
            {"mask_eff_high", s.mask_eff_high},
            {"mask_eff_low", s.mask_eff_low},
            {"mask_stock_high", s.mask_stock_high},
            {"mask_stock_low", s.mask_stock_low},
            {"vaccine_eff", s.vaccine_eff},
            {"vaccine_doses_per_day", s.vaccine_doses_per_day},
            {"protection_delay_days", s.protection_delay_days},
            {"vaccine_consent", s.vaccine_consent},
            {"mean_days_exposed", s.mean_days_exposed},
            {"mean_days_asymptomatic", s.mean_days_asymptomatic},
            {"mean_days_mild", s.mean_days_mild},
            {"mean_days_severe", s.mean_days_severe},
            {"mean_days_hospitalized", s.mean_days_hospitalized},
            {"p_exposed_to_asymptomatic", s.p_exposed_to_asymptomatic},
            {"p_mild_to_severe", s.p_mild_to_severe},
            {"p_hospitalized_death", s.p_hospitalized_death},
            {"hospital_cap_frac", s.hospital_cap_frac},
            {"initial_household_stock", s.initial_household_stock},
            {"household_daily_consumption", s.household_daily_consumption},
            {"employed_daily_income", s.employed_daily_income},
            {"bpl_threshold", s.bpl_threshold},
            {"shop_probability", s.shop_probability},
            {"reward_weights", s.reward_weights}};
}

inline SimConfig sim_from_json(const nlohmann::json& j, const SimConfig& base) {
    SimConfig s = base;
    auto get = [&j](const char* key, auto& into) {
        if (auto it = j.find(key); it != j.end()) into = it->get<std::decay_t<decltype(into)>>();
    };
    get("population", s.population);
    get("days", s.days);
    get("ticks_per_day", s.ticks_per_day);
    get("policy_period_ticks", s.policy_period_ticks);
    get("households", s.households);
    get("offices", s.offices);
    get("schools", s.schools);
    get("shops", s.shops);
    get("age_group_fractions", s.age_group_fractions);
    get("initial_exposed", s.initial_exposed);
    get("beta", s.beta);
    get("mask_eff_high", s.mask_eff_high);
    get("mask_eff_low", s.mask_eff_low);
    get("mask_stock_high", s.mask_stock_high);
    get("mask_stock_low", s.mask_stock_low);
    get("vaccine_eff", s.vaccine_eff);
    get("vaccine_doses_per_day", s.vaccine_doses_per_day);
    get("protection_delay_days", s.protection_delay_days);
    get("vaccine_consent", s.vaccine_consent);
    get("mean_days_exposed", s.mean_days_exposed);
    get("mean_days_asymptomatic", s.mean_days_asymptomatic);
    get("mean_days_mild", s.mean_days_mild);
    get("mean_days_severe", s.mean_days_severe);
    get("mean_days_hospitalized", s.mean_days_hospitalized);
    get("p_exposed_to_asymptomatic", s.p_exposed_to_asymptomatic);
    get("p_mild_to_severe", s.p_mild_to_severe);
    get("p_hospitalized_death", s.p_hospitalized_death);
    get("hospital_cap_frac", s.hospital_cap_frac);
    get("initial_household_stock", s.initial_household_stock);
    get("household_daily_consumption", s.household_daily_consumption);
    get("employed_daily_income", s.employed_daily_income);
    get("bpl_threshold", s.bpl_threshold);
    get("shop_probability", s.shop_probability);
    get("reward_weights", s.reward_weights);
    return s;
}

} // namespace detail

inline nlohmann::json ToolkitConfig::to_json() const {
    nlohmann::json validity_j = nlohmann::json::array();
    for (const auto& [component, cap] : validity.max_bin) validity_j.push_back({component, cap});
    nlohmann::json variants_j = nlohmann::json::array();
    for (const PolicyVariant& v : variants)
        variants_j.push_back({{"base", PolicyVariant::base_name(v.base)},
                              {"action_noise", v.action_noise},
                              {"observation_noise", v.observation_noise},
                              {"noise_scale", v.noise_scale}});
    nlohmann::json experiments_j;
    for (const auto& [name, sim_cfg] : experiments)
        experiments_j[name] = detail::sim_to_json(sim_cfg);
    return {{"binning",
             {{"state_edges", binning.state_edges}, {"action_edges", binning.action_edges}}},
            {"validity_max_bin", validity_j},
            {"best_state", best_state},
            {"analysis",
             {{"gamma", gamma},
              {"reward_k", reward_k},
              {"certain_max", certain_max},
              {"uncertain_min", uncertain_min},
              {"p_min", p_min},
              {"max_seq_len", max_seq_len},
              {"pair_budget", pair_budget},
              {"unified_weight", unified_weight}}},
            {"reliability", {{"cvar_alpha", cvar_alpha}, {"iqr_windows", iqr_windows}}},
            {"bench",
             {{"train_episodes", train_episodes},
              {"exploit_episodes", exploit_episodes},
              {"seed", seed},
              {"noise_scale", noise_scale},
              {"q_learning",
               {{"learning_rate", qlearn.learning_rate},
                {"gamma", qlearn.gamma},
                {"epsilon_start", qlearn.epsilon_start},
                {"epsilon_end", qlearn.epsilon_end}}}}},
            {"simulation", detail::sim_to_json(sim)},
            {"experiments", experiments_j},
            {"variants", variants_j}};
}

inline ToolkitConfig ToolkitConfig::from_json(const nlohmann::json& j) {
    ToolkitConfig c = ToolkitConfig::defaults();
    if (auto it = j.find("binning"); it != j.end()) {
        if (auto e = it->find("state_edges"); e != it->end())
            c.binning.state_edges = e->get<std::vector<std::vector<double>>>();
        if (auto e = it->find("action_edges"); e != it->end())
            c.binning.action_edges = e->get<std::vector<std::vector<double>>>();
    }
    if (auto it = j.find("validity_max_bin"); it != j.end()) {
        c.validity.max_bin.clear();
        for (const auto& pair : *it)
            c.validity.max_bin[pair.at(0).get<int>()] = pair.at(1).get<int>();
    }
    if (auto it = j.find("best_state"); it != j.end()) c.best_state = it->get<long long>();
    if (auto it = j.find("analysis"); it != j.end()) {
        const nlohmann::json& a = *it;
        auto get = [&a](const char* key, auto& into) {
            if (auto f = a.find(key); f != a.end()) into = f->get<std::decay_t<decltype(into)>>();
        };
        get("gamma", c.gamma);
        get("reward_k", c.reward_k);
        get("certain_max", c.certain_max);
        get("uncertain_min", c.uncertain_min);
        get("p_min", c.p_min);
        get("max_seq_len", c.max_seq_len);
        get("pair_budget", c.pair_budget);
        get("unified_weight", c.unified_weight);
    }
    if (auto it = j.find("reliability"); it != j.end()) {
        if (auto f = it->find("cvar_alpha"); f != it->end()) c.cvar_alpha = f->get<double>();
        if (auto f = it->find("iqr_windows"); f != it->end()) c.iqr_windows = f->get<int>();
    }
    if (auto it = j.find("bench"); it != j.end()) {
        const nlohmann::json& b = *it;
        if (auto f = b.find("train_episodes"); f != b.end()) c.train_episodes = f->get<int>();
        if (auto f = b.find("exploit_episodes"); f != b.end()) c.exploit_episodes = f->get<int>();
        if (auto f = b.find("seed"); f != b.end()) c.seed = f->get<std::uint64_t>();
        if (auto f = b.find("noise_scale"); f != b.end()) c.noise_scale = f->get<double>();
        if (auto f = b.find("q_learning"); f != b.end()) {
            if (auto g = f->find("learning_rate"); g != f->end())
                c.qlearn.learning_rate = g->get<double>();
            if (auto g = f->find("gamma"); g != f->end()) c.qlearn.gamma = g->get<double>();
            if (auto g = f->find("epsilon_start"); g != f->end())
                c.qlearn.epsilon_start = g->get<double>();
            if (auto g = f->find("epsilon_end"); g != f->end())
                c.qlearn.epsilon_end = g->get<double>();
        }
    }
    if (auto it = j.find("simulation"); it != j.end())
        c.sim = detail::sim_from_json(*it, SimConfig{});
    if (auto it = j.find("experiments"); it != j.end()) {
        c.experiments.clear();
        for (const auto& [name, block] : it->items())
            c.experiments[name] = detail::sim_from_json(block, c.sim);
    } else {
        // Keep the default experiment grid consistent with an overridden base.
        ToolkitConfig fresh = ToolkitConfig::defaults();
        for (auto& [name, sim_cfg] : fresh.experiments) {
            SimConfig merged = c.sim;
            merged.mask_stock_high = sim_cfg.mask_stock_high;
            merged.mask_stock_low = sim_cfg.mask_stock_low;
            c.experiments[name] = merged;
        }
    }
    if (auto it = j.find("variants"); it != j.end()) {
        c.variants.clear();
        for (const auto& v : *it) {
            PolicyVariant variant;
            variant.base = PolicyVariant::base_from_name(v.at("base").get<std::string>());
            if (auto f = v.find("action_noise"); f != v.end()) variant.action_noise = f->get<bool>();
            if (auto f = v.find("observation_noise"); f != v.end())
                variant.observation_noise = f->get<bool>();
            variant.noise_scale = c.noise_scale;
            if (auto f = v.find("noise_scale"); f != v.end()) variant.noise_scale = f->get<double>();
            c.variants.push_back(variant);
        }
    } else {
        for (PolicyVariant& v : c.variants) v.noise_scale = c.noise_scale;
    }
    c.validate();
    return c;
}

} // namespace rlrank
