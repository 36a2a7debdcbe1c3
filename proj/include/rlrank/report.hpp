#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rlrank/analysis.hpp"
#include "rlrank/domain_metrics.hpp"
#include "rlrank/fsio.hpp"
#include "rlrank/reliability.hpp"
#include "rlrank/trace.hpp"

namespace rlrank {

constexpr int kReportFormatVersion = 1;

// Everything the ranking stages need from one algorithm's traces, so ranking
// can run from report files without re-reading the raw interaction data.
struct AnalysisReport {
    std::string algorithm_name;
    std::string experiment_name;
    int obs_dim = 0;
    int act_dim = 0;
    AnalysisParams params;
    long long valid_count = 0;

    StateFrequencyResult state_freq;
    StateActionFrequencyResult sa_freq;
    RewardAnalysisResult reward_result;
    double model_gamma = 0.95;
    std::map<std::pair<long long, long long>, double> q_table;
    std::map<long long, double> v_table;
    ExtremaReport extrema;
    std::vector<SequenceRecord> planned_sequences;
    std::vector<SequenceRecord> exploit_sequences;

    std::vector<double> train_curve;   // per-episode mean reward, episode order
    std::vector<double> exploit_curve;
    MetricValues metrics;

    bool reliability_available = false;
    std::string reliability_error; // why not, when unavailable
    ReliabilityScores reliability;
};

// ---------------------------------------------------------------------------
// Building a report from traces

inline AnalysisReport build_report(const TraceSet& traces, const AnalysisParams& params,
                                   double cvar_alpha = 0.05, int iqr_windows = 3) {
    auto violations = validate_traces(traces);
    if (!violations.empty())
        throw InputError("cannot analyze invalid trace set: " + violations.front());
    params.binning.validate();

    AnalysisReport rep;
    rep.algorithm_name = traces.algorithm_name;
    rep.experiment_name = traces.experiment_name;
    rep.obs_dim = traces.obs_dim();
    rep.act_dim = traces.act_dim();
    rep.params = params;

    auto all = discretize_episodes(traces, params.binning);
    auto train = episodes_of_kind(all, EpisodeKind::Train);
    auto exploit = episodes_of_kind(all, EpisodeKind::Exploit);
    if (train.empty()) throw InputError("trace set has no training episodes");
    if (exploit.empty()) throw InputError("trace set has no exploit episodes");

    auto valid = params.valid_states();
    rep.valid_count = static_cast<long long>(valid.size());

    rep.state_freq = state_frequency_analysis(train, valid);
    rep.sa_freq = state_action_frequency_analysis(train, params.pair_budget, params.certain_max,
                                                  params.uncertain_min);
    rep.reward_result = reward_analysis(train, params.reward_k);
    EmpiricalModel model = build_empirical_model(train, params.gamma);
    rep.model_gamma = model.gamma;
    rep.q_table = model.q_table;
    rep.v_table = model.v_table;
    rep.extrema = transition_value_analysis(model);
    rep.planned_sequences = sequence_analysis(model, rep.extrema, params.p_min, params.max_seq_len,
                                              params.best_state);
    rep.exploit_sequences = extract_exploit_sequences(exploit, params.best_state);

    for (const DiscretizedEpisode& e : train) rep.train_curve.push_back(mean(e.rewards));
    for (const DiscretizedEpisode& e : exploit) rep.exploit_curve.push_back(mean(e.rewards));

    rep.metrics.mean_reward = mean_reward_metric(train);
    rep.metrics.state_coverage = state_coverage_metric(train, valid);
    rep.metrics.unified_coverage =
            unified_coverage_metric(train, valid, params.pair_budget, params.unified_weight);
    rep.metrics.best_sequence_pct = sequence_comparison_metric(rep.exploit_sequences);
    rep.metrics.median_reward = median_mean_reward_metric(rep.exploit_curve);

    try {
        rep.reliability = reliability_scores(rep.train_curve, cvar_alpha, iqr_windows);
        rep.reliability_available = true;
    } catch (const InputError& e) {
        rep.reliability_available = false;
        rep.reliability_error = e.what();
    }
    return rep;
}

// ---------------------------------------------------------------------------
// JSONL serialization

namespace detail {

inline nlohmann::json params_to_json(const AnalysisParams& p) {
    nlohmann::json validity = nlohmann::json::array();
    for (const auto& [component, cap] : p.validity.max_bin)
        validity.push_back({component, cap});
    return {{"state_edges", p.binning.state_edges},
            {"action_edges", p.binning.action_edges},
            {"validity_max_bin", validity},
            {"gamma", p.gamma},
            {"reward_k", p.reward_k},
            {"certain_max", p.certain_max},
            {"uncertain_min", p.uncertain_min},
            {"p_min", p.p_min},
            {"max_seq_len", p.max_seq_len},
            {"best_state", p.best_state},
            {"pair_budget", p.pair_budget},
            {"unified_weight", p.unified_weight}};
}

inline AnalysisParams params_from_json(const nlohmann::json& j) {
    AnalysisParams p;
    p.binning.state_edges = j.at("state_edges").get<std::vector<std::vector<double>>>();
    p.binning.action_edges = j.at("action_edges").get<std::vector<std::vector<double>>>();
    p.validity.max_bin.clear();
    for (const auto& pair : j.at("validity_max_bin"))
        p.validity.max_bin[pair.at(0).get<int>()] = pair.at(1).get<int>();
    p.gamma = j.at("gamma").get<double>();
    p.reward_k = j.at("reward_k").get<double>();
    p.certain_max = j.at("certain_max").get<double>();
    p.uncertain_min = j.at("uncertain_min").get<double>();
    p.p_min = j.at("p_min").get<double>();
    p.max_seq_len = j.at("max_seq_len").get<int>();
    p.best_state = j.at("best_state").get<long long>();
    p.pair_budget = j.at("pair_budget").get<int>();
    p.unified_weight = j.at("unified_weight").get<double>();
    return p;
}

inline nlohmann::json sequences_to_json(const std::vector<SequenceRecord>& seqs) {
    nlohmann::json out = nlohmann::json::array();
    for (const SequenceRecord& s : seqs)
        out.push_back({{"run_name", s.run_name},
                       {"chain", s.chain},
                       {"reach_probability", s.reach_probability},
                       {"is_best", s.is_best},
                       {"unreachable", s.unreachable}});
    return out;
}

inline std::vector<SequenceRecord> sequences_from_json(const nlohmann::json& j) {
    std::vector<SequenceRecord> out;
    for (const auto& e : j) {
        SequenceRecord s;
        s.run_name = e.at("run_name").get<std::string>();
        s.chain = e.at("chain").get<std::vector<long long>>();
        s.reach_probability = e.at("reach_probability").get<double>();
        s.is_best = e.at("is_best").get<bool>();
        s.unreachable = e.at("unreachable").get<bool>();
        out.push_back(std::move(s));
    }
    return out;
}

template <class K, class V>
nlohmann::json pairs_to_json(const std::map<K, V>& m) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [k, v] : m) out.push_back({k, v});
    return out;
}

inline nlohmann::json pair_map_to_json(const std::map<std::pair<long long, long long>, long long>& m) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [k, v] : m) out.push_back({k.first, k.second, v});
    return out;
}

inline nlohmann::json pair_map_to_json(const std::map<std::pair<long long, long long>, double>& m) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [k, v] : m) out.push_back({k.first, k.second, v});
    return out;
}

inline nlohmann::json pair_list_to_json(const std::vector<std::pair<long long, long long>>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [a, b] : v) out.push_back({a, b});
    return out;
}

} // namespace detail

inline void write_report(const AnalysisReport& rep, std::ostream& out) {
    using nlohmann::json;
    std::vector<json> lines;
    lines.push_back({{"section", "header"},
                     {"format_version", kReportFormatVersion},
                     {"algorithm_name", rep.algorithm_name},
                     {"experiment_name", rep.experiment_name},
                     {"obs_dim", rep.obs_dim},
                     {"act_dim", rep.act_dim},
                     {"valid_count", rep.valid_count},
                     {"params", detail::params_to_json(rep.params)}});
    lines.push_back({{"section", "state_frequency"},
                     {"counts", detail::pairs_to_json(rep.state_freq.state_counts)},
                     {"total_steps", rep.state_freq.total_steps},
                     {"coverage", rep.state_freq.coverage},
                     {"dispersion", rep.state_freq.dispersion},
                     {"frequent", rep.state_freq.frequent},
                     {"infrequent", rep.state_freq.infrequent}});
    lines.push_back({{"section", "state_action_frequency"},
                     {"counts", detail::pair_map_to_json(rep.sa_freq.pair_counts)},
                     {"total_steps", rep.sa_freq.total_steps},
                     {"pair_coverage", rep.sa_freq.pair_coverage},
                     {"dispersion", detail::pairs_to_json(rep.sa_freq.action_dispersion)},
                     {"mean_dispersion", rep.sa_freq.mean_dispersion},
                     {"certain", rep.sa_freq.certain},
                     {"uncertain", rep.sa_freq.uncertain}});
    lines.push_back({{"section", "reward"},
                     {"pair_mean", detail::pair_map_to_json(rep.reward_result.pair_mean_reward)},
                     {"high", detail::pair_list_to_json(rep.reward_result.high)},
                     {"low", detail::pair_list_to_json(rep.reward_result.low)}});
    lines.push_back({{"section", "model"},
                     {"gamma", rep.model_gamma},
                     {"q", detail::pair_map_to_json(rep.q_table)},
                     {"v", detail::pairs_to_json(rep.v_table)}});
    lines.push_back({{"section", "extrema"},
                     {"local_maxima", rep.extrema.local_maxima},
                     {"local_minima", rep.extrema.local_minima}});
    lines.push_back({{"section", "sequences"},
                     {"planned", detail::sequences_to_json(rep.planned_sequences)},
                     {"exploit", detail::sequences_to_json(rep.exploit_sequences)}});
    lines.push_back({{"section", "curves"},
                     {"train_episode_mean_rewards", rep.train_curve},
                     {"exploit_episode_mean_rewards", rep.exploit_curve}});
    lines.push_back({{"section", "metrics"},
                     {"mean_reward", rep.metrics.mean_reward},
                     {"state_coverage", rep.metrics.state_coverage},
                     {"unified_coverage", rep.metrics.unified_coverage},
                     {"best_sequences", rep.metrics.best_sequence_pct},
                     {"median_reward", rep.metrics.median_reward}});
    json rel{{"section", "reliability"}, {"available", rep.reliability_available}};
    if (rep.reliability_available) {
        rel["iqr_windows"] = rep.reliability.iqr_windows;
        rel["cvar_differences"] = rep.reliability.cvar_diff;
        rel["cvar_drawdown"] = rep.reliability.cvar_drawdown;
        rel["median_performance"] = rep.reliability.median_perf;
    } else {
        rel["error"] = rep.reliability_error;
    }
    lines.push_back(rel);

    for (const json& j : lines) out << j.dump() << '\n';
    if (!out.good()) throw std::runtime_error("report write failed");
}

inline AnalysisReport read_report(std::istream& in) {
    using nlohmann::json;
    AnalysisReport rep;
    std::map<std::string, json> sections;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw InputError("report line " + std::to_string(line_no) + ": malformed JSON: " +
                             e.what());
        }
        if (!j.is_object() || !j.contains("section"))
            throw InputError("report line " + std::to_string(line_no) + ": missing 'section'");
        // The key must be computed before the assignment: the right operand is
        // sequenced first and would leave j moved-from while indexing the map.
        std::string key = j.at("section").get<std::string>();
        sections[key] = std::move(j);
    }
    auto section = [&sections](const char* name) -> const json& {
        auto it = sections.find(name);
        if (it == sections.end())
            throw InputError(std::string("report: missing section '") + name + "'");
        return it->second;
    };

    try {
        const json& header = section("header");
        int version = header.at("format_version").get<int>();
        if (version != kReportFormatVersion)
            throw InputError("report: unsupported format_version " + std::to_string(version));
        rep.algorithm_name = header.at("algorithm_name").get<std::string>();
        rep.experiment_name = header.at("experiment_name").get<std::string>();
        rep.obs_dim = header.at("obs_dim").get<int>();
        rep.act_dim = header.at("act_dim").get<int>();
        rep.valid_count = header.at("valid_count").get<long long>();
        rep.params = detail::params_from_json(header.at("params"));

        const json& sf = section("state_frequency");
        for (const auto& e : sf.at("counts"))
            rep.state_freq.state_counts[e.at(0).get<long long>()] = e.at(1).get<long long>();
        rep.state_freq.total_steps = sf.at("total_steps").get<long long>();
        rep.state_freq.coverage = sf.at("coverage").get<double>();
        rep.state_freq.dispersion = sf.at("dispersion").get<double>();
        rep.state_freq.frequent = sf.at("frequent").get<std::vector<long long>>();
        rep.state_freq.infrequent = sf.at("infrequent").get<std::vector<long long>>();

        const json& sa = section("state_action_frequency");
        for (const auto& e : sa.at("counts"))
            rep.sa_freq.pair_counts[{e.at(0).get<long long>(), e.at(1).get<long long>()}] =
                    e.at(2).get<long long>();
        rep.sa_freq.total_steps = sa.at("total_steps").get<long long>();
        rep.sa_freq.pair_coverage = sa.at("pair_coverage").get<double>();
        for (const auto& e : sa.at("dispersion"))
            rep.sa_freq.action_dispersion[e.at(0).get<long long>()] = e.at(1).get<double>();
        rep.sa_freq.mean_dispersion = sa.at("mean_dispersion").get<double>();
        rep.sa_freq.certain = sa.at("certain").get<std::vector<long long>>();
        rep.sa_freq.uncertain = sa.at("uncertain").get<std::vector<long long>>();

        const json& rw = section("reward");
        for (const auto& e : rw.at("pair_mean"))
            rep.reward_result.pair_mean_reward[{e.at(0).get<long long>(), e.at(1).get<long long>()}] =
                    e.at(2).get<double>();
        for (const auto& e : rw.at("high"))
            rep.reward_result.high.emplace_back(e.at(0).get<long long>(), e.at(1).get<long long>());
        for (const auto& e : rw.at("low"))
            rep.reward_result.low.emplace_back(e.at(0).get<long long>(), e.at(1).get<long long>());

        const json& model = section("model");
        rep.model_gamma = model.at("gamma").get<double>();
        for (const auto& e : model.at("q"))
            rep.q_table[{e.at(0).get<long long>(), e.at(1).get<long long>()}] =
                    e.at(2).get<double>();
        for (const auto& e : model.at("v"))
            rep.v_table[e.at(0).get<long long>()] = e.at(1).get<double>();

        const json& ex = section("extrema");
        rep.extrema.local_maxima = ex.at("local_maxima").get<std::vector<long long>>();
        rep.extrema.local_minima = ex.at("local_minima").get<std::vector<long long>>();

        const json& seq = section("sequences");
        rep.planned_sequences = detail::sequences_from_json(seq.at("planned"));
        rep.exploit_sequences = detail::sequences_from_json(seq.at("exploit"));

        const json& curves = section("curves");
        rep.train_curve = curves.at("train_episode_mean_rewards").get<std::vector<double>>();
        rep.exploit_curve = curves.at("exploit_episode_mean_rewards").get<std::vector<double>>();

        const json& met = section("metrics");
        rep.metrics.mean_reward = met.at("mean_reward").get<double>();
        rep.metrics.state_coverage = met.at("state_coverage").get<double>();
        rep.metrics.unified_coverage = met.at("unified_coverage").get<double>();
        rep.metrics.best_sequence_pct = met.at("best_sequences").get<double>();
        rep.metrics.median_reward = met.at("median_reward").get<double>();

        const json& rel = section("reliability");
        rep.reliability_available = rel.at("available").get<bool>();
        if (rep.reliability_available) {
            rep.reliability.iqr_windows = rel.at("iqr_windows").get<std::vector<double>>();
            rep.reliability.cvar_diff = rel.at("cvar_differences").get<double>();
            rep.reliability.cvar_drawdown = rel.at("cvar_drawdown").get<double>();
            rep.reliability.median_perf = rel.at("median_performance").get<double>();
        } else {
            rep.reliability_error = rel.at("error").get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("report: bad field: ") + e.what());
    }
    return rep;
}

inline void write_report_file(const AnalysisReport& rep, const std::string& path) {
    std::ostringstream buf;
    write_report(rep, buf);
    write_file_atomic(path, buf.str());
}

inline AnalysisReport read_report_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open report file: " + path);
    try {
        return read_report(in);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

} // namespace rlrank
