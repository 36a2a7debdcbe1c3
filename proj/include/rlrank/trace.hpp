#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rlrank/errors.hpp"

namespace rlrank {

constexpr int kTraceFormatVersion = 1;

// Observation components are fractions in [0, 1]; action components are
// policy knobs in [0, 7]. Everything outside is a recording bug, so readers
// and writers both refuse it.
constexpr double kObservationLo = 0.0;
constexpr double kObservationHi = 1.0;
constexpr double kActionLo = 0.0;
constexpr double kActionHi = 7.0;

enum class EpisodeKind { Train, Exploit };

inline const char* episode_kind_name(EpisodeKind kind) {
    return kind == EpisodeKind::Train ? "train" : "exploit";
}

struct Step {
    long long tick = 0;
    std::vector<double> observation;
    std::vector<double> action;
    double reward = 0.0;
};

struct Episode {
    std::string run_name;
    EpisodeKind kind = EpisodeKind::Train;
    std::vector<Step> steps;

    double mean_reward() const {
        if (steps.empty()) throw std::invalid_argument("mean_reward: episode has no steps");
        double acc = 0.0;
        for (const Step& s : steps) acc += s.reward;
        return acc / static_cast<double>(steps.size());
    }
};

// One algorithm variant's recorded interaction with one experiment: the unit
// every analysis consumes and every policy run produces.
struct TraceSet {
    std::string algorithm_name;
    std::string experiment_name;
    std::vector<Episode> episodes;
    std::map<std::string, std::string> meta;

    int obs_dim() const {
        for (const Episode& e : episodes)
            if (!e.steps.empty()) return static_cast<int>(e.steps.front().observation.size());
        return 0;
    }

    int act_dim() const {
        for (const Episode& e : episodes)
            if (!e.steps.empty()) return static_cast<int>(e.steps.front().action.size());
        return 0;
    }

    std::vector<const Episode*> episodes_of(EpisodeKind kind) const {
        std::vector<const Episode*> out;
        for (const Episode& e : episodes)
            if (e.kind == kind) out.push_back(&e);
        return out;
    }
};

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline void check_range(std::vector<std::string>& out, const std::string& where,
                        const char* field, const std::vector<double>& values, double lo,
                        double hi) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        double v = values[i];
        if (!std::isfinite(v)) {
            out.push_back(where + ": " + field + "[" + std::to_string(i) + "] is not finite");
        } else if (v < lo || v > hi) {
            std::ostringstream msg;
            msg << where << ": " << field << "[" << i << "] = " << v << " outside [" << lo << ", "
                << hi << "]";
            out.push_back(msg.str());
        }
    }
}

} // namespace detail

// Returns one message per violation (empty means the set is well-formed).
// Rules: at least one episode, no empty or duplicate-named episodes,
// consistent observation/action dimensions, components inside their declared
// ranges, finite rewards, and strictly increasing ticks within an episode.
inline std::vector<std::string> validate_traces(const TraceSet& traces) {
    std::vector<std::string> out;
    if (traces.episodes.empty()) {
        out.push_back("trace set has no episodes");
        return out;
    }
    int obs_dim = traces.obs_dim();
    int act_dim = traces.act_dim();
    std::map<std::string, std::size_t> seen_names;
    for (std::size_t e = 0; e < traces.episodes.size(); ++e) {
        const Episode& ep = traces.episodes[e];
        std::string who = "episode '" + ep.run_name + "'";
        if (ep.run_name.empty()) out.push_back(who + ": empty run name");
        auto [it, inserted] = seen_names.emplace(ep.run_name, e);
        if (!inserted)
            out.push_back(who + ": run name already used by episode " + std::to_string(it->second));
        if (ep.steps.empty()) {
            out.push_back(who + ": no steps");
            continue;
        }
        for (std::size_t s = 0; s < ep.steps.size(); ++s) {
            const Step& step = ep.steps[s];
            std::string where = who + " step " + std::to_string(s);
            if (static_cast<int>(step.observation.size()) != obs_dim)
                out.push_back(where + ": observation has " + std::to_string(step.observation.size()) +
                              " components, expected " + std::to_string(obs_dim));
            if (static_cast<int>(step.action.size()) != act_dim)
                out.push_back(where + ": action has " + std::to_string(step.action.size()) +
                              " components, expected " + std::to_string(act_dim));
            detail::check_range(out, where, "observation", step.observation, kObservationLo,
                                kObservationHi);
            detail::check_range(out, where, "action", step.action, kActionLo, kActionHi);
            if (!std::isfinite(step.reward)) out.push_back(where + ": reward is not finite");
            if (s > 0 && step.tick <= ep.steps[s - 1].tick)
                out.push_back(where + ": tick " + std::to_string(step.tick) +
                              " not greater than previous tick " +
                              std::to_string(ep.steps[s - 1].tick));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSONL serialization.
//
// Line 1 is a header object; every further line is one step:
//   {"format_version":1,"algorithm_name":...,"experiment_name":...,
//    "obs_dim":3,"act_dim":8,"meta":{...}}
//   {"run_name":"Run-0","kind":"train","tick":0,"observation":[...],
//    "action":[...],"reward":2.9}

inline void write_traces(const TraceSet& traces, std::ostream& out) {
    auto violations = validate_traces(traces);
    if (!violations.empty()) {
        std::string msg = "refusing to write invalid trace set:";
        for (const std::string& v : violations) msg += "\n  " + v;
        throw InputError(msg);
    }
    nlohmann::json header{{"format_version", kTraceFormatVersion},
                          {"algorithm_name", traces.algorithm_name},
                          {"experiment_name", traces.experiment_name},
                          {"obs_dim", traces.obs_dim()},
                          {"act_dim", traces.act_dim()},
                          {"meta", traces.meta}};
    out << header.dump() << '\n';
    long long written = 0;
    for (const Episode& ep : traces.episodes) {
        for (const Step& step : ep.steps) {
            nlohmann::json line{{"run_name", ep.run_name},
                                {"kind", episode_kind_name(ep.kind)},
                                {"tick", step.tick},
                                {"observation", step.observation},
                                {"action", step.action},
                                {"reward", step.reward}};
            out << line.dump() << '\n';
            if (!out.good())
                throw std::runtime_error("trace write failed after " + std::to_string(written) +
                                         " step records");
            ++written;
        }
    }
    out.flush();
    if (!out.good())
        throw std::runtime_error("trace write failed after " + std::to_string(written) +
                                 " step records");
}

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& obj, const char* key,
                                           const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw InputError(where + ": missing field '" + key + "'");
    return *it;
}

inline std::vector<double> number_array(const nlohmann::json& j, const char* key,
                                        const std::string& where) {
    if (!j.is_array()) throw InputError(where + ": field '" + key + "' is not an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw InputError(where + ": field '" + key + "' has a non-number entry");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace detail

// Reads one trace set, enforcing on the way in everything validate_traces
// enforces in memory, so read_traces(write_traces(t)) == t exactly when t is
// valid. Errors carry the 1-based line number.
inline TraceSet read_traces(std::istream& in) {
    std::string line;
    long long line_no = 0;

    auto next_content_line = [&]() -> std::optional<std::string> {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
        }
        return std::nullopt;
    };

    auto header_line = next_content_line();
    if (!header_line) throw InputError("trace file is empty (no header line)");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(*header_line);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    std::string where = "line " + std::to_string(line_no) + " (header)";
    if (!header.is_object()) throw InputError(where + ": not a JSON object");
    int version = detail::require_field(header, "format_version", where).get<int>();
    if (version != kTraceFormatVersion)
        throw InputError(where + ": unsupported format_version " + std::to_string(version));

    TraceSet traces;
    traces.algorithm_name = detail::require_field(header, "algorithm_name", where).get<std::string>();
    traces.experiment_name =
            detail::require_field(header, "experiment_name", where).get<std::string>();
    int obs_dim = detail::require_field(header, "obs_dim", where).get<int>();
    int act_dim = detail::require_field(header, "act_dim", where).get<int>();
    if (auto it = header.find("meta"); it != header.end() && it->is_object())
        for (const auto& [k, v] : it->items())
            traces.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();

    std::map<std::string, std::size_t> episode_index;
    while (auto step_line = next_content_line()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(*step_line);
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
        }
        where = "line " + std::to_string(line_no);
        if (!j.is_object()) throw InputError(where + ": not a JSON object");

        std::string run_name = detail::require_field(j, "run_name", where).get<std::string>();
        if (run_name.empty()) throw InputError(where + ": empty run name");
        std::string kind_str = detail::require_field(j, "kind", where).get<std::string>();
        EpisodeKind kind;
        if (kind_str == "train")
            kind = EpisodeKind::Train;
        else if (kind_str == "exploit")
            kind = EpisodeKind::Exploit;
        else
            throw InputError(where + ": unknown kind '" + kind_str + "'");

        const nlohmann::json& tick_j = detail::require_field(j, "tick", where);
        if (!tick_j.is_number_integer()) throw InputError(where + ": tick is not an integer");

        Step step;
        step.tick = tick_j.get<long long>();
        step.observation = detail::number_array(detail::require_field(j, "observation", where),
                                                "observation", where);
        step.action = detail::number_array(detail::require_field(j, "action", where), "action", where);
        const nlohmann::json& reward_j = detail::require_field(j, "reward", where);
        if (!reward_j.is_number()) throw InputError(where + ": reward is not a number");
        step.reward = reward_j.get<double>();

        if (static_cast<int>(step.observation.size()) != obs_dim)
            throw InputError(where + ": observation has " + std::to_string(step.observation.size()) +
                             " components, header declares " + std::to_string(obs_dim));
        if (static_cast<int>(step.action.size()) != act_dim)
            throw InputError(where + ": action has " + std::to_string(step.action.size()) +
                             " components, header declares " + std::to_string(act_dim));
        std::vector<std::string> range_violations;
        detail::check_range(range_violations, where, "observation", step.observation, kObservationLo,
                            kObservationHi);
        detail::check_range(range_violations, where, "action", step.action, kActionLo, kActionHi);
        if (!std::isfinite(step.reward)) range_violations.push_back(where + ": reward is not finite");
        if (!range_violations.empty()) throw InputError(range_violations.front());

        auto [it, inserted] = episode_index.emplace(run_name, traces.episodes.size());
        if (inserted) {
            Episode ep;
            ep.run_name = run_name;
            ep.kind = kind;
            traces.episodes.push_back(std::move(ep));
        }
        Episode& ep = traces.episodes[it->second];
        if (ep.kind != kind)
            throw InputError(where + ": episode '" + run_name + "' mixes kinds '" +
                             episode_kind_name(ep.kind) + "' and '" + kind_str + "'");
        if (!ep.steps.empty() && step.tick <= ep.steps.back().tick)
            throw InputError(where + ": episode '" + run_name + "': tick " +
                             std::to_string(step.tick) + " not greater than previous tick " +
                             std::to_string(ep.steps.back().tick));
        ep.steps.push_back(std::move(step));
    }

    if (traces.episodes.empty()) throw InputError("trace file has no episodes");
    return traces;
}

inline TraceSet read_traces_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open trace file: " + path);
    try {
        return read_traces(in);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

} // namespace rlrank
