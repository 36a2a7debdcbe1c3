#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rlrank/discretize.hpp"
#include "rlrank/stats.hpp"
#include "rlrank/trace.hpp"

namespace rlrank {

// Everything the analyses need to know besides the traces themselves.
struct AnalysisParams {
    BinningSpec binning = BinningSpec::defaults();
    ValidityMask validity = ValidityMask::defaults();
    double gamma = 0.95;          // discount for empirical returns
    double reward_k = 1.0;        // sigma multiplier for high/low reward pairs
    double certain_max = 0.25;    // action dispersion at or below -> certain state
    double uncertain_min = 0.75;  // action dispersion at or above -> uncertain state
    double p_min = 0.1;           // minimum accumulated probability for sequence targets
    int max_seq_len = 10;         // maximum transitions per planned sequence
    long long best_state = 0;     // the all-low state every sequence wants to end in
    int pair_budget = 8;          // candidate actions per state for pair coverage
    double unified_weight = 0.5;  // weight of state coverage in unified coverage

    std::vector<long long> valid_states() const {
        return enumerate_valid(validity, binning.state_radices());
    }
};

// One episode reduced to index sequences; element t of each vector belongs to
// the same recorded step.
struct DiscretizedEpisode {
    std::string run_name;
    EpisodeKind kind = EpisodeKind::Train;
    std::vector<long long> states;
    std::vector<long long> actions;
    std::vector<double> rewards;
};

inline std::vector<DiscretizedEpisode> discretize_episodes(const TraceSet& traces,
                                                           const BinningSpec& spec) {
    std::vector<DiscretizedEpisode> out;
    out.reserve(traces.episodes.size());
    for (const Episode& ep : traces.episodes) {
        DiscretizedEpisode d;
        d.run_name = ep.run_name;
        d.kind = ep.kind;
        d.states.reserve(ep.steps.size());
        d.actions.reserve(ep.steps.size());
        d.rewards.reserve(ep.steps.size());
        for (const Step& step : ep.steps) {
            auto [s, a] = discretize_step(step, spec);
            d.states.push_back(s);
            d.actions.push_back(a);
            d.rewards.push_back(step.reward);
        }
        out.push_back(std::move(d));
    }
    return out;
}

inline std::vector<DiscretizedEpisode> episodes_of_kind(const std::vector<DiscretizedEpisode>& all,
                                                        EpisodeKind kind) {
    std::vector<DiscretizedEpisode> out;
    for (const DiscretizedEpisode& e : all)
        if (e.kind == kind) out.push_back(e);
    return out;
}

namespace detail {

inline void require_steps(const std::vector<DiscretizedEpisode>& episodes, const char* op) {
    for (const DiscretizedEpisode& e : episodes)
        if (!e.states.empty()) return;
    throw InputError(std::string(op) + ": no steps to analyze");
}

} // namespace detail

// ---------------------------------------------------------------------------
// State frequency

struct StateFrequencyResult {
    std::map<long long, long long> state_counts;
    long long total_steps = 0;
    double coverage = 0.0;   // |visited ∩ valid| / |valid|
    double dispersion = 0.0; // entropy of visit counts over log(#visited)
    std::vector<long long> frequent;   // count >= mean + stddev
    std::vector<long long> infrequent; // count <= max(1, mean - stddev)
};

inline StateFrequencyResult state_frequency_analysis(
        const std::vector<DiscretizedEpisode>& episodes,
        const std::vector<long long>& valid_states) {
    detail::require_steps(episodes, "state_frequency_analysis");
    if (valid_states.empty())
        throw InputError("state_frequency_analysis: empty valid-state set");
    StateFrequencyResult res;
    for (const DiscretizedEpisode& e : episodes)
        for (long long s : e.states) {
            ++res.state_counts[s];
            ++res.total_steps;
        }

    long long visited_valid = 0;
    for (const auto& [s, _] : res.state_counts)
        if (std::binary_search(valid_states.begin(), valid_states.end(), s)) ++visited_valid;
    res.coverage = static_cast<double>(visited_valid) / static_cast<double>(valid_states.size());

    std::vector<long long> counts;
    counts.reserve(res.state_counts.size());
    for (const auto& [_, c] : res.state_counts) counts.push_back(c);
    res.dispersion = normalized_entropy(counts, 1.0);

    std::vector<double> counts_d(counts.begin(), counts.end());
    double mu = mean(counts_d);
    double sigma = population_stddev(counts_d);
    double hi = mu + sigma;
    double lo = std::max(1.0, mu - sigma);
    for (const auto& [s, c] : res.state_counts) {
        if (static_cast<double>(c) >= hi) res.frequent.push_back(s);
        if (static_cast<double>(c) <= lo) res.infrequent.push_back(s);
    }
    return res;
}

// ---------------------------------------------------------------------------
// State-action frequency

struct StateActionFrequencyResult {
    std::map<std::pair<long long, long long>, long long> pair_counts;
    long long total_steps = 0;
    double pair_coverage = 0.0; // min(1, pairs / (visited states * budget))
    std::map<long long, double> action_dispersion; // per visited state
    double mean_dispersion = 0.0;
    std::vector<long long> certain;   // dispersion <= certain_max
    std::vector<long long> uncertain; // dispersion >= uncertain_min
};

inline StateActionFrequencyResult state_action_frequency_analysis(
        const std::vector<DiscretizedEpisode>& episodes, int pair_budget, double certain_max,
        double uncertain_min) {
    detail::require_steps(episodes, "state_action_frequency_analysis");
    if (pair_budget <= 0)
        throw std::invalid_argument("state_action_frequency_analysis: pair budget must be positive");
    StateActionFrequencyResult res;
    std::map<long long, std::map<long long, long long>> per_state;
    for (const DiscretizedEpisode& e : episodes)
        for (std::size_t t = 0; t < e.states.size(); ++t) {
            ++res.pair_counts[{e.states[t], e.actions[t]}];
            ++per_state[e.states[t]][e.actions[t]];
            ++res.total_steps;
        }

    double denom = static_cast<double>(per_state.size()) * static_cast<double>(pair_budget);
    res.pair_coverage = std::min(1.0, static_cast<double>(res.pair_counts.size()) / denom);

    double acc = 0.0;
    for (const auto& [s, actions] : per_state) {
        std::vector<long long> counts;
        counts.reserve(actions.size());
        for (const auto& [_, c] : actions) counts.push_back(c);
        // A state with a single observed action is perfectly decided: 0.
        double d = normalized_entropy(counts, 0.0);
        res.action_dispersion[s] = d;
        acc += d;
        if (d <= certain_max) res.certain.push_back(s);
        if (d >= uncertain_min) res.uncertain.push_back(s);
    }
    res.mean_dispersion = acc / static_cast<double>(per_state.size());
    return res;
}

// ---------------------------------------------------------------------------
// Reward analysis

struct RewardAnalysisResult {
    std::map<std::pair<long long, long long>, double> pair_mean_reward;
    // Pairs whose mean reward is strictly beyond mean ± k·stddev of all pair
    // means; both empty when every pair earns the same.
    std::vector<std::pair<long long, long long>> high;
    std::vector<std::pair<long long, long long>> low;
};

inline RewardAnalysisResult reward_analysis(const std::vector<DiscretizedEpisode>& episodes,
                                            double k) {
    detail::require_steps(episodes, "reward_analysis");
    RewardAnalysisResult res;
    std::map<std::pair<long long, long long>, std::pair<double, long long>> acc;
    for (const DiscretizedEpisode& e : episodes)
        for (std::size_t t = 0; t < e.states.size(); ++t) {
            auto& slot = acc[{e.states[t], e.actions[t]}];
            slot.first += e.rewards[t];
            ++slot.second;
        }
    std::vector<double> means;
    means.reserve(acc.size());
    for (const auto& [pair, sum_count] : acc) {
        double m = sum_count.first / static_cast<double>(sum_count.second);
        res.pair_mean_reward[pair] = m;
        means.push_back(m);
    }
    double mu = mean(means);
    double sigma = population_stddev(means);
    for (const auto& [pair, m] : res.pair_mean_reward) {
        if (m > mu + k * sigma) res.high.push_back(pair);
        if (m < mu - k * sigma) res.low.push_back(pair);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Empirical model (transition counts, Q, V)

struct EmpiricalModel {
    double gamma = 0.95;
    // (state, action) -> successor state -> observed count. A pair's last
    // occurrence in an episode has no successor and contributes no row entry.
    std::map<std::pair<long long, long long>, std::map<long long, long long>> transition_counts;
    // (state, action) -> number of occurrences (including episode-final ones).
    std::map<std::pair<long long, long long>, long long> pair_visits;
    // Monte-Carlo estimates: mean discounted return from each occurrence.
    std::map<std::pair<long long, long long>, double> q_table;
    // v(s) = max over observed actions of q(s, a).
    std::map<long long, double> v_table;

    std::vector<long long> successors(long long state) const {
        std::set<long long> out;
        for (const auto& [pair, row] : transition_counts) {
            if (pair.first != state) continue;
            for (const auto& [next, _] : row) out.insert(next);
        }
        return {out.begin(), out.end()};
    }
};

inline EmpiricalModel build_empirical_model(const std::vector<DiscretizedEpisode>& episodes,
                                            double gamma) {
    detail::require_steps(episodes, "build_empirical_model");
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("build_empirical_model: gamma outside [0, 1]");
    EmpiricalModel model;
    model.gamma = gamma;
    std::map<std::pair<long long, long long>, double> return_sums;
    for (const DiscretizedEpisode& e : episodes) {
        std::size_t n = e.states.size();
        if (n == 0) continue;
        // Backward pass: G_t = r_t + gamma * G_{t+1}.
        std::vector<double> returns(n, 0.0);
        double g = 0.0;
        for (std::size_t t = n; t-- > 0;) {
            g = e.rewards[t] + gamma * g;
            returns[t] = g;
        }
        for (std::size_t t = 0; t < n; ++t) {
            std::pair<long long, long long> pair{e.states[t], e.actions[t]};
            ++model.pair_visits[pair];
            return_sums[pair] += returns[t];
            if (t + 1 < n) ++model.transition_counts[pair][e.states[t + 1]];
        }
    }
    for (const auto& [pair, sum] : return_sums) {
        double q = sum / static_cast<double>(model.pair_visits[pair]);
        model.q_table[pair] = q;
        auto [it, inserted] = model.v_table.emplace(pair.first, q);
        if (!inserted) it->second = std::max(it->second, q);
    }
    return model;
}

// ---------------------------------------------------------------------------
// Local extrema over the empirical transition graph

struct ExtremaReport {
    std::vector<long long> local_maxima;
    std::vector<long long> local_minima;
};

// A state is a local maximum when its value strictly beats the value of every
// observed successor other than itself, and symmetrically for minima. States
// with no successors besides themselves are neither: there is nothing to
// compare against in either direction.
inline ExtremaReport transition_value_analysis(const EmpiricalModel& model) {
    ExtremaReport report;
    std::set<long long> states;
    for (const auto& [pair, _] : model.transition_counts) states.insert(pair.first);
    for (long long s : states) {
        auto v_it = model.v_table.find(s);
        if (v_it == model.v_table.end()) continue;
        double v = v_it->second;
        bool is_max = true;
        bool is_min = true;
        bool has_distinct = false;
        for (long long next : model.successors(s)) {
            if (next == s) continue;
            auto nv_it = model.v_table.find(next);
            if (nv_it == model.v_table.end()) continue;
            has_distinct = true;
            if (!(v > nv_it->second)) is_max = false;
            if (!(v < nv_it->second)) is_min = false;
        }
        if (!has_distinct) continue;
        if (is_max) report.local_maxima.push_back(s);
        if (is_min) report.local_minima.push_back(s);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Sequences

// A chain alternates state and action indices and always ends on a state:
// s0, a0, s1, a1, ..., sk.
struct SequenceRecord {
    std::string run_name;
    std::vector<long long> chain;
    double reach_probability = 1.0;
    bool is_best = false;     // final state is the designated best state
    bool unreachable = false; // no maximum was reachable from the start
};

// From each local minimum, walks the most likely path (most frequent action,
// then most probable successor, lower index on ties) and targets the local
// maximum with the largest accumulated-probability × value product among
// those reached with probability >= p_min. The walk stops at max_len
// transitions, at a dead end, or when the likeliest successor is the current
// state itself.
inline std::vector<SequenceRecord> sequence_analysis(const EmpiricalModel& model,
                                                     const ExtremaReport& extrema, double p_min,
                                                     int max_len, long long best_state) {
    if (max_len <= 0) throw std::invalid_argument("sequence_analysis: max_len must be positive");
    std::set<long long> maxima(extrema.local_maxima.begin(), extrema.local_maxima.end());
    std::vector<SequenceRecord> out;
    for (long long start : extrema.local_minima) {
        struct Candidate {
            long long state;
            double prob;
            double value;
            std::size_t chain_len; // chain prefix length including this state
        };
        std::vector<Candidate> candidates;
        std::vector<long long> chain{start};
        double prob = 1.0;
        long long current = start;
        for (int hop = 0; hop < max_len; ++hop) {
            // Most frequent action among those observed in `current`.
            long long best_action = -1;
            long long best_action_count = -1;
            for (const auto& [pair, count] : model.pair_visits) {
                if (pair.first != current) continue;
                if (count > best_action_count ||
                    (count == best_action_count && pair.second < best_action)) {
                    best_action = pair.second;
                    best_action_count = count;
                }
            }
            if (best_action < 0) break;
            auto row_it = model.transition_counts.find({current, best_action});
            if (row_it == model.transition_counts.end() || row_it->second.empty()) break;
            long long row_total = 0;
            for (const auto& [_, c] : row_it->second) row_total += c;
            long long next = -1;
            long long next_count = -1;
            for (const auto& [succ, c] : row_it->second) {
                if (c > next_count) {
                    next = succ;
                    next_count = c;
                }
            }
            if (next == current) break; // likeliest move is to stay put
            prob *= static_cast<double>(next_count) / static_cast<double>(row_total);
            chain.push_back(best_action);
            chain.push_back(next);
            current = next;
            if (maxima.count(current) && prob >= p_min) {
                auto v_it = model.v_table.find(current);
                double v = v_it == model.v_table.end() ? 0.0 : v_it->second;
                candidates.push_back({current, prob, v, chain.size()});
            }
        }

        SequenceRecord rec;
        rec.run_name = "Planned-from-" + std::to_string(start);
        if (candidates.empty()) {
            rec.chain = {start};
            rec.reach_probability = 0.0;
            rec.unreachable = true;
        } else {
            const Candidate* best = &candidates.front();
            for (const Candidate& c : candidates) {
                double lhs = c.prob * c.value;
                double rhs = best->prob * best->value;
                if (lhs > rhs || (lhs == rhs && c.state < best->state)) best = &c;
            }
            rec.chain.assign(chain.begin(), chain.begin() + static_cast<long>(best->chain_len));
            rec.reach_probability = best->prob;
            rec.is_best = best->state == best_state;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

// One sequence per exploit episode: consecutive repeats of a state collapse
// into one chain entry whose action is the one executed when the state was
// first entered in that stretch.
inline std::vector<SequenceRecord> extract_exploit_sequences(
        const std::vector<DiscretizedEpisode>& exploit_episodes, long long best_state) {
    std::vector<SequenceRecord> out;
    for (const DiscretizedEpisode& e : exploit_episodes) {
        if (e.states.empty()) continue;
        std::vector<std::pair<long long, long long>> stretches; // (state, first action)
        for (std::size_t t = 0; t < e.states.size(); ++t)
            if (stretches.empty() || e.states[t] != stretches.back().first)
                stretches.emplace_back(e.states[t], e.actions[t]);
        SequenceRecord rec;
        rec.run_name = e.run_name;
        for (std::size_t i = 0; i < stretches.size(); ++i) {
            rec.chain.push_back(stretches[i].first);
            if (i + 1 < stretches.size()) rec.chain.push_back(stretches[i].second);
        }
        rec.reach_probability = 1.0;
        rec.is_best = stretches.back().first == best_state;
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace rlrank
