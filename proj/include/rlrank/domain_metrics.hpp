#pragma once

#include <array>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rlrank/analysis.hpp"
#include "rlrank/ranking.hpp"
#include "rlrank/stats.hpp"

namespace rlrank {

// The five per-algorithm scores that feed the domain ranking, in table-column
// order. All are oriented so that bigger is better.
struct MetricValues {
    double mean_reward = 0.0;       // pooled over all training steps
    double state_coverage = 0.0;    // percent of valid states visited
    double unified_coverage = 0.0;  // blended state + pair coverage, percent
    double best_sequence_pct = 0.0; // percent of exploit sequences ending best
    double median_reward = 0.0;     // median exploit-episode mean reward

    double value(int metric) const {
        switch (metric) {
            case 0: return mean_reward;
            case 1: return state_coverage;
            case 2: return unified_coverage;
            case 3: return best_sequence_pct;
            case 4: return median_reward;
        }
        throw std::invalid_argument("MetricValues: metric index out of range");
    }
};

constexpr int kDomainMetricCount = 5;

inline const char* domain_metric_name(int metric) {
    switch (metric) {
        case 0: return "mean_reward";
        case 1: return "state_coverage";
        case 2: return "unified_coverage";
        case 3: return "best_sequences";
        case 4: return "median_reward";
    }
    throw std::invalid_argument("domain_metric_name: metric index out of range");
}

using MetricTable = std::map<std::string, MetricValues>;

// ---------------------------------------------------------------------------
// Individual metrics

// Percent of sequences that terminate in the best state.
inline double sequence_comparison_metric(const std::vector<SequenceRecord>& sequences) {
    if (sequences.empty()) throw InputError("sequence_comparison_metric: no sequences");
    long long best = 0;
    for (const SequenceRecord& s : sequences)
        if (s.is_best) ++best;
    return 100.0 * static_cast<double>(best) / static_cast<double>(sequences.size());
}

inline double median_mean_reward_metric(const std::vector<double>& exploit_episode_means) {
    if (exploit_episode_means.empty())
        throw InputError("median_mean_reward_metric: no exploit episodes");
    return median(exploit_episode_means);
}

inline double mean_reward_metric(const std::vector<DiscretizedEpisode>& train_episodes) {
    detail::require_steps(train_episodes, "mean_reward_metric");
    double acc = 0.0;
    long long n = 0;
    for (const DiscretizedEpisode& e : train_episodes)
        for (double r : e.rewards) {
            acc += r;
            ++n;
        }
    return acc / static_cast<double>(n);
}

inline double state_coverage_pct(long long visited_valid, long long valid_count) {
    if (valid_count <= 0) throw InputError("state_coverage: empty valid-state set");
    return 100.0 * static_cast<double>(visited_valid) / static_cast<double>(valid_count);
}

inline double state_coverage_metric(const std::vector<DiscretizedEpisode>& train_episodes,
                                    const std::vector<long long>& valid_states) {
    detail::require_steps(train_episodes, "state_coverage_metric");
    std::set<long long> visited;
    for (const DiscretizedEpisode& e : train_episodes)
        visited.insert(e.states.begin(), e.states.end());
    long long visited_valid = 0;
    for (long long s : visited)
        if (std::binary_search(valid_states.begin(), valid_states.end(), s)) ++visited_valid;
    return state_coverage_pct(visited_valid, static_cast<long long>(valid_states.size()));
}

// Blend of valid-state coverage and state-action pair coverage, where pair
// coverage charges each visited state a fixed candidate-action budget and
// saturates at 1.
inline double unified_coverage_pct(long long visited_valid, long long valid_count,
                                   long long visited_states, long long visited_pairs,
                                   int pair_budget, double weight) {
    if (valid_count <= 0) throw InputError("unified_coverage: empty valid-state set");
    if (pair_budget <= 0) throw std::invalid_argument("unified_coverage: budget must be positive");
    if (!(weight >= 0.0 && weight <= 1.0))
        throw std::invalid_argument("unified_coverage: weight outside [0, 1]");
    double state_frac = static_cast<double>(visited_valid) / static_cast<double>(valid_count);
    double pair_frac = visited_states == 0
                               ? 0.0
                               : std::min(1.0, static_cast<double>(visited_pairs) /
                                                       (static_cast<double>(visited_states) *
                                                        static_cast<double>(pair_budget)));
    return 100.0 * (weight * state_frac + (1.0 - weight) * pair_frac);
}

inline double unified_coverage_metric(const std::vector<DiscretizedEpisode>& train_episodes,
                                      const std::vector<long long>& valid_states, int pair_budget,
                                      double weight) {
    detail::require_steps(train_episodes, "unified_coverage_metric");
    std::set<long long> visited;
    std::set<std::pair<long long, long long>> pairs;
    for (const DiscretizedEpisode& e : train_episodes)
        for (std::size_t t = 0; t < e.states.size(); ++t) {
            visited.insert(e.states[t]);
            pairs.insert({e.states[t], e.actions[t]});
        }
    long long visited_valid = 0;
    for (long long s : visited)
        if (std::binary_search(valid_states.begin(), valid_states.end(), s)) ++visited_valid;
    return unified_coverage_pct(visited_valid, static_cast<long long>(valid_states.size()),
                                static_cast<long long>(visited.size()),
                                static_cast<long long>(pairs.size()), pair_budget, weight);
}

// Computes all five metrics for one algorithm's traces.
inline MetricValues domain_metrics(const TraceSet& traces, const AnalysisParams& params) {
    auto all = discretize_episodes(traces, params.binning);
    auto train = episodes_of_kind(all, EpisodeKind::Train);
    auto exploit = episodes_of_kind(all, EpisodeKind::Exploit);
    if (train.empty()) throw InputError("domain_metrics: no training episodes");
    if (exploit.empty()) throw InputError("domain_metrics: no exploit episodes");
    auto valid = params.valid_states();

    MetricValues m;
    m.mean_reward = mean_reward_metric(train);
    m.state_coverage = state_coverage_metric(train, valid);
    m.unified_coverage = unified_coverage_metric(train, valid, params.pair_budget,
                                                 params.unified_weight);
    m.best_sequence_pct =
            sequence_comparison_metric(extract_exploit_sequences(exploit, params.best_state));
    std::vector<double> exploit_means;
    for (const DiscretizedEpisode& e : exploit) exploit_means.push_back(mean(e.rewards));
    m.median_reward = median_mean_reward_metric(exploit_means);
    return m;
}

// ---------------------------------------------------------------------------
// Ranking

struct RankRow {
    std::array<int, kDomainMetricCount> metric_ranks{};
    int aggregate = 0;  // sum of the five per-metric ranks; lower is better
    int final_rank = 0; // dense rank of the aggregate
};

struct RankTable {
    std::map<std::string, RankRow> rows;
};

// Dense per-metric ranking; every metric is higher-is-better.
inline std::map<std::string, int> rank_by_metric(const std::map<std::string, double>& values) {
    if (values.size() < 2) throw InputError("rank_by_metric: need at least two algorithms");
    return dense_rank(values, /*higher_better=*/true);
}

// Sums per-metric ranks into an aggregate and dense-ranks the aggregates.
// Every algorithm must appear under every metric.
inline RankTable aggregate_ranking(
        const std::map<std::string, std::map<std::string, int>>& ranks_by_metric) {
    RankTable table;
    std::set<std::string> algorithms;
    for (int metric = 0; metric < kDomainMetricCount; ++metric) {
        auto it = ranks_by_metric.find(domain_metric_name(metric));
        if (it == ranks_by_metric.end())
            throw InputError(std::string("aggregate_ranking: missing metric '") +
                             domain_metric_name(metric) + "'");
        for (const auto& [name, _] : it->second) algorithms.insert(name);
    }
    for (const std::string& name : algorithms) {
        RankRow row;
        for (int metric = 0; metric < kDomainMetricCount; ++metric) {
            const auto& ranks = ranks_by_metric.at(domain_metric_name(metric));
            auto it = ranks.find(name);
            if (it == ranks.end())
                throw InputError("aggregate_ranking: algorithm '" + name +
                                 "' missing from metric '" + domain_metric_name(metric) + "'");
            row.metric_ranks[static_cast<std::size_t>(metric)] = it->second;
            row.aggregate += it->second;
        }
        table.rows[name] = row;
    }
    std::map<std::string, double> aggregates;
    for (const auto& [name, row] : table.rows)
        aggregates[name] = static_cast<double>(row.aggregate);
    auto finals = dense_rank(aggregates, /*higher_better=*/false);
    for (auto& [name, row] : table.rows) row.final_rank = finals.at(name);
    return table;
}

inline RankTable build_rank_table(const MetricTable& metrics) {
    if (metrics.size() < 2) throw InputError("build_rank_table: need at least two algorithms");
    std::map<std::string, std::map<std::string, int>> ranks_by_metric;
    for (int metric = 0; metric < kDomainMetricCount; ++metric) {
        std::map<std::string, double> values;
        for (const auto& [name, m] : metrics) values[name] = m.value(metric);
        ranks_by_metric[domain_metric_name(metric)] = rank_by_metric(values);
    }
    return aggregate_ranking(ranks_by_metric);
}

} // namespace rlrank
