#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rlrank/ranking.hpp"
#include "rlrank/stats.hpp"

namespace rlrank {

// First differences y'_t = y_{t+1} - y_t; removes the learning trend so the
// dispersion and risk measures see fluctuations, not improvement.
inline std::vector<double> detrend(const std::vector<double>& series) {
    if (series.size() < 2) throw InputError("detrend: need at least two points");
    std::vector<double> out;
    out.reserve(series.size() - 1);
    for (std::size_t i = 1; i < series.size(); ++i) out.push_back(series[i] - series[i - 1]);
    return out;
}

// IQR of the detrended series over `windows` contiguous segments (remainder
// goes to the last one). One value per window; lower means steadier training.
inline std::vector<double> iqr_dispersion(const std::vector<double>& series, int windows = 3) {
    if (windows <= 0) throw std::invalid_argument("iqr_dispersion: windows must be positive");
    if (series.size() < 2 * static_cast<std::size_t>(windows))
        throw InputError("iqr_dispersion: series of length " + std::to_string(series.size()) +
                         " too short for " + std::to_string(windows) + " windows");
    std::vector<double> diffs = detrend(series);
    std::size_t base = diffs.size() / static_cast<std::size_t>(windows);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(windows));
    std::size_t begin = 0;
    for (int w = 0; w < windows; ++w) {
        std::size_t end = (w == windows - 1) ? diffs.size() : begin + base;
        std::vector<double> segment(diffs.begin() + static_cast<long>(begin),
                                    diffs.begin() + static_cast<long>(end));
        out.push_back(quantile(segment, 0.75) - quantile(std::move(segment), 0.25));
        begin = end;
    }
    return out;
}

// Mean of the values at or below the alpha-quantile (linear interpolation):
// the expected outcome across the worst alpha tail.
inline double cvar(const std::vector<double>& values, double alpha = 0.05) {
    if (values.empty()) throw InputError("cvar: empty input");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("cvar: alpha outside (0, 1)");
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    double cutoff = quantile_sorted(sorted, alpha);
    auto end = std::upper_bound(sorted.begin(), sorted.end(), cutoff);
    if (end == sorted.begin()) return sorted.front();
    double acc = 0.0;
    for (auto it = sorted.begin(); it != end; ++it) acc += *it;
    return acc / static_cast<double>(end - sorted.begin());
}

// Short-horizon risk: CVaR of the step-to-step differences. Most negative
// when the curve takes large single-step drops.
inline double cvar_on_differences(const std::vector<double>& series, double alpha = 0.05) {
    return cvar(detrend(series), alpha);
}

// Drop from the running maximum at each point; zero while the series sits at
// a fresh peak.
inline std::vector<double> drawdown(const std::vector<double>& series) {
    if (series.empty()) throw InputError("drawdown: empty input");
    std::vector<double> out;
    out.reserve(series.size());
    double peak = series.front();
    for (double v : series) {
        peak = std::max(peak, v);
        out.push_back(peak - v);
    }
    return out;
}

// Long-horizon risk: CVaR of the negated drawdowns, so deep valleys below the
// running peak pull the score down.
inline double cvar_on_drawdown(const std::vector<double>& series, double alpha = 0.05) {
    std::vector<double> neg = drawdown(series);
    for (double& v : neg) v = -v;
    return cvar(neg, alpha);
}

inline double median_performance(const std::vector<double>& series) {
    if (series.empty()) throw InputError("median_performance: empty input");
    return median(series);
}

// ---------------------------------------------------------------------------
// Per-algorithm reliability scores and the combined ranking

struct ReliabilityScores {
    std::vector<double> iqr_windows;   // lower is better
    double cvar_diff = 0.0;            // higher is better
    double cvar_drawdown = 0.0;        // higher is better
    double median_perf = 0.0;          // higher is better

    double iqr_mean() const {
        if (iqr_windows.empty()) throw InputError("ReliabilityScores: no IQR windows");
        return mean(iqr_windows);
    }
};

// Scores one algorithm's training curve (per-episode mean rewards, in episode
// order).
inline ReliabilityScores reliability_scores(const std::vector<double>& train_curve,
                                            double alpha = 0.05, int windows = 3) {
    ReliabilityScores s;
    s.iqr_windows = iqr_dispersion(train_curve, windows);
    s.cvar_diff = cvar_on_differences(train_curve, alpha);
    s.cvar_drawdown = cvar_on_drawdown(train_curve, alpha);
    s.median_perf = median_performance(train_curve);
    return s;
}

constexpr int kReliabilityMetricCount = 4;

inline const char* reliability_metric_name(int metric) {
    switch (metric) {
        case 0: return "iqr_dispersion";
        case 1: return "cvar_differences";
        case 2: return "cvar_drawdown";
        case 3: return "median_performance";
    }
    throw std::invalid_argument("reliability_metric_name: metric index out of range");
}

// Tie-averaged ordinal ranks per reliability metric. Note the deliberate
// asymmetry with the domain table, which uses dense ranks: here four
// algorithms tied at the bottom of an 8-row table share rank 6.5.
inline std::map<std::string, std::array<double, kReliabilityMetricCount>> rank_reliability(
        const std::map<std::string, ReliabilityScores>& scores) {
    if (scores.size() < 2) throw InputError("rank_reliability: need at least two algorithms");
    std::map<std::string, double> iqr, diff, draw, med;
    for (const auto& [name, s] : scores) {
        iqr[name] = s.iqr_mean();
        diff[name] = s.cvar_diff;
        draw[name] = s.cvar_drawdown;
        med[name] = s.median_perf;
    }
    auto iqr_r = fractional_rank(iqr, /*higher_better=*/false);
    auto diff_r = fractional_rank(diff, /*higher_better=*/true);
    auto draw_r = fractional_rank(draw, /*higher_better=*/true);
    auto med_r = fractional_rank(med, /*higher_better=*/true);
    std::map<std::string, std::array<double, kReliabilityMetricCount>> out;
    for (const auto& [name, _] : scores)
        out[name] = {iqr_r.at(name), diff_r.at(name), draw_r.at(name), med_r.at(name)};
    return out;
}

struct CombinedRow {
    std::array<double, kReliabilityMetricCount> reliability_ranks{};
    double reliability_rank_sum = 0.0;
    int domain_aggregate = 0;       // the domain table's aggregate rank
    double overall_aggregate = 0.0; // reliability_rank_sum + domain_aggregate
    int final_rank = 0;             // dense rank of overall_aggregate
};

struct CombinedRankTable {
    std::map<std::string, CombinedRow> rows;
};

// Folds the four reliability ranks and the domain aggregate into one final
// ordering. Both inputs must cover exactly the same algorithms.
inline CombinedRankTable combine_rankings(
        const std::map<std::string, std::array<double, kReliabilityMetricCount>>& reliability_ranks,
        const std::map<std::string, int>& domain_aggregates) {
    std::vector<std::string> only_reliability, only_domain;
    for (const auto& [name, _] : reliability_ranks)
        if (!domain_aggregates.count(name)) only_reliability.push_back(name);
    for (const auto& [name, _] : domain_aggregates)
        if (!reliability_ranks.count(name)) only_domain.push_back(name);
    if (!only_reliability.empty() || !only_domain.empty()) {
        std::string msg = "combine_rankings: algorithm sets differ;";
        for (const std::string& n : only_reliability) msg += " '" + n + "' lacks a domain aggregate;";
        for (const std::string& n : only_domain) msg += " '" + n + "' lacks reliability ranks;";
        throw InputError(msg);
    }
    CombinedRankTable table;
    for (const auto& [name, ranks] : reliability_ranks) {
        CombinedRow row;
        row.reliability_ranks = ranks;
        for (double r : ranks) row.reliability_rank_sum += r;
        row.domain_aggregate = domain_aggregates.at(name);
        row.overall_aggregate = row.reliability_rank_sum + row.domain_aggregate;
        table.rows[name] = row;
    }
    std::map<std::string, double> overall;
    for (const auto& [name, row] : table.rows) overall[name] = row.overall_aggregate;
    auto finals = dense_rank(overall, /*higher_better=*/false);
    for (auto& [name, row] : table.rows) row.final_rank = finals.at(name);
    return table;
}

} // namespace rlrank
