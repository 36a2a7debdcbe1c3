#pragma once

#include <array>
#include <charconv>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "rlrank/domain_metrics.hpp"
#include "rlrank/reliability.hpp"

namespace rlrank {

// Shortest round-trip decimal form, for machine-readable CSV cells.
inline std::string format_shortest(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) return std::to_string(v);
    return std::string(buf.data(), ptr);
}

inline std::string format_fixed(double v, int decimals) {
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.*f", decimals, v);
    return std::string(buf.data());
}

namespace detail {

inline std::string render_csv(const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

// Column-aligned plain text: first column left-aligned, the rest right.
inline std::string render_text(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& row : rows) {
        if (width.size() < row.size()) width.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i)
            width[i] = std::max(width[i], row[i].size());
    }
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += "  ";
            if (i == 0) {
                out += row[i];
                out.append(width[i] - row[i].size(), ' ');
            } else {
                out.append(width[i] - row[i].size(), ' ');
                out += row[i];
            }
        }
        out += '\n';
    }
    return out;
}

// Rows ordered by final rank, ties broken by name for a stable layout.
template <class Table>
std::vector<std::string> row_order(const Table& table) {
    std::vector<std::string> names;
    for (const auto& [name, _] : table.rows) names.push_back(name);
    std::sort(names.begin(), names.end(), [&table](const std::string& a, const std::string& b) {
        int ra = table.rows.at(a).final_rank;
        int rb = table.rows.at(b).final_rank;
        if (ra != rb) return ra < rb;
        return a < b;
    });
    return names;
}

inline std::vector<std::vector<std::string>> domain_cells(const MetricTable& metrics,
                                                          const RankTable& ranks, bool full_precision) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"algorithm", "mean_reward", "state_coverage", "unified_coverage",
                    "best_sequences", "median_reward", "aggregate_rank", "rank"});
    for (const std::string& name : row_order(ranks)) {
        const MetricValues& m = metrics.at(name);
        const RankRow& r = ranks.rows.at(name);
        if (full_precision) {
            rows.push_back({name, format_shortest(m.mean_reward), format_shortest(m.state_coverage),
                            format_shortest(m.unified_coverage), format_shortest(m.best_sequence_pct),
                            format_shortest(m.median_reward), std::to_string(r.aggregate),
                            std::to_string(r.final_rank)});
        } else {
            rows.push_back({name, format_fixed(m.mean_reward, 3), format_fixed(m.state_coverage, 3),
                            format_fixed(m.unified_coverage, 3), format_fixed(m.best_sequence_pct, 2),
                            format_fixed(m.median_reward, 4), std::to_string(r.aggregate),
                            std::to_string(r.final_rank)});
        }
    }
    return rows;
}

inline std::vector<std::vector<std::string>> combined_cells(const CombinedRankTable& table,
                                                            bool full_precision) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"algorithm", "iqr_rank", "cvar_diff_rank", "cvar_drawdown_rank", "median_rank",
                    "reliability_rank_sum", "domain_aggregate", "overall_aggregate", "rank"});
    for (const std::string& name : row_order(table)) {
        const CombinedRow& r = table.rows.at(name);
        auto fmt = [full_precision](double v) {
            return full_precision ? format_shortest(v) : format_fixed(v, 1);
        };
        rows.push_back({name, fmt(r.reliability_ranks[0]), fmt(r.reliability_ranks[1]),
                        fmt(r.reliability_ranks[2]), fmt(r.reliability_ranks[3]),
                        fmt(r.reliability_rank_sum), std::to_string(r.domain_aggregate),
                        fmt(r.overall_aggregate), std::to_string(r.final_rank)});
    }
    return rows;
}

} // namespace detail

inline std::string domain_table_csv(const MetricTable& metrics, const RankTable& ranks) {
    return detail::render_csv(detail::domain_cells(metrics, ranks, /*full_precision=*/true));
}

inline std::string domain_table_text(const MetricTable& metrics, const RankTable& ranks) {
    return detail::render_text(detail::domain_cells(metrics, ranks, /*full_precision=*/false));
}

inline std::string combined_table_csv(const CombinedRankTable& table) {
    return detail::render_csv(detail::combined_cells(table, /*full_precision=*/true));
}

inline std::string combined_table_text(const CombinedRankTable& table) {
    return detail::render_text(detail::combined_cells(table, /*full_precision=*/false));
}

} // namespace rlrank
