#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rlrank/errors.hpp"

namespace rlrank {

namespace detail {

inline std::vector<std::pair<double, std::string>> sorted_entries(
        const std::map<std::string, double>& values, bool higher_better) {
    std::vector<std::pair<double, std::string>> entries;
    entries.reserve(values.size());
    for (const auto& [name, value] : values) entries.emplace_back(value, name);
    std::sort(entries.begin(), entries.end(), [higher_better](const auto& a, const auto& b) {
        if (a.first != b.first) return higher_better ? a.first > b.first : a.first < b.first;
        return a.second < b.second;
    });
    return entries;
}

} // namespace detail

// Dense ranking: the best value gets rank 1, equal values share a rank, and
// the next distinct value gets the previous rank plus one (no gaps).
inline std::map<std::string, int> dense_rank(const std::map<std::string, double>& values,
                                             bool higher_better) {
    auto entries = detail::sorted_entries(values, higher_better);
    std::map<std::string, int> out;
    int rank = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i == 0 || entries[i].first != entries[i - 1].first) ++rank;
        out[entries[i].second] = rank;
    }
    return out;
}

// Tie-averaged ordinal ranking: tied values share the mean of the ordinal
// positions they occupy, so four entries tied for positions 5..8 all get 6.5.
inline std::map<std::string, double> fractional_rank(const std::map<std::string, double>& values,
                                                     bool higher_better) {
    auto entries = detail::sorted_entries(values, higher_better);
    std::map<std::string, double> out;
    std::size_t i = 0;
    while (i < entries.size()) {
        std::size_t j = i;
        while (j + 1 < entries.size() && entries[j + 1].first == entries[i].first) ++j;
        // Positions are 1-based; the run spans positions i+1 .. j+1.
        double shared = static_cast<double>(i + 1 + j + 1) / 2.0;
        for (std::size_t k = i; k <= j; ++k) out[entries[k].second] = shared;
        i = j + 1;
    }
    return out;
}

} // namespace rlrank
