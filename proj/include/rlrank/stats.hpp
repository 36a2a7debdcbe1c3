#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rlrank/errors.hpp"

namespace rlrank {

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean: empty input");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Linearly interpolated quantile over a pre-sorted sample: rank (n-1)*q sits
// between two order statistics and is blended by its fractional part.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile: empty input");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0, 1]");
    if (sorted.size() == 1) return sorted.front();
    double pos = q * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    if (lo >= sorted.size() - 1) return sorted.back();
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, q);
}

inline double median(std::vector<double> v) {
    return quantile(std::move(v), 0.5);
}

// Population standard deviation (divide by n, not n-1).
inline double population_stddev(const std::vector<double>& v) {
    double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

// Shannon entropy of a count distribution normalized by log(k) where k is the
// number of nonzero categories; returns `value_when_single` when fewer than
// two categories carry mass (the ratio is 0/0 there).
inline double normalized_entropy(const std::vector<long long>& counts, double value_when_single) {
    long long total = 0;
    int categories = 0;
    for (long long c : counts) {
        if (c < 0) throw std::invalid_argument("normalized_entropy: negative count");
        if (c > 0) {
            total += c;
            ++categories;
        }
    }
    if (categories <= 1) return value_when_single;
    double h = 0.0;
    for (long long c : counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log(p);
    }
    double norm = h / std::log(static_cast<double>(categories));
    return std::clamp(norm, 0.0, 1.0);
}

} // namespace rlrank
