#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rlrank/errors.hpp"
#include "rlrank/trace.hpp"

namespace rlrank {

// Per-component bin edges for observations and actions. A component with
// edges {e0, ..., en} has n bins: [e0,e1), [e1,e2), ..., [e_{n-1}, e_n] with
// the last bin closed on the right so the domain maximum stays inside.
struct BinningSpec {
    std::vector<std::vector<double>> state_edges;
    std::vector<std::vector<double>> action_edges;

    // Observations are three population fractions binned finely near zero
    // (epidemic-relevant resolution); the eight action knobs share one coarse
    // low/medium/high split of their [0, 7] range.
    static BinningSpec defaults() {
        BinningSpec spec;
        spec.state_edges.assign(3, {0.0, 0.05, 0.10, 0.15, 0.20, 1.0});
        spec.action_edges.assign(8, {0.0, 2.5, 5.0, 7.0});
        return spec;
    }

    std::vector<int> state_radices() const { return radices_of(state_edges); }
    std::vector<int> action_radices() const { return radices_of(action_edges); }

    void validate() const {
        validate_edges(state_edges, "state");
        validate_edges(action_edges, "action");
    }

private:
    static std::vector<int> radices_of(const std::vector<std::vector<double>>& edges) {
        std::vector<int> out;
        out.reserve(edges.size());
        for (const auto& e : edges) out.push_back(static_cast<int>(e.size()) - 1);
        return out;
    }

    static void validate_edges(const std::vector<std::vector<double>>& edges, const char* what) {
        if (edges.empty()) throw InputError(std::string(what) + " edges: no components");
        for (std::size_t c = 0; c < edges.size(); ++c) {
            const auto& e = edges[c];
            if (e.size() < 2)
                throw InputError(std::string(what) + " edges, component " + std::to_string(c) +
                                 ": need at least two edges");
            for (std::size_t i = 1; i < e.size(); ++i)
                if (!(e[i] > e[i - 1]))
                    throw InputError(std::string(what) + " edges, component " + std::to_string(c) +
                                     ": edges must be strictly increasing");
        }
    }
};

inline long long index_space_size(const std::vector<int>& radices) {
    long long total = 1;
    for (int r : radices) {
        if (r <= 0) throw std::invalid_argument("index space: radix must be positive");
        total *= r;
    }
    return total;
}

// Maps a value to its bin in one component. Values outside [first, last] are
// recording errors; the last bin is closed on the right.
inline int bin_component(double value, const std::vector<double>& edges,
                         const std::string& name = "value") {
    if (edges.size() < 2) throw std::invalid_argument("bin_component: need at least two edges");
    if (!(value >= edges.front() && value <= edges.back())) {
        std::ostringstream msg;
        msg << name << ": " << value << " outside [" << edges.front() << ", " << edges.back() << "]";
        throw InputError(msg.str());
    }
    auto it = std::upper_bound(edges.begin(), edges.end(), value);
    int bin = static_cast<int>(it - edges.begin()) - 1;
    int last = static_cast<int>(edges.size()) - 2;
    return std::min(bin, last);
}

// Mixed-radix, big-endian: the first component is the most significant digit.
inline long long encode(const std::vector<int>& bins, const std::vector<int>& radices) {
    if (bins.size() != radices.size())
        throw std::invalid_argument("encode: bins and radices differ in length");
    long long index = 0;
    for (std::size_t i = 0; i < bins.size(); ++i) {
        if (bins[i] < 0 || bins[i] >= radices[i])
            throw std::invalid_argument("encode: bin " + std::to_string(bins[i]) +
                                        " out of range for radix " + std::to_string(radices[i]) +
                                        " at component " + std::to_string(i));
        index = index * radices[i] + bins[i];
    }
    return index;
}

inline std::vector<int> decode(long long index, const std::vector<int>& radices) {
    long long total = index_space_size(radices);
    if (index < 0 || index >= total)
        throw std::invalid_argument("decode: index " + std::to_string(index) +
                                    " outside [0, " + std::to_string(total) + ")");
    std::vector<int> bins(radices.size(), 0);
    for (std::size_t i = radices.size(); i-- > 0;) {
        bins[i] = static_cast<int>(index % radices[i]);
        index /= radices[i];
    }
    return bins;
}

// Discretizes one recorded step into (state index, action index).
inline std::pair<long long, long long> discretize_step(const Step& step, const BinningSpec& spec) {
    if (step.observation.size() != spec.state_edges.size())
        throw InputError("discretize_step: observation has " +
                         std::to_string(step.observation.size()) + " components, binning expects " +
                         std::to_string(spec.state_edges.size()));
    if (step.action.size() != spec.action_edges.size())
        throw InputError("discretize_step: action has " + std::to_string(step.action.size()) +
                         " components, binning expects " + std::to_string(spec.action_edges.size()));
    std::vector<int> sbins(step.observation.size());
    for (std::size_t i = 0; i < step.observation.size(); ++i)
        sbins[i] = bin_component(step.observation[i], spec.state_edges[i],
                                 "observation[" + std::to_string(i) + "]");
    std::vector<int> abins(step.action.size());
    for (std::size_t i = 0; i < step.action.size(); ++i)
        abins[i] = bin_component(step.action[i], spec.action_edges[i],
                                 "action[" + std::to_string(i) + "]");
    return {encode(sbins, spec.state_radices()), encode(abins, spec.action_radices())};
}

// Enumerates the state indices whose bin vector satisfies a predicate, in
// increasing index order.
template <class Pred>
std::vector<long long> enumerate_valid_if(const std::vector<int>& radices, Pred&& pred) {
    long long total = index_space_size(radices);
    std::vector<long long> out;
    for (long long idx = 0; idx < total; ++idx)
        if (pred(decode(idx, radices))) out.push_back(idx);
    return out;
}

// Config-expressible validity predicate: per-component upper bounds on the
// bin index. The default caps the hospitalized-fraction component at bin 1
// (10% hospital capacity makes higher occupancy unrecordable).
struct ValidityMask {
    std::map<int, int> max_bin; // component index -> highest allowed bin

    static ValidityMask defaults() { return ValidityMask{{{1, 1}}}; }

    bool allows(const std::vector<int>& bins) const {
        for (const auto& [component, cap] : max_bin) {
            if (component < 0 || component >= static_cast<int>(bins.size()))
                throw std::invalid_argument("validity mask: component " + std::to_string(component) +
                                            " out of range");
            if (bins[component] > cap) return false;
        }
        return true;
    }
};

inline std::vector<long long> enumerate_valid(const ValidityMask& mask,
                                              const std::vector<int>& radices) {
    return enumerate_valid_if(radices, [&mask](const std::vector<int>& bins) {
        return mask.allows(bins);
    });
}

} // namespace rlrank
