#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace rlrank {

// Deterministic PRNG (splitmix64 core). std::mt19937 + distributions are not
// guaranteed to produce the same stream on every standard library, and trace
// files must be byte-reproducible across platforms, so we keep the whole
// generator in-house.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 1) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1), 53 bits of precision.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    // Uniform integer in [0, n). Modulo bias is ~n/2^64, irrelevant for the
    // small ranges used here (locations, agents, actions).
    std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

    bool bernoulli(double p) { return uniform() < p; }

    // Box-Muller transform; one fresh pair of uniforms per call so the
    // consumption pattern stays position-independent.
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        double u2 = uniform();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
        return mean + z * stddev;
    }

private:
    std::uint64_t state_;
};

// FNV-1a, used to derive per-stream seeds from run/variant names.
inline std::uint64_t hash64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Derives an independent stream seed from a base seed and a label hash.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
    Rng r(base ^ hash64(label));
    r.next_u64();
    return r.next_u64();
}

} // namespace rlrank
