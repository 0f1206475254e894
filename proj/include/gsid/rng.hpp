#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gsid {

/// Deterministic, platform-independent RNG built on splitmix64.
///
/// std::mt19937 plus the standard distributions would work, but the
/// distribution algorithms are implementation-defined; this keeps every
/// seeded artifact (scenes, bundles, training trajectories) bit-identical
/// across compilers and standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    /// Mixes a seed with one or more stream identifiers. Used to derive
    /// independent streams ("same seed, different purpose") without
    /// carrying mutable RNG state around.
    static uint64_t derive(uint64_t seed, uint64_t stream) {
        return mix(mix(seed) ^ stream);
    }
    static uint64_t derive(uint64_t seed, uint64_t a, uint64_t b) {
        return derive(derive(seed, a), b);
    }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix_raw(state_);
    }

    /// Uniform in [0, 1). 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    uint64_t uniform_int(uint64_t n) {
        // Rejection-free modulo is biased for huge n; all our n are tiny.
        return next_u64() % n;
    }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Gumbel(0, 1) sample: -log(-log(U)).
    double gumbel() {
        double u = uniform();
        if (u < 1e-300) u = 1e-300;
        return -std::log(-std::log(u));
    }

    /// Fisher-Yates shuffle of indices[0..n).
    template <typename T>
    void shuffle(T* data, size_t n) {
        for (size_t i = n; i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_int(i));
            std::swap(data[i - 1], data[j]);
        }
    }

private:
    static uint64_t mix(uint64_t x) { return mix_raw(x + 0x9e3779b97f4a7c15ull); }

    static uint64_t mix_raw(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    uint64_t state_;
};

} // namespace gsid
