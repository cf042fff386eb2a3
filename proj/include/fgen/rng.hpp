/**
 * rng.hpp — Deterministic splittable PRNG for reproducible simulation.
 *
 * SplitMix64 core with a hash-combine based stream derivation: every
 * (seed, label...) tuple names an independent stream, so parallel workers
 * can draw without sharing state and results never depend on scheduling.
 *
 * std::normal_distribution is implementation-defined, so Gaussian samples
 * go through an explicit Box-Muller transform instead.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace fgen {

/** Finalizer of SplitMix64: full-avalanche 64-bit mix. */
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/** Absorb one word into a running hash (order-sensitive). */
inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL;
    return mix64(h);
}

/**
 * SplitMix64 generator. Streams derived from distinct label paths are
 * statistically independent for all practical purposes.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix64(seed)) {}

    /** Independent stream named by (seed, labels...). */
    static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) {
        std::uint64_t h = mix64(seed);
        for (std::uint64_t v : labels) h = hash_combine(h, v);
        return Rng(FromState{}, h);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /** Uniform double in [0, 1), 53-bit resolution. */
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + next_double() * (b - a); }

    bool bernoulli(double p) { return next_double() < p; }

    /** Uniform integer in [0, n), n ≥ 1. Rejection-free modulo is fine here:
     *  n is tiny (class counts, support sizes), so bias is < 2^-59. */
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    /** Standard normal via Box-Muller; second deviate is cached. */
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925287;
        spare_ = r * std::sin(two_pi * u2);
        has_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

private:
    struct FromState {};
    Rng(FromState, std::uint64_t state) : state_(state) {}

    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace fgen
