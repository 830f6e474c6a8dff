#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "cogrel/error.hpp"

namespace cogrel {

constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ull;

// SplitMix64 step (Vigna). Used only to derive well-separated seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += kGolden64);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derives a substream seed for (run, agent, purpose) from a root seed.
// Pure arithmetic: the mapping is identical on every platform, so a
// given (seed, run, agent) always replays the same draw sequence.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t run,
                                 std::uint64_t agent, std::uint64_t purpose) {
    std::uint64_t s = root;
    std::uint64_t h = splitmix64(s);
    s ^= (run + 1) * kGolden64;
    h ^= splitmix64(s);
    s ^= (agent + 1) * kGolden64;
    h ^= splitmix64(s);
    s ^= (purpose + 1) * kGolden64;
    h ^= splitmix64(s);
    return h;
}

// Deterministic random source. mt19937_64 output is pinned by the
// standard, and every transform below is plain arithmetic on those
// bits; no implementation-defined <random> distributions are used.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : eng_(seed) {}

    // Uniform on the open interval (0, 1); never returns an endpoint,
    // so log(u) is always finite.
    double uniform01() {
        const std::uint64_t bits = eng_() >> 11;  // top 53 bits
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform index in [0, n).
    std::size_t pick(std::size_t n) {
        if (n == 0) throw DomainError("pick: empty range");
        std::size_t i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    // Box-Muller, cosine branch only.
    double normal(double mean, double stddev) {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * M_PI * u2);
    }

    // Normal truncated at zero by redraw (never clamped).
    double truncated_normal(double mean, double stddev) {
        if (stddev == 0.0) {
            if (mean < 0.0) throw DomainError("truncated_normal: negative point mass");
            return mean;
        }
        double x;
        do {
            x = normal(mean, stddev);
        } while (x < 0.0);
        return x;
    }

    double exponential(double mean) { return -mean * std::log(uniform01()); }

    // Lognormal given log-space parameters.
    double lognormal(double log_mean, double log_stddev) {
        return std::exp(normal(log_mean, log_stddev));
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace cogrel
