// Seeded random number generation for reproducible Monte Carlo ensembles.
//
// Every trajectory of an ensemble draws from its own stream, derived from
// (master_seed, trajectory_index) by a SplitMix64 mix. Adding trajectories
// to an ensemble never perturbs the streams of existing ones.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

namespace shearlab {

// SplitMix64 step (Steele, Lea, Flood 2014). Used for seed expansion only.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derive the seed of stream `index` from a master seed. Statistically
/// independent streams for distinct indices under the same master.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s = master ^ (0x9E3779B97F4A7C15ULL * (index + 1));
    std::uint64_t b = splitmix64(s);
    return a ^ (b + 0x2545F4914F6CDD1DULL);
}

/// Deterministic random stream: uniform doubles and standard normals.
///
/// Normals come from a Box-Muller transform, so one call to normal_pair()
/// consumes exactly two uniforms. The sequence is fixed by the seed alone.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1]; safe as a log() argument.
    double uniform01_open_left() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    /// Pair of independent standard normals (Box-Muller).
    std::pair<double, double> normal_pair() {
        const double u1 = uniform01_open_left();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    /// Single standard normal. Draws a full pair and keeps the first half,
    /// so the stream position never depends on call history.
    double normal() { return normal_pair().first; }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace shearlab
