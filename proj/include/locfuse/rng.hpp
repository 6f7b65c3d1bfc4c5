// Seeded RNG utilities. Sub-seeds for independent streams (per run, per tick,
// per anchor) are derived with a splitmix64-based mixer so that results do not
// depend on iteration or thread order.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace locfuse {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Stated mixing rule: mix_seed(seed, a) and mix_seed(seed, a, b) give the
/// sub-seed for stream a (and element b) of a seeded computation.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a) {
    return splitmix64(splitmix64(seed) ^ splitmix64(a + 0x9E3779B97F4A7C15ULL));
}
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(seed, a), b);
}

// Stream tags for deriving independent sub-seeds from one scenario seed.
namespace seed_stream {
constexpr std::uint64_t imu = 0x1001;
constexpr std::uint64_t uwb = 0x1002;
constexpr std::uint64_t calibration = 0x1003;
}  // namespace seed_stream

/// mt19937_64 engine with explicit distribution transforms, so that a given
/// seed yields the same draws on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    /// Standard normal via Box-Muller; the paired draw is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Exponential with the given mean (>= 0 draw).
    double exponential(double mean) { return -mean * std::log1p(-uniform()); }

    /// Rayleigh magnitude with mean square power `omega`: E[x^2] = omega.
    double rayleigh_mean_square(double omega) {
        return std::sqrt(-omega * std::log1p(-uniform()));
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace locfuse
