// Multipath channel realizations per anchor-target link, TOA extraction via
// strongest-path selection, and conversion of delays to range measurements.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "locfuse/core.hpp"

namespace locfuse {

constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// One propagation path: magnitude alpha_k, phase phi_k, delay t_k.
struct MultipathTap {
    double magnitude = 0.0;  // unitless, >= 0
    double phase = 0.0;      // radians
    double delay = 0.0;      // seconds, >= 0
};

/// The tap list of one link, sorted by increasing delay. Phases are carried
/// for model fidelity; strongest-path TOA extraction uses magnitudes only.
struct ChannelRealization {
    std::vector<MultipathTap> taps;
    bool los = true;
};

/// Simplified single-cluster Saleh-Valenzuela-style generator parameters.
/// Defaults approximate a dense indoor UWB channel at ~500 MHz bandwidth.
struct ChannelParams {
    double tap_arrival_rate = 1e9;         // 1/s, Poisson inter-arrival of taps
    double power_decay_const = 20e-9;      // s, exponential decay of mean tap power
    int num_taps_max = 50;
    double nlos_excess_delay_mean = 10e-9; // s, mean extra first-tap delay under NLOS
    double los_direct_power_boost = 10.0;  // power ratio of the direct path
    double delay_resolution = 2e-9;        // s, TOA quantization grid (0 disables)

    void validate() const;
};

/// Draws one channel realization for a link of the given true distance.
/// LOS: first tap at true_distance/c, its power boosted by
/// los_direct_power_boost. NLOS: first tap delayed by an additional
/// exponential excess. Later taps arrive as a Poisson process with Rayleigh
/// magnitudes whose mean power decays exponentially in excess delay.
ChannelRealization realize_channel(double true_distance, bool los, const ChannelParams& params,
                                   std::uint64_t rng_seed);

/// Delay of the maximum-magnitude tap (ties broken by earliest delay).
/// Applied to LOS and NLOS links alike.
double extract_toa(const ChannelRealization& ch);

/// Distance c * t, after rounding t to the nearest multiple of
/// delay_resolution when the resolution is non-zero.
double range_from_toa(double t, double delay_resolution);

/// Ranges every anchor at each tick of 1/rate_hz over the truth span.
/// Each (tick, anchor) realization uses the sub-seed
/// mix_seed(rng_seed, tick_index, anchor_id), so results are independent of
/// iteration order.
std::vector<RangeMeasurement> simulate_ranges(const Trajectory& truth,
                                              std::span<const Anchor> anchors, double rate_hz,
                                              const ChannelParams& params,
                                              std::uint64_t rng_seed);

}  // namespace locfuse
