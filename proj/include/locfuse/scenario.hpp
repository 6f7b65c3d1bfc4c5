// Synthetic replication of the measurement scenario (path, anchors, rates),
// Monte-Carlo batches over sensor noise, and evaluation metrics.
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "locfuse/channel.hpp"
#include "locfuse/core.hpp"
#include "locfuse/fusion.hpp"
#include "locfuse/imu.hpp"

namespace locfuse {

/// Speed as a function of position along the path, interpolated linearly
/// between profile points and clamped outside them.
struct SpeedPoint {
    double s = 0.0;  // m along the path
    double v = 0.0;  // m/s
};

struct ScenarioSpec {
    std::vector<Vec2> waypoints;
    std::vector<SpeedPoint> speed_profile;
    std::vector<Anchor> anchors;
    double imu_source_rate_hz = 5.0;
    double imu_rate_hz = 5.0;
    double uwb_rate_hz = 2.0;
    ImuNoiseModel noise;
    ChannelParams channel;
    std::uint64_t seed = 42;

    void validate() const;
};

/// The built-in stand-in for the measured deployment: an 18 m L-shaped
/// corridor walked at 0.1-0.5 m/s (0.29 m/s average), ranged by 6 LOS
/// anchors near the path and 4 NLOS anchors behind it.
ScenarioSpec default_replication_spec();

struct EvalReport {
    double rmse = 0.0;       // m
    double max_error = 0.0;  // m
    std::vector<std::pair<double, double>> error_series;  // (t, error)
    std::size_t n_samples = 0;
};

/// Dense ground-truth trajectory at the IMU source rate: follows the
/// waypoints at the profiled speed, heading along each segment and turning
/// instantaneously at waypoints.
Trajectory generate_path(const ScenarioSpec& spec);

/// Euclidean position error of each estimate against the interpolated truth.
EvalReport evaluate(const Trajectory& estimates, const Trajectory& truth);

/// Known start of a run: pose from the first truth sample, velocity from the
/// first truth increment, angular rate from the first IMU reading.
KinematicState initial_state(const Trajectory& truth, std::span<const ImuSample> imu);

/// Measures the filter noise configuration from one seeded oracle run:
/// r is the pooled per-axis sample variance of Min-Max fix errors, q the
/// pooled per-axis variance of per-step dead-reckoning displacement errors.
FilterConfig calibrate_filter_config(const ScenarioSpec& spec, double epoch_tolerance = 0.1);

/// Filter settings for a batch: an explicit gain, an explicit config, or
/// neither (calibrated from the spec).
struct FilterSetup {
    std::optional<FilterGain> gain;
    std::optional<FilterConfig> config;
};

struct RunResult {
    int run = 0;
    FusionMode mode = FusionMode::steady_state;
    double rmse = 0.0;
    double max_error = 0.0;
};

struct ModeStats {
    FusionMode mode = FusionMode::steady_state;
    double mean_rmse = 0.0;
    double std_rmse = 0.0;
    double mean_max_error = 0.0;
};

struct MonteCarloOptions {
    int n_runs = 20;
    bool parallel = true;  // false selects the serial reference driver
    double epoch_tolerance = 0.1;
};

/// Per-run, per-mode errors. Truth is generated once per spec; run i draws
/// its sensor noise from sub-seeds of (spec.seed, i), so the output is
/// identical between the serial and the OpenMP driver.
std::vector<RunResult> monte_carlo_runs(const ScenarioSpec& spec,
                                        std::span<const FusionMode> modes,
                                        const FilterSetup& setup,
                                        const MonteCarloOptions& options);

/// Aggregated mean/std RMSE and mean max error per mode.
std::vector<ModeStats> run_monte_carlo(const ScenarioSpec& spec,
                                       std::span<const FusionMode> modes,
                                       const FilterSetup& setup,
                                       const MonteCarloOptions& options);

}  // namespace locfuse
