// Constant-gain steady-state Kalman filter fusing dead-reckoned displacements
// with Min-Max UWB fixes, the classical time-varying filter used as baseline,
// and the offline gain computation.
//
// The filter state is the pair of target coordinates; the dynamics and
// observation matrices are identity, so prediction adds the dead-reckoned
// displacement and the update blends the position fix per axis. Corrections
// touch position only: dead-reckoned velocity and heading are carried
// unmodified across updates.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "locfuse/core.hpp"

namespace locfuse {

/// Per-axis noise variances of the identity-dynamics filter. q is the process
/// noise added per prediction step, r the measurement noise of a UWB position
/// fix, p0 the initial covariance (classical filter only).
struct FilterConfig {
    double q = 0.0;   // m^2
    double r = 1.0;   // m^2
    double p0 = 0.0;  // m^2

    void validate() const;
};

/// The offline-computed constant Kalman gain, one entry per axis.
struct FilterGain {
    double kx = 0.0;
    double ky = 0.0;

    void validate() const;
};

/// Position estimate; p[xy] carry the covariance for the classical filter and
/// are unused by the constant-gain filter.
struct FilterState {
    double x = 0.0;
    double y = 0.0;
    double px = 0.0;
    double py = 0.0;
};

/// Fixed point of the scalar Riccati recursion P- = P + q, K = P-/(P- + r),
/// P = (1 - K) P-, iterated from P = 0 until |dP| < 1e-9. kx == ky since q
/// and r are shared between axes.
FilterGain compute_steady_state_gain(const FilterConfig& cfg);

/// Prediction: shift the position by a dead-reckoned displacement. The
/// constant-gain filter carries no covariance, so nothing else changes.
FilterState sskf_predict(const FilterState& state, const Vec2& displacement);

/// Constant-gain update: x += kx (fix.x - x), y += ky (fix.y - y).
FilterState sskf_update(const FilterState& state, const Vec2& fix, const FilterGain& gain);

/// One classical Kalman cycle: predict (position += displacement, p += q),
/// then, when a fix is present, update with the time-varying gain p/(p + r).
FilterState classical_kf_step(const FilterState& state, const Vec2& displacement,
                              const std::optional<Vec2>& fix, const FilterConfig& cfg);

// Split halves of classical_kf_step, used where predictions and updates do
// not alternate one-to-one.
FilterState classical_kf_predict(const FilterState& state, const Vec2& displacement,
                                 const FilterConfig& cfg);
FilterState classical_kf_update(const FilterState& state, const Vec2& fix,
                                const FilterConfig& cfg);

enum class FusionMode { steady_state, classical, imu_only, uwb_only };

std::string to_string(FusionMode mode);
FusionMode fusion_mode_from_string(const std::string& name);

struct FusionOptions {
    FusionMode mode = FusionMode::steady_state;
    std::optional<FilterGain> gain;    // required for steady_state
    std::optional<FilterConfig> config; // required for classical
    double epoch_tolerance = 0.1;      // s, range grouping window
};

struct FusionResult {
    Trajectory estimates;
    std::size_t skipped_epochs = 0;  // epochs with no usable ranges or after the last IMU tick
};

/// Runs the three-step fusion loop: dead-reckon each IMU tick to produce the
/// per-tick displacement, predict, and at each UWB epoch correct with the
/// Min-Max fix. An epoch is applied at the first IMU tick whose timestamp is
/// >= the epoch time (predict first, then update). Emits one pose per IMU
/// tick; uwb_only instead emits one Min-Max fix per epoch.
FusionResult run_fusion(const KinematicState& initial, std::span<const ImuSample> imu,
                        std::span<const RangeMeasurement> uwb, std::span<const Anchor> anchors,
                        const FusionOptions& options);

}  // namespace locfuse
