// Inertial unit simulation (noise, bias, subsampling) and dead reckoning,
// including the body-to-global rotation.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "locfuse/core.hpp"

namespace locfuse {

/// Accelerometer/gyro error model. Exactly one of accel_snr_db /
/// accel_noise_std must be set: SNR scales the additive Gaussian accelerometer
/// noise to the measured body-frame signal power, the explicit std bypasses
/// that (required for runs with zero true acceleration).
struct ImuNoiseModel {
    std::optional<double> accel_snr_db;
    std::optional<double> accel_noise_std;  // m/s^2
    double gyro_bias = 0.0;                 // rad/s, the constant drift source
    double gyro_noise_std = 0.0;            // rad/s

    void validate() const;
};

/// Heading used to project a body-frame vector into the global frame.
struct RotationAngle {
    double phi = 0.0;
};

/// u_global = R(phi) * u_body with the standard planar rotation
/// [cos phi, -sin phi; sin phi, cos phi]. Norm-preserving.
Vec2 rotate_body_to_global(const Vec2& u_body, RotationAngle phi);

/// One discrete dead-reckoning step over dt seconds: the sample's body
/// accelerations are rotated with the pre-update heading and integrated
/// (x += v dt + a dt^2 / 2, v += a dt), heading advances by the stored
/// angular rate, then the sample's values replace the stored accel/rate.
KinematicState dead_reckon_step(const KinematicState& state, const ImuSample& sample, double dt);

/// Folds dead_reckon_step over consecutive sample pairs. The initial state is
/// taken to hold at the first sample's timestamp; the output has one pose per
/// sample. An empty stream yields a single pose at t=0.
Trajectory dead_reckon(const KinematicState& initial, std::span<const ImuSample> samples);

/// Position error bound N t^2 / 2 of double-integrating an average
/// accelerometer noise N for t seconds.
double drift_bound(double noise_std, double t);

/// Synthesizes an IMU stream from a densely sampled ground-truth trajectory:
/// finite-differences the truth at the source rate (central differences,
/// one-sided at the endpoints), rotates global accelerations into the body
/// frame, adds accelerometer noise per the model, adds gyro bias plus noise,
/// then decimates to the output rate by keeping every (source/output)-th
/// sample (instantaneous values, no anti-alias filtering).
std::vector<ImuSample> simulate_imu(const Trajectory& truth, const ImuNoiseModel& model,
                                    double source_rate_hz, double output_rate_hz,
                                    std::uint64_t rng_seed);

}  // namespace locfuse
