#include "locfuse/imu.hpp"

#include <cmath>

#include "locfuse/rng.hpp"

namespace locfuse {

void ImuNoiseModel::validate() const {
    if (accel_snr_db.has_value() == accel_noise_std.has_value())
        throw config_error("ImuNoiseModel: exactly one of accel_snr_db / accel_noise_std "
                           "must be set");
    if (accel_noise_std && *accel_noise_std < 0.0)
        throw config_error("ImuNoiseModel: accel_noise_std must be >= 0");
    if (gyro_noise_std < 0.0) throw config_error("ImuNoiseModel: gyro_noise_std must be >= 0");
}

Vec2 rotate_body_to_global(const Vec2& u_body, RotationAngle phi) {
    const double c = std::cos(phi.phi);
    const double s = std::sin(phi.phi);
    return {c * u_body.x - s * u_body.y, s * u_body.x + c * u_body.y};
}

KinematicState dead_reckon_step(const KinematicState& state, const ImuSample& sample, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dead_reckon_step: dt must be > 0");

    const Vec2 a_g = rotate_body_to_global({sample.ax_body, sample.ay_body}, {state.theta});
    KinematicState next;
    next.x = state.x + state.vx * dt + 0.5 * a_g.x * dt * dt;
    next.y = state.y + state.vy * dt + 0.5 * a_g.y * dt * dt;
    next.vx = state.vx + a_g.x * dt;
    next.vy = state.vy + a_g.y * dt;
    next.theta = normalize_angle(state.theta + state.omega * dt);
    next.ax = a_g.x;
    next.ay = a_g.y;
    next.omega = sample.omega_z;
    return next;
}

Trajectory dead_reckon(const KinematicState& initial, std::span<const ImuSample> samples) {
    Trajectory out;
    if (samples.empty()) {
        out.append(TimedPose(0.0, initial.x, initial.y, initial.theta));
        return out;
    }
    out.append(TimedPose(samples[0].t, initial.x, initial.y, initial.theta));
    KinematicState state = initial;
    for (std::size_t k = 1; k < samples.size(); ++k) {
        const double dt = samples[k].t - samples[k - 1].t;
        if (!(dt > 0.0))
            throw data_error("dead_reckon: non-monotonic timestamps at sample " +
                             std::to_string(k));
        state = dead_reckon_step(state, samples[k], dt);
        out.append(TimedPose(samples[k].t, state.x, state.y, state.theta));
    }
    return out;
}

double drift_bound(double noise_std, double t) {
    if (t < 0.0) throw std::invalid_argument("drift_bound: t must be >= 0");
    if (noise_std < 0.0) throw std::invalid_argument("drift_bound: noise_std must be >= 0");
    return noise_std * t * t / 2.0;
}

namespace {

struct TruthDerivatives {
    std::vector<Vec2> accel_body;  // true body-frame accelerations per source sample
    std::vector<double> omega;     // true angular rate per source sample
};

TruthDerivatives differentiate_truth(const Trajectory& truth, double dt) {
    const std::size_t n = truth.size();
    TruthDerivatives d;
    d.accel_body.resize(n);
    d.omega.resize(n);

    auto accel_at = [&](std::size_t im1, std::size_t i, std::size_t ip1) -> Vec2 {
        const double axg = (truth[ip1].x - 2.0 * truth[i].x + truth[im1].x) / (dt * dt);
        const double ayg = (truth[ip1].y - 2.0 * truth[i].y + truth[im1].y) / (dt * dt);
        return {axg, ayg};
    };
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a_g;
        double w;
        if (i == 0) {
            a_g = accel_at(0, 1, 2);
            w = angle_diff(truth[1].theta, truth[0].theta) / dt;
        } else if (i == n - 1) {
            a_g = accel_at(n - 3, n - 2, n - 1);
            w = angle_diff(truth[n - 1].theta, truth[n - 2].theta) / dt;
        } else {
            a_g = accel_at(i - 1, i, i + 1);
            w = angle_diff(truth[i + 1].theta, truth[i - 1].theta) / (2.0 * dt);
        }
        // Rotate the global acceleration into the body frame of the true heading.
        d.accel_body[i] = rotate_body_to_global(a_g, {-truth[i].theta});
        d.omega[i] = w;
    }
    return d;
}

}  // namespace

std::vector<ImuSample> simulate_imu(const Trajectory& truth, const ImuNoiseModel& model,
                                    double source_rate_hz, double output_rate_hz,
                                    std::uint64_t rng_seed) {
    model.validate();
    if (!(output_rate_hz > 0.0) || source_rate_hz < output_rate_hz)
        throw config_error("simulate_imu: need source_rate_hz >= output_rate_hz > 0");
    const double ratio = source_rate_hz / output_rate_hz;
    const auto stride = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(stride)) > 1e-9)
        throw config_error("simulate_imu: source/output rate ratio must be an integer");
    if (truth.size() < 3) throw data_error("simulate_imu: truth must have at least 3 samples");

    const double dt = 1.0 / source_rate_hz;
    for (std::size_t i = 1; i < truth.size(); ++i) {
        if (std::abs((truth[i].t - truth[i - 1].t) - dt) > 1e-6)
            throw data_error("simulate_imu: truth sampling does not match source rate");
    }

    const TruthDerivatives d = differentiate_truth(truth, dt);

    double accel_std = 0.0;
    if (model.accel_noise_std) {
        accel_std = *model.accel_noise_std;
    } else {
        // Joint signal power: mean square over both body axes of the whole run.
        double sum_sq = 0.0;
        for (const Vec2& a : d.accel_body) sum_sq += a.x * a.x + a.y * a.y;
        const double signal_power = sum_sq / (2.0 * static_cast<double>(truth.size()));
        if (signal_power <= 0.0)
            throw config_error("simulate_imu: SNR specified but the true acceleration is zero; "
                               "use accel_noise_std instead");
        accel_std = std::sqrt(signal_power * std::pow(10.0, -*model.accel_snr_db / 10.0));
    }

    Rng rng(rng_seed);
    std::vector<ImuSample> out;
    out.reserve(truth.size() / stride + 1);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double ax = d.accel_body[i].x + (accel_std > 0.0 ? rng.normal(0.0, accel_std) : 0.0);
        const double ay = d.accel_body[i].y + (accel_std > 0.0 ? rng.normal(0.0, accel_std) : 0.0);
        const double w = d.omega[i] + model.gyro_bias +
                         (model.gyro_noise_std > 0.0 ? rng.normal(0.0, model.gyro_noise_std) : 0.0);
        if (i % stride == 0) out.push_back({truth[i].t, ax, ay, w});
    }
    return out;
}

}  // namespace locfuse
