#include "locfuse/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <unordered_map>

#include "locfuse/io.hpp"
#include "locfuse/localization.hpp"
#include "locfuse/rng.hpp"

namespace locfuse {

void ScenarioSpec::validate() const {
    if (waypoints.size() < 2) throw config_error("ScenarioSpec: need at least 2 waypoints");
    if (speed_profile.empty()) throw config_error("ScenarioSpec: speed profile is empty");
    for (std::size_t i = 0; i < speed_profile.size(); ++i) {
        if (!(speed_profile[i].v > 0.0))
            throw config_error("ScenarioSpec: profile speeds must be > 0");
        if (i > 0 && !(speed_profile[i].s > speed_profile[i - 1].s))
            throw config_error("ScenarioSpec: profile positions must be strictly increasing");
    }
    if (speed_profile.front().s < 0.0)
        throw config_error("ScenarioSpec: profile positions must be >= 0");
    if (anchors.empty()) throw config_error("ScenarioSpec: anchor list is empty");
    for (std::size_t i = 0; i < anchors.size(); ++i)
        for (std::size_t j = i + 1; j < anchors.size(); ++j)
            if (anchors[i].id == anchors[j].id)
                throw config_error("ScenarioSpec: duplicate anchor id " +
                                   std::to_string(anchors[i].id));
    if (!(imu_source_rate_hz > 0.0) || !(imu_rate_hz > 0.0) || !(uwb_rate_hz > 0.0))
        throw config_error("ScenarioSpec: rates must be > 0");
    noise.validate();
    channel.validate();
}

namespace {

struct Polyline {
    std::vector<Vec2> pts;
    std::vector<double> cum;  // arc length up to each waypoint
    double total = 0.0;
};

Polyline build_polyline(const std::vector<Vec2>& waypoints) {
    Polyline line;
    line.pts = waypoints;
    line.cum.resize(waypoints.size(), 0.0);
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const double seg = (waypoints[i] - waypoints[i - 1]).norm();
        if (!(seg > 0.0))
            throw config_error("generate_path: duplicate consecutive waypoints at index " +
                               std::to_string(i));
        line.cum[i] = line.cum[i - 1] + seg;
    }
    line.total = line.cum.back();
    return line;
}

// Pose at arc position s. At a waypoint the outgoing segment's heading wins;
// the turn itself is instantaneous.
TimedPose pose_at(const Polyline& line, double s, double t) {
    const auto it = std::upper_bound(line.cum.begin(), line.cum.end(), s);
    std::size_t i = (it == line.cum.begin()) ? 0 : static_cast<std::size_t>(it - line.cum.begin()) - 1;
    i = std::min(i, line.pts.size() - 2);
    const Vec2 a = line.pts[i];
    const Vec2 b = line.pts[i + 1];
    const double u = std::clamp((s - line.cum[i]) / (line.cum[i + 1] - line.cum[i]), 0.0, 1.0);
    return TimedPose(t, a.x + u * (b.x - a.x), a.y + u * (b.y - a.y),
                     std::atan2(b.y - a.y, b.x - a.x));
}

double speed_at(const std::vector<SpeedPoint>& profile, double s) {
    if (s <= profile.front().s) return profile.front().v;
    if (s >= profile.back().s) return profile.back().v;
    const auto it = std::upper_bound(profile.begin(), profile.end(), s,
                                     [](double v, const SpeedPoint& p) { return v < p.s; });
    const SpeedPoint& hi = *it;
    const SpeedPoint& lo = *(it - 1);
    const double u = (s - lo.s) / (hi.s - lo.s);
    return lo.v + u * (hi.v - lo.v);
}

// Pooled mean-centered sample variance over both axes.
double pooled_variance(const std::vector<double>& ex, const std::vector<double>& ey) {
    const std::size_t n = ex.size();
    if (n < 2) throw data_error("calibration: need at least 2 error samples");
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += ex[i];
        my += ey[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        sum += (ex[i] - mx) * (ex[i] - mx) + (ey[i] - my) * (ey[i] - my);
    return sum / static_cast<double>(2 * (n - 1));
}

}  // namespace

Trajectory generate_path(const ScenarioSpec& spec) {
    spec.validate();
    const Polyline line = build_polyline(spec.waypoints);
    const double dt = 1.0 / spec.imu_source_rate_hz;

    Trajectory truth;
    double s = 0.0;
    // Explicit Euler walk along the arc; v > 0 everywhere guarantees arrival.
    for (std::size_t k = 0;; ++k) {
        truth.append(pose_at(line, s, static_cast<double>(k) * dt));
        if (s >= line.total) break;
        s = std::min(line.total, s + speed_at(spec.speed_profile, s) * dt);
        if (k > 100000000)
            throw numeric_error("generate_path: walk did not reach the end of the path");
    }
    return truth;
}

EvalReport evaluate(const Trajectory& estimates, const Trajectory& truth) {
    if (estimates.empty()) throw data_error("evaluate: no estimates");
    if (truth.empty()) throw data_error("evaluate: empty truth");

    EvalReport report;
    report.error_series.reserve(estimates.size());
    double sum_sq = 0.0;
    for (const TimedPose& est : estimates) {
        const TimedPose ref = interpolate(truth, est.t);
        const double err = std::hypot(est.x - ref.x, est.y - ref.y);
        sum_sq += err * err;
        report.max_error = std::max(report.max_error, err);
        report.error_series.emplace_back(est.t, err);
    }
    report.n_samples = estimates.size();
    report.rmse = std::sqrt(sum_sq / static_cast<double>(report.n_samples));
    return report;
}

KinematicState initial_state(const Trajectory& truth, std::span<const ImuSample> imu) {
    if (truth.empty()) throw data_error("initial_state: empty truth");
    KinematicState state;
    state.x = truth.front().x;
    state.y = truth.front().y;
    state.theta = truth.front().theta;
    if (truth.size() >= 2) {
        const double dt = truth[1].t - truth[0].t;
        state.vx = (truth[1].x - truth[0].x) / dt;
        state.vy = (truth[1].y - truth[0].y) / dt;
    }
    if (!imu.empty()) {
        state.omega = imu.front().omega_z;
        const Vec2 a = rotate_body_to_global({imu.front().ax_body, imu.front().ay_body},
                                             {state.theta});
        state.ax = a.x;
        state.ay = a.y;
    }
    return state;
}

FilterConfig calibrate_filter_config(const ScenarioSpec& spec, double epoch_tolerance) {
    spec.validate();
    const Trajectory truth = generate_path(spec);
    const auto imu_seed = mix_seed(spec.seed, seed_stream::calibration, seed_stream::imu);
    const auto uwb_seed = mix_seed(spec.seed, seed_stream::calibration, seed_stream::uwb);
    const auto imu =
        simulate_imu(truth, spec.noise, spec.imu_source_rate_hz, spec.imu_rate_hz, imu_seed);
    const auto ranges =
        simulate_ranges(truth, spec.anchors, spec.uwb_rate_hz, spec.channel, uwb_seed);

    // q: per-update-step variance of the dead-reckoned displacement error.
    // The drift curve is matched to an equivalent random walk: pooling the
    // error variance over all N ticks of a rate-q walk gives q (N + 1) / 2,
    // and the filter injects process noise once per UWB epoch, so the
    // per-tick rate is scaled by the tick count between epochs.
    const Trajectory dr = dead_reckon(initial_state(truth, imu), imu);
    std::vector<double> ex;
    std::vector<double> ey;
    ex.reserve(dr.size());
    ey.reserve(dr.size());
    for (const TimedPose& pose : dr) {
        const TimedPose ref = interpolate(truth, pose.t);
        ex.push_back(pose.x - ref.x);
        ey.push_back(pose.y - ref.y);
    }
    const double q_tick =
        2.0 * pooled_variance(ex, ey) / (static_cast<double>(dr.size()) + 1.0);
    const double ticks_per_epoch = std::max(1.0, spec.imu_rate_hz / spec.uwb_rate_hz);
    const double q = std::max(q_tick * ticks_per_epoch, 1e-12);

    // r: variance of the Min-Max fix error at every UWB epoch.
    std::unordered_map<int, Anchor> anchor_by_id;
    for (const Anchor& a : spec.anchors) anchor_by_id.emplace(a.id, a);
    std::vector<double> fx;
    std::vector<double> fy;
    for (const Epoch& epoch : bucket_epochs(ranges, epoch_tolerance)) {
        std::vector<AnchorRange> joined;
        joined.reserve(epoch.ranges.size());
        for (const RangeMeasurement& r : epoch.ranges)
            joined.push_back({anchor_by_id.at(r.anchor_id), r.distance});
        const Vec2 fix = min_max(joined);
        const TimedPose ref = interpolate(truth, epoch.t);
        fx.push_back(fix.x - ref.x);
        fy.push_back(fix.y - ref.y);
    }
    // A perfectly clean calibration would give r = 0, which the filter cannot
    // accept; floor it at a negligible variance.
    const double r = std::max(pooled_variance(fx, fy), 1e-12);
    return {q, r, 0.0};
}

namespace {

struct ResolvedFilter {
    FilterGain gain;
    std::optional<FilterConfig> config;
};

bool wants_mode(std::span<const FusionMode> modes, FusionMode m) {
    return std::find(modes.begin(), modes.end(), m) != modes.end();
}

ResolvedFilter resolve_filter(const ScenarioSpec& spec, std::span<const FusionMode> modes,
                              const FilterSetup& setup, double epoch_tolerance) {
    ResolvedFilter out;
    if (setup.gain) {
        if (setup.config) throw config_error("FilterSetup: give either a gain or a config");
        setup.gain->validate();
        if (wants_mode(modes, FusionMode::classical))
            throw config_error("classical mode needs q/r, not an explicit gain");
        out.gain = *setup.gain;
        return out;
    }
    out.config = setup.config ? *setup.config : calibrate_filter_config(spec, epoch_tolerance);
    out.config->validate();
    out.gain = compute_steady_state_gain(*out.config);
    return out;
}

}  // namespace

std::vector<RunResult> monte_carlo_runs(const ScenarioSpec& spec,
                                        std::span<const FusionMode> modes,
                                        const FilterSetup& setup,
                                        const MonteCarloOptions& options) {
    spec.validate();
    if (options.n_runs < 1) throw config_error("monte_carlo_runs: n_runs must be >= 1");
    if (modes.empty()) throw config_error("monte_carlo_runs: no modes requested");

    const Trajectory truth = generate_path(spec);
    const ResolvedFilter filter = resolve_filter(spec, modes, setup, options.epoch_tolerance);

    const std::size_t n_modes = modes.size();
    std::vector<RunResult> results(static_cast<std::size_t>(options.n_runs) * n_modes);

    // Each run writes only its own slots, so the two drivers below produce
    // identical vectors.
    auto run_one = [&](int i) {
        const auto run = static_cast<std::uint64_t>(i);
        const auto imu = simulate_imu(truth, spec.noise, spec.imu_source_rate_hz,
                                      spec.imu_rate_hz, mix_seed(spec.seed, run, seed_stream::imu));
        const auto uwb = simulate_ranges(truth, spec.anchors, spec.uwb_rate_hz, spec.channel,
                                         mix_seed(spec.seed, run, seed_stream::uwb));
        const KinematicState init = initial_state(truth, imu);
        for (std::size_t m = 0; m < n_modes; ++m) {
            FusionOptions fusion_options;
            fusion_options.mode = modes[m];
            fusion_options.gain = filter.gain;
            fusion_options.config = filter.config;
            fusion_options.epoch_tolerance = options.epoch_tolerance;
            const FusionResult fused = run_fusion(init, imu, uwb, spec.anchors, fusion_options);
            const EvalReport report = evaluate(fused.estimates, truth);
            results[static_cast<std::size_t>(i) * n_modes + m] = {i, modes[m], report.rmse,
                                                                  report.max_error};
        }
    };

    if (options.parallel) {
        std::exception_ptr failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (long long i = 0; i < static_cast<long long>(options.n_runs); ++i) {
            try {
                run_one(static_cast<int>(i));
            } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    } else {
        for (int i = 0; i < options.n_runs; ++i) run_one(i);
    }
    return results;
}

std::vector<ModeStats> run_monte_carlo(const ScenarioSpec& spec,
                                       std::span<const FusionMode> modes,
                                       const FilterSetup& setup,
                                       const MonteCarloOptions& options) {
    const std::vector<RunResult> results = monte_carlo_runs(spec, modes, setup, options);
    const std::size_t n_modes = modes.size();
    const auto n_runs = static_cast<std::size_t>(options.n_runs);

    std::vector<ModeStats> stats(n_modes);
    for (std::size_t m = 0; m < n_modes; ++m) {
        double mean = 0.0;
        double mean_max = 0.0;
        for (std::size_t i = 0; i < n_runs; ++i) {
            mean += results[i * n_modes + m].rmse;
            mean_max += results[i * n_modes + m].max_error;
        }
        mean /= static_cast<double>(n_runs);
        mean_max /= static_cast<double>(n_runs);

        double var = 0.0;
        for (std::size_t i = 0; i < n_runs; ++i) {
            const double d = results[i * n_modes + m].rmse - mean;
            var += d * d;
        }
        stats[m] = {modes[m], mean,
                    n_runs > 1 ? std::sqrt(var / static_cast<double>(n_runs - 1)) : 0.0,
                    mean_max};
    }
    return stats;
}

ScenarioSpec default_replication_spec() {
    ScenarioSpec spec;
    // The corner is cut with a short diagonal and walked slowly: a sharp fast
    // turn would be unresolvable at the 5 Hz IMU rate.
    spec.waypoints = {{0.0, 0.0}, {11.5, 0.0}, {12.0, 0.5}, {12.0, 6.3}};
    spec.speed_profile = {{0.0, 0.10},  {2.0, 0.45},  {5.0, 0.20},  {8.0, 0.50},
                          {11.0, 0.12}, {12.5, 0.10}, {13.5, 0.45}, {16.0, 0.40},
                          {18.0, 0.10}};
    // LOS anchors 0 and 1 sit behind the start so the first Min-Max boxes are
    // constrained from both sides of the walking direction even when one
    // range picks up a multipath excess.
    spec.anchors = {
        {0, -1.5, 0.8, true},  {1, -1.0, -1.0, true}, {2, 8.5, 1.2, true},
        {3, 12.8, 0.5, true},  {4, 5.0, -1.2, true},  {5, 12.8, 5.0, true},
        {6, -2.0, -4.0, false}, {7, 5.0, 6.0, false},  {8, 16.0, -2.0, false},
        {9, 17.0, 8.0, false},
    };
    spec.imu_source_rate_hz = 5.0;
    spec.imu_rate_hz = 5.0;
    spec.uwb_rate_hz = 2.0;
    spec.noise.accel_snr_db = 60.0;
    spec.noise.gyro_bias = -0.003;
    spec.noise.gyro_noise_std = 0.012;
    // Industrial hall multipath: dense reflections with a slowly decaying
    // power profile and a direct path only twice as strong as the mean
    // reflection, so a noticeable share of ranges lock onto a late tap.
    spec.channel.tap_arrival_rate = 0.8e9;
    spec.channel.power_decay_const = 110e-9;
    spec.channel.los_direct_power_boost = 2.0;
    spec.seed = 42;
    return spec;
}

}  // namespace locfuse
