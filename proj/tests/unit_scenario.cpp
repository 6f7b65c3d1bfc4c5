#include "locfuse/scenario.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"

using namespace locfuse;

namespace {

// A short straight corridor that keeps Monte-Carlo tests fast.
ScenarioSpec small_spec() {
    ScenarioSpec spec = default_replication_spec();
    spec.waypoints = {{0.0, 0.0}, {6.0, 0.0}};
    spec.speed_profile = {{0.0, 0.3}};
    return spec;
}

double mean_rmse(const std::vector<RunResult>& results, FusionMode mode) {
    double sum = 0.0;
    int n = 0;
    for (const RunResult& r : results) {
        if (r.mode != mode) continue;
        sum += r.rmse;
        ++n;
    }
    return sum / n;
}

}  // namespace

TEST_CASE("ScenarioSpec validation") {
    CHECK_NOTHROW(default_replication_spec().validate());

    ScenarioSpec s = small_spec();
    s.waypoints = {{0.0, 0.0}};
    CHECK_THROWS_AS(s.validate(), config_error);

    s = small_spec();
    s.speed_profile.clear();
    CHECK_THROWS_AS(s.validate(), config_error);

    s = small_spec();
    s.speed_profile = {{0.0, 0.3}, {0.0, 0.2}};  // non-increasing arc positions
    CHECK_THROWS_AS(s.validate(), config_error);

    s = small_spec();
    s.speed_profile = {{0.0, 0.0}};  // zero speed stalls the walk
    CHECK_THROWS_AS(s.validate(), config_error);

    s = small_spec();
    s.anchors[1].id = s.anchors[0].id;
    CHECK_THROWS_AS(s.validate(), config_error);

    s = small_spec();
    s.uwb_rate_hz = 0.0;
    CHECK_THROWS_AS(s.validate(), config_error);

    s = small_spec();
    s.waypoints = {{0.0, 0.0}, {0.0, 0.0}, {6.0, 0.0}};
    CHECK_THROWS_AS(generate_path(s), config_error);
}

TEST_CASE("generate_path walks 18 m at 0.29 m/s in about 62 s") {
    ScenarioSpec s = small_spec();
    s.waypoints = {{0.0, 0.0}, {18.0, 0.0}};
    s.speed_profile = {{0.0, 0.29}};
    const Trajectory truth = generate_path(s);
    CHECK(truth.back().t == doctest::Approx(18.0 / 0.29).epsilon(0.004));
    CHECK(path_length(truth) == doctest::Approx(18.0).epsilon(1e-9));
    CHECK(truth.front().x == 0.0);
    CHECK(truth.back().x == doctest::Approx(18.0).epsilon(1e-12));
}

TEST_CASE("constant speed gives zero acceleration along a straight path") {
    const ScenarioSpec s = small_spec();
    const Trajectory truth = generate_path(s);
    const double dt = 1.0 / s.imu_source_rate_hz;
    for (std::size_t i = 1; i + 1 < truth.size(); ++i) {
        const double ax = (truth[i + 1].x - 2.0 * truth[i].x + truth[i - 1].x) / (dt * dt);
        const double ay = (truth[i + 1].y - 2.0 * truth[i].y + truth[i - 1].y) / (dt * dt);
        // The clamp at the path end brakes to a stop; skip the arrival samples.
        if (truth[i + 1].x > 5.99) break;
        CHECK(std::abs(ax) <= 1e-9);
        CHECK(std::abs(ay) <= 1e-9);
    }
}

TEST_CASE("waypoint corners turn instantaneously") {
    ScenarioSpec s = small_spec();
    s.waypoints = {{0.0, 0.0}, {3.0, 0.0}, {3.0, 3.0}};
    const Trajectory truth = generate_path(s);
    CHECK(truth.front().theta == doctest::Approx(0.0));
    CHECK(truth.back().theta == doctest::Approx(M_PI / 2.0));
    // The polyline is traversed end to end, corner cut by at most one step.
    CHECK(path_length(truth) == doctest::Approx(6.0).epsilon(0.02));
}

TEST_CASE("evaluate hand-worked metrics") {
    Trajectory truth;
    for (int k = 0; k <= 10; ++k) truth.append(TimedPose(0.2 * k, 0.1 * k, 0.0, 0.0));

    EvalReport self = evaluate(truth, truth);
    CHECK(self.rmse == 0.0);
    CHECK(self.max_error == 0.0);
    CHECK(self.n_samples == truth.size());

    Trajectory offset;
    for (const TimedPose& p : truth) offset.append(TimedPose(p.t, p.x + 3.0, p.y + 4.0, p.theta));
    EvalReport report = evaluate(offset, truth);
    CHECK(report.rmse == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(report.max_error == doctest::Approx(5.0).epsilon(1e-12));

    // Errors {1, 1, 7}: rmse = sqrt(17), max 7.
    Trajectory three;
    three.append(TimedPose(0.0, 1.0, 0.0, 0.0));
    three.append(TimedPose(1.0, 0.5, 1.0, 0.0));
    three.append(TimedPose(2.0, 8.0, 0.0, 0.0));
    report = evaluate(three, truth);
    CHECK(report.rmse == doctest::Approx(std::sqrt(17.0)).epsilon(1e-12));
    CHECK(report.max_error == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(report.max_error >= report.rmse);
    CHECK(report.error_series.size() == report.n_samples);

    CHECK_THROWS_AS(evaluate(Trajectory{}, truth), data_error);
}

TEST_CASE("initial_state reads the first truth increment") {
    Trajectory truth;
    truth.append(TimedPose(0.0, 0.0, 0.0, 0.1));
    truth.append(TimedPose(0.2, 0.1, 0.02, 0.1));
    const std::vector<ImuSample> imu{{0.0, 0.0, 0.0, 0.3}};

    const KinematicState init = initial_state(truth, imu);
    CHECK(init.x == 0.0);
    CHECK(init.y == 0.0);
    CHECK(init.theta == doctest::Approx(0.1));
    CHECK(init.vx == doctest::Approx(0.5));
    CHECK(init.vy == doctest::Approx(0.1));
    CHECK(init.omega == doctest::Approx(0.3));
}

TEST_CASE("calibration is deterministic and positive") {
    const ScenarioSpec spec = small_spec();
    const FilterConfig a = calibrate_filter_config(spec);
    const FilterConfig b = calibrate_filter_config(spec);
    CHECK(a.q == b.q);
    CHECK(a.r == b.r);
    CHECK(a.q > 0.0);
    CHECK(a.r > 0.0);
    CHECK(a.p0 == 0.0);
    CHECK_NOTHROW(compute_steady_state_gain(a));
}

TEST_CASE("serial and parallel Monte-Carlo drivers agree bitwise") {
    const ScenarioSpec spec = small_spec();
    const std::vector<FusionMode> modes{FusionMode::steady_state, FusionMode::classical,
                                        FusionMode::imu_only, FusionMode::uwb_only};
    MonteCarloOptions par;
    par.n_runs = 4;
    MonteCarloOptions ser = par;
    ser.parallel = false;

    const auto a = monte_carlo_runs(spec, modes, {}, par);
    const auto b = monte_carlo_runs(spec, modes, {}, ser);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].run == b[i].run);
        CHECK(a[i].mode == b[i].mode);
        CHECK(a[i].rmse == b[i].rmse);
        CHECK(a[i].max_error == b[i].max_error);
    }
}

TEST_CASE("per-run results do not depend on which other modes run") {
    const ScenarioSpec spec = small_spec();
    MonteCarloOptions opts;
    opts.n_runs = 3;
    FilterSetup gain_only;
    gain_only.gain = FilterGain{0.4, 0.4};

    const std::vector<FusionMode> solo{FusionMode::imu_only};
    const std::vector<FusionMode> both{FusionMode::imu_only, FusionMode::uwb_only};
    const auto a = monte_carlo_runs(spec, solo, gain_only, opts);
    const auto b = monte_carlo_runs(spec, both, gain_only, opts);
    for (int i = 0; i < opts.n_runs; ++i) {
        CHECK(a[i].rmse == b[2 * i].rmse);
        CHECK(a[i].max_error == b[2 * i].max_error);
    }
}

TEST_CASE("run_monte_carlo aggregates match hand-computed statistics") {
    const ScenarioSpec spec = small_spec();
    const std::vector<FusionMode> modes{FusionMode::imu_only, FusionMode::uwb_only};
    MonteCarloOptions opts;
    opts.n_runs = 5;
    FilterSetup gain_only;
    gain_only.gain = FilterGain{0.4, 0.4};

    const auto results = monte_carlo_runs(spec, modes, gain_only, opts);
    const auto stats = run_monte_carlo(spec, modes, gain_only, opts);
    REQUIRE(stats.size() == 2);
    for (std::size_t m = 0; m < 2; ++m) {
        double mean = 0.0, mean_max = 0.0;
        for (int i = 0; i < opts.n_runs; ++i) {
            mean += results[static_cast<std::size_t>(i) * 2 + m].rmse;
            mean_max += results[static_cast<std::size_t>(i) * 2 + m].max_error;
        }
        mean /= opts.n_runs;
        mean_max /= opts.n_runs;
        double var = 0.0;
        for (int i = 0; i < opts.n_runs; ++i) {
            const double d = results[static_cast<std::size_t>(i) * 2 + m].rmse - mean;
            var += d * d;
        }
        CHECK(stats[m].mode == modes[m]);
        CHECK(stats[m].mean_rmse == doctest::Approx(mean).epsilon(1e-12));
        CHECK(stats[m].std_rmse == doctest::Approx(std::sqrt(var / 4.0)).epsilon(1e-12));
        CHECK(stats[m].mean_max_error == doctest::Approx(mean_max).epsilon(1e-12));
        CHECK(stats[m].mean_max_error >= stats[m].mean_rmse);
    }

    MonteCarloOptions one = opts;
    one.n_runs = 1;
    const auto single = run_monte_carlo(spec, modes, gain_only, one);
    CHECK(single[0].std_rmse == 0.0);
}

TEST_CASE("uwb_only errors ignore the IMU noise configuration") {
    ScenarioSpec a = small_spec();
    ScenarioSpec b = a;
    b.noise.gyro_bias = 0.5;
    b.noise.accel_snr_db = 10.0;

    FilterSetup gain_only;
    gain_only.gain = FilterGain{0.4, 0.4};
    MonteCarloOptions opts;
    opts.n_runs = 2;
    const std::vector<FusionMode> modes{FusionMode::uwb_only};

    const auto ra = monte_carlo_runs(a, modes, gain_only, opts);
    const auto rb = monte_carlo_runs(b, modes, gain_only, opts);
    for (std::size_t i = 0; i < ra.size(); ++i) CHECK(ra[i].rmse == rb[i].rmse);
}

TEST_CASE("imu_only errors ignore the channel configuration") {
    ScenarioSpec a = small_spec();
    ScenarioSpec b = a;
    b.channel.power_decay_const = 80e-9;
    b.channel.nlos_excess_delay_mean = 40e-9;

    FilterSetup gain_only;
    gain_only.gain = FilterGain{0.4, 0.4};
    MonteCarloOptions opts;
    opts.n_runs = 2;
    const std::vector<FusionMode> modes{FusionMode::imu_only};

    const auto ra = monte_carlo_runs(a, modes, gain_only, opts);
    const auto rb = monte_carlo_runs(b, modes, gain_only, opts);
    for (std::size_t i = 0; i < ra.size(); ++i) CHECK(ra[i].rmse == rb[i].rmse);
}

TEST_CASE("stronger accelerometer noise worsens dead reckoning") {
    ScenarioSpec quiet = small_spec();
    quiet.noise.accel_snr_db.reset();
    quiet.noise.accel_noise_std = 0.02;
    ScenarioSpec loud = quiet;
    loud.noise.accel_noise_std = 0.3;

    FilterSetup gain_only;
    gain_only.gain = FilterGain{0.4, 0.4};
    MonteCarloOptions opts;
    opts.n_runs = 20;
    const std::vector<FusionMode> modes{FusionMode::imu_only};

    CHECK(mean_rmse(monte_carlo_runs(loud, modes, gain_only, opts), FusionMode::imu_only) >
          mean_rmse(monte_carlo_runs(quiet, modes, gain_only, opts), FusionMode::imu_only));
}

TEST_CASE("explicit gain plus classical mode is rejected") {
    const ScenarioSpec spec = small_spec();
    FilterSetup bad;
    bad.gain = FilterGain{0.4, 0.4};
    MonteCarloOptions opts;
    opts.n_runs = 1;
    const std::vector<FusionMode> modes{FusionMode::classical};
    CHECK_THROWS_AS(monte_carlo_runs(spec, modes, bad, opts), config_error);

    FilterSetup twice;
    twice.gain = FilterGain{0.4, 0.4};
    twice.config = FilterConfig{0.1, 1.0, 0.0};
    const std::vector<FusionMode> steady{FusionMode::steady_state};
    CHECK_THROWS_AS(monte_carlo_runs(spec, steady, twice, opts), config_error);
}

TEST_CASE("default replication spec shape") {
    const ScenarioSpec spec = default_replication_spec();
    CHECK(spec.anchors.size() == 10);
    int los = 0;
    for (const Anchor& a : spec.anchors) los += a.los ? 1 : 0;
    CHECK(los == 6);
    CHECK(spec.imu_rate_hz == 5.0);
    CHECK(spec.uwb_rate_hz == 2.0);

    const Trajectory truth = generate_path(spec);
    CHECK(path_length(truth) == doctest::Approx(18.0).epsilon(0.01));
    // Average speed close to 0.29 m/s, instantaneous within [0.1, 0.5].
    const double avg = path_length(truth) / (truth.back().t - truth.front().t);
    CHECK(avg > 0.25);
    CHECK(avg < 0.33);
    for (const SpeedPoint& p : spec.speed_profile) {
        CHECK(p.v >= 0.1);
        CHECK(p.v <= 0.5);
    }
}
