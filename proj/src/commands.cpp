#include <algorithm>
#include <filesystem>
#include <fstream>

#include "locfuse/io.hpp"
#include "locfuse/rng.hpp"
#include "src/format.hpp"

namespace locfuse {

using detail::fmt_fixed;

namespace {

ScenarioSpec scenario_or_default(const RunConfig& cfg) {
    ScenarioSpec spec = cfg.scenario ? *cfg.scenario : default_replication_spec();
    if (cfg.seed) spec.seed = *cfg.seed;
    return spec;
}

std::vector<FusionMode> modes_or_default(const RunConfig& cfg) {
    return cfg.modes.empty() ? all_fusion_modes() : cfg.modes;
}

void make_out_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw data_error(dir + ": cannot create directory (" + ec.message() + ")");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw data_error(path + ": cannot open file for writing");
    return file;
}

}  // namespace

void cmd_gain(const FilterConfig& cfg, std::ostream& out) {
    const FilterGain gain = compute_steady_state_gain(cfg);
    out << "{\"kx\": " << fmt_fixed(gain.kx, 10) << ", \"ky\": " << fmt_fixed(gain.ky, 10)
        << "}\n";
}

void cmd_simulate(const RunConfig& cfg) {
    if (cfg.dataset) throw config_error("simulate: needs a scenario, not dataset paths");
    const ScenarioSpec spec = scenario_or_default(cfg);
    spec.validate();

    const Trajectory truth = generate_path(spec);
    // Sub-seeds equal Monte-Carlo run 0, so `fuse` on the emitted dataset
    // reproduces that run.
    const auto imu = simulate_imu(truth, spec.noise, spec.imu_source_rate_hz, spec.imu_rate_hz,
                                  mix_seed(spec.seed, 0, seed_stream::imu));
    const auto uwb = simulate_ranges(truth, spec.anchors, spec.uwb_rate_hz, spec.channel,
                                     mix_seed(spec.seed, 0, seed_stream::uwb));

    make_out_dir(cfg.out);
    write_anchors_csv(cfg.out + "/anchors.csv", spec.anchors);
    write_imu_csv(cfg.out + "/imu.csv", imu);
    write_uwb_csv(cfg.out + "/uwb.csv", uwb);
    write_truth_csv(cfg.out + "/truth.csv", truth);
}

void cmd_fuse(const RunConfig& cfg) {
    if (!cfg.dataset) throw config_error("fuse: needs dataset paths (run `simulate` first)");
    const Dataset ds = ingest(*cfg.dataset);
    const std::vector<FusionMode> modes = modes_or_default(cfg);

    std::optional<FilterGain> gain = cfg.filter_gain;
    if (!gain && cfg.filter_config) gain = compute_steady_state_gain(*cfg.filter_config);
    for (const FusionMode mode : modes) {
        if (mode == FusionMode::steady_state && !gain)
            throw config_error("fuse: steady_state mode needs filter {q, r} or {kx, ky}");
        if (mode == FusionMode::classical && !cfg.filter_config)
            throw config_error("fuse: classical mode needs filter {q, r}");
    }

    const KinematicState initial =
        ds.truth ? initial_state(*ds.truth, ds.imu) : KinematicState{};

    std::vector<ModeOutput> outputs;
    outputs.reserve(modes.size());
    for (const FusionMode mode : modes) {
        FusionOptions options;
        options.mode = mode;
        options.gain = gain;
        options.config = cfg.filter_config;
        options.epoch_tolerance = cfg.epoch_tolerance;
        FusionResult result = run_fusion(initial, ds.imu, ds.uwb, ds.anchors, options);

        ModeOutput mo;
        mo.mode = mode;
        if (ds.truth) mo.report = evaluate(result.estimates, *ds.truth);
        mo.estimates = std::move(result.estimates);
        outputs.push_back(std::move(mo));
    }
    emit(outputs, cfg.out);
}

void cmd_eval(const std::string& estimates_csv, const std::string& truth_csv,
              const std::string& out_dir, std::ostream& out) {
    auto groups = read_estimates_csv(estimates_csv);
    if (groups.empty()) throw data_error(estimates_csv + ": no estimates");
    const Trajectory truth = read_truth_csv(truth_csv);

    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<ModeOutput> outputs;
    outputs.reserve(groups.size());
    for (auto& [mode, estimates] : groups) {
        ModeOutput mo;
        mo.mode = mode;
        mo.report = evaluate(estimates, truth);
        mo.estimates = std::move(estimates);
        outputs.push_back(std::move(mo));
    }
    emit(outputs, out_dir);

    for (const ModeOutput& mo : outputs)
        out << to_string(mo.mode) << ": rmse_m=" << fmt_fixed(mo.report->rmse, 6)
            << " max_error_m=" << fmt_fixed(mo.report->max_error, 6)
            << " n=" << mo.report->n_samples << '\n';
}

void cmd_montecarlo(const RunConfig& cfg, bool serial, std::ostream& out) {
    if (cfg.dataset) throw config_error("montecarlo: needs a scenario, not dataset paths");
    const ScenarioSpec spec = scenario_or_default(cfg);
    const std::vector<FusionMode> modes = modes_or_default(cfg);

    FilterSetup setup;
    setup.gain = cfg.filter_gain;
    setup.config = cfg.filter_config;

    MonteCarloOptions options;
    options.n_runs = cfg.runs;
    options.parallel = !serial;
    options.epoch_tolerance = cfg.epoch_tolerance;

    const std::vector<ModeStats> stats = run_monte_carlo(spec, modes, setup, options);

    make_out_dir(cfg.out);
    {
        auto file = open_out(cfg.out + "/montecarlo_summary.csv");
        file << "mode,mean_rmse_m,std_rmse_m,mean_max_error_m\n";
        for (const ModeStats& s : stats)
            file << to_string(s.mode) << ',' << fmt_fixed(s.mean_rmse, 6) << ','
                 << fmt_fixed(s.std_rmse, 6) << ',' << fmt_fixed(s.mean_max_error, 6) << '\n';
        file.flush();
        if (!file) throw data_error(cfg.out + "/montecarlo_summary.csv: write failed");
    }
    {
        auto file = open_out(cfg.out + "/montecarlo_summary.json");
        file << "{\n  \"runs\": " << cfg.runs << ",\n  \"seed\": " << spec.seed
             << ",\n  \"modes\": {\n";
        for (std::size_t i = 0; i < stats.size(); ++i) {
            const ModeStats& s = stats[i];
            file << "    \"" << to_string(s.mode) << "\": {\"mean_rmse_m\": "
                 << fmt_fixed(s.mean_rmse, 6) << ", \"std_rmse_m\": " << fmt_fixed(s.std_rmse, 6)
                 << ", \"mean_max_error_m\": " << fmt_fixed(s.mean_max_error, 6) << "}"
                 << (i + 1 < stats.size() ? ",\n" : "\n");
        }
        file << "  }\n}\n";
        file.flush();
        if (!file) throw data_error(cfg.out + "/montecarlo_summary.json: write failed");
    }

    out << "mode            mean_rmse_m  std_rmse_m  mean_max_error_m\n";
    for (const ModeStats& s : stats) {
        out << to_string(s.mode);
        for (std::size_t pad = to_string(s.mode).size(); pad < 16; ++pad) out << ' ';
        out << fmt_fixed(s.mean_rmse, 6) << "     " << fmt_fixed(s.std_rmse, 6) << "    "
            << fmt_fixed(s.mean_max_error, 6) << '\n';
    }
}

}  // namespace locfuse
