#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "locfuse/io.hpp"

namespace {

using namespace locfuse;

// Per-subcommand copies of the shared flags; values override the config file.
struct CommonFlags {
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    CLI::Option* out_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

CommonFlags add_common_flags(CLI::App* cmd) {
    CommonFlags flags;
    cmd->add_option("--config", flags.config_path, "JSON run configuration");
    flags.out_opt = cmd->add_option("--out", flags.out, "Output directory");
    flags.seed_opt = cmd->add_option("--seed", flags.seed, "Scenario seed override");
    return flags;
}

RunConfig resolve_config(const CommonFlags& flags) {
    RunConfig cfg;
    if (!flags.config_path.empty()) cfg = load_run_config(flags.config_path);
    if (flags.out_opt->count() > 0) cfg.out = flags.out;
    if (flags.seed_opt->count() > 0) cfg.seed = flags.seed;
    return cfg;
}

std::vector<FusionMode> parse_modes(const std::vector<std::string>& names) {
    std::vector<FusionMode> modes;
    modes.reserve(names.size());
    for (const std::string& name : names) modes.push_back(fusion_mode_from_string(name));
    return canonicalize_modes(std::move(modes));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid UWB/IMU indoor localization: simulation, fusion, evaluation"};
    app.require_subcommand(1);

    CLI::App* gain_cmd = app.add_subcommand("gain", "Print the steady-state Kalman gain");
    double gain_q = 0.0;
    double gain_r = 0.0;
    double gain_p0 = 0.0;
    gain_cmd->add_option("--q", gain_q, "Process noise variance (m^2)")->required();
    gain_cmd->add_option("--r", gain_r, "Measurement noise variance (m^2)")->required();
    gain_cmd->add_option("--p0", gain_p0, "Initial covariance (m^2)");

    CLI::App* sim_cmd =
        app.add_subcommand("simulate", "Emit a synthetic dataset from a scenario");
    const CommonFlags sim_flags = add_common_flags(sim_cmd);

    CLI::App* fuse_cmd = app.add_subcommand("fuse", "Run fusion on a CSV dataset");
    const CommonFlags fuse_flags = add_common_flags(fuse_cmd);
    std::string fuse_anchors;
    std::string fuse_imu;
    std::string fuse_uwb;
    std::string fuse_truth;
    std::vector<std::string> fuse_modes;
    double fuse_tolerance = 0.1;
    fuse_cmd->add_option("--anchors", fuse_anchors, "anchors.csv path");
    fuse_cmd->add_option("--imu", fuse_imu, "imu.csv path");
    fuse_cmd->add_option("--uwb", fuse_uwb, "uwb.csv path");
    fuse_cmd->add_option("--truth", fuse_truth, "truth.csv path (enables evaluation)");
    fuse_cmd->add_option("--mode", fuse_modes,
                         "Fusion mode (repeatable): steady_state, classical, imu_only, uwb_only");
    CLI::Option* fuse_tol_opt =
        fuse_cmd->add_option("--tolerance", fuse_tolerance, "Epoch grouping window (s)");

    CLI::App* eval_cmd = app.add_subcommand("eval", "Compare estimates against ground truth");
    std::string eval_estimates;
    std::string eval_truth;
    std::string eval_out = "out";
    eval_cmd->add_option("--estimates", eval_estimates, "estimates.csv path")->required();
    eval_cmd->add_option("--truth", eval_truth, "truth.csv path")->required();
    eval_cmd->add_option("--out", eval_out, "Output directory");

    CLI::App* mc_cmd = app.add_subcommand("montecarlo", "Seeded batch of simulated runs");
    const CommonFlags mc_flags = add_common_flags(mc_cmd);
    std::vector<std::string> mc_modes;
    int mc_runs = 0;
    bool mc_serial = false;
    mc_cmd->add_option("--mode", mc_modes, "Fusion mode (repeatable)");
    CLI::Option* mc_runs_opt = mc_cmd->add_option("--runs", mc_runs, "Number of runs");
    mc_cmd->add_flag("--serial", mc_serial, "Run the batch on the serial reference driver");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gain_cmd->parsed()) {
            cmd_gain({gain_q, gain_r, gain_p0}, std::cout);
        } else if (sim_cmd->parsed()) {
            cmd_simulate(resolve_config(sim_flags));
        } else if (fuse_cmd->parsed()) {
            RunConfig cfg = resolve_config(fuse_flags);
            if (!fuse_anchors.empty() || !fuse_imu.empty() || !fuse_uwb.empty()) {
                DatasetPaths paths = cfg.dataset.value_or(DatasetPaths{});
                if (!fuse_anchors.empty()) paths.anchors_csv = fuse_anchors;
                if (!fuse_imu.empty()) paths.imu_csv = fuse_imu;
                if (!fuse_uwb.empty()) paths.uwb_csv = fuse_uwb;
                cfg.dataset = paths;
            }
            if (!fuse_truth.empty()) {
                if (!cfg.dataset) throw config_error("fuse: --truth given without dataset paths");
                cfg.dataset->truth_csv = fuse_truth;
            }
            if (!fuse_modes.empty()) cfg.modes = parse_modes(fuse_modes);
            if (fuse_tol_opt->count() > 0) {
                if (fuse_tolerance < 0.0)
                    throw config_error("fuse: --tolerance must be >= 0");
                cfg.epoch_tolerance = fuse_tolerance;
            }
            cmd_fuse(cfg);
        } else if (eval_cmd->parsed()) {
            cmd_eval(eval_estimates, eval_truth, eval_out, std::cout);
        } else if (mc_cmd->parsed()) {
            RunConfig cfg = resolve_config(mc_flags);
            if (!mc_modes.empty()) cfg.modes = parse_modes(mc_modes);
            if (mc_runs_opt->count() > 0) {
                if (mc_runs < 1) throw config_error("montecarlo: --runs must be >= 1");
                cfg.runs = mc_runs;
            }
            cmd_montecarlo(cfg, mc_serial, std::cout);
        }
        return 0;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
