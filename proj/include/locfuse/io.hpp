// Dataset CSV ingestion/emission, JSON run configuration, epoch bucketing,
// and the subcommand drivers shared by the CLI and the test suites.
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "locfuse/core.hpp"
#include "locfuse/fusion.hpp"
#include "locfuse/scenario.hpp"

namespace locfuse {

/// Ranges grouped to one measurement instant; t is the first member's time.
struct Epoch {
    double t = 0.0;
    std::vector<RangeMeasurement> ranges;
};

/// Greedy grouping of time-ordered ranges: a range joins the current epoch
/// when its t is within tolerance of the epoch's first range, else it opens a
/// new one. At most one range per anchor per epoch; duplicates keep the
/// earliest.
std::vector<Epoch> bucket_epochs(std::span<const RangeMeasurement> ranges, double tolerance);

struct DatasetPaths {
    std::string anchors_csv;
    std::string imu_csv;
    std::string uwb_csv;
    std::string truth_csv;  // empty disables evaluation
};

struct Dataset {
    std::vector<Anchor> anchors;
    std::vector<ImuSample> imu;
    std::vector<RangeMeasurement> uwb;
    std::optional<Trajectory> truth;
};

// Readers validate the exact header, field counts, numeric fields, and time
// ordering; errors carry file:line positions.
std::vector<Anchor> read_anchors_csv(const std::string& path);
std::vector<ImuSample> read_imu_csv(const std::string& path);
std::vector<RangeMeasurement> read_uwb_csv(const std::string& path);
Trajectory read_truth_csv(const std::string& path);

/// Estimates grouped by the mode column, preserving file order within a mode.
std::vector<std::pair<FusionMode, Trajectory>> read_estimates_csv(const std::string& path);

/// Reads the four dataset files and cross-checks uwb anchor ids against
/// anchors.csv.
Dataset ingest(const DatasetPaths& paths);

void write_anchors_csv(const std::string& path, std::span<const Anchor> anchors);
void write_imu_csv(const std::string& path, std::span<const ImuSample> imu);
void write_uwb_csv(const std::string& path, std::span<const RangeMeasurement> uwb);
void write_truth_csv(const std::string& path, const Trajectory& truth);

struct ModeOutput {
    FusionMode mode = FusionMode::steady_state;
    Trajectory estimates;
    std::optional<EvalReport> report;  // absent when no truth was available
};

/// Writes estimates.csv (all modes, mode column), and, when any report is
/// present, errors.csv and report.json. All values use 6 decimal places;
/// reruns on equal inputs are byte-identical.
void emit(std::span<const ModeOutput> outputs, const std::string& out_dir);

struct RunConfig {
    std::optional<ScenarioSpec> scenario;
    std::optional<DatasetPaths> dataset;
    std::optional<FilterConfig> filter_config;
    std::optional<FilterGain> filter_gain;
    std::vector<FusionMode> modes;  // canonical enum order, deduplicated
    std::string out = "out";
    double epoch_tolerance = 0.1;
    std::optional<std::uint64_t> seed;  // overrides the scenario seed when set
    int runs = 20;
};

/// Parses the JSON run configuration. Keys mirror the field names; "scenario"
/// starts from default_replication_spec() and overrides per key; unknown keys
/// are rejected.
RunConfig load_run_config(const std::string& path);

/// All four modes in canonical order; the default when a config lists none.
std::vector<FusionMode> all_fusion_modes();

/// Sorts into canonical enum order and removes duplicates, so output files do
/// not depend on the order modes were requested in.
std::vector<FusionMode> canonicalize_modes(std::vector<FusionMode> modes);

// Subcommand drivers. They throw config_error / data_error / numeric_error;
// the CLI maps those to exit codes 2 / 3 / 4.
void cmd_gain(const FilterConfig& cfg, std::ostream& out);
void cmd_simulate(const RunConfig& cfg);
void cmd_fuse(const RunConfig& cfg);
void cmd_eval(const std::string& estimates_csv, const std::string& truth_csv,
              const std::string& out_dir, std::ostream& out);
void cmd_montecarlo(const RunConfig& cfg, bool serial, std::ostream& out);

}  // namespace locfuse
