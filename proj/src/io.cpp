#include "locfuse/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "src/format.hpp"

namespace locfuse {

using nlohmann::json;
using detail::fmt_fixed;

std::vector<Epoch> bucket_epochs(std::span<const RangeMeasurement> ranges, double tolerance) {
    if (tolerance < 0.0) throw config_error("bucket_epochs: tolerance must be >= 0");

    std::vector<Epoch> epochs;
    double prev_t = -HUGE_VAL;
    for (const RangeMeasurement& r : ranges) {
        if (r.t < prev_t) throw data_error("bucket_epochs: ranges not time-ordered");
        prev_t = r.t;

        if (epochs.empty() || r.t - epochs.back().t > tolerance) {
            epochs.push_back({r.t, {r}});
            continue;
        }
        Epoch& epoch = epochs.back();
        const bool duplicate =
            std::any_of(epoch.ranges.begin(), epoch.ranges.end(),
                        [&](const RangeMeasurement& held) { return held.anchor_id == r.anchor_id; });
        if (!duplicate) epoch.ranges.push_back(r);
    }
    return epochs;
}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw data_error(path + ": cannot open file");
    std::string content((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string::npos) end = content.size();
        std::string line = content.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        start = end + 1;
    }
    // The final newline leaves one empty trailer; a missing final newline
    // leaves none. Either way drop it.
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::vector<std::string_view> split_fields(const std::string& line) {
    std::vector<std::string_view> fields;
    const std::string_view sv = line;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = sv.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(sv.substr(start));
            return fields;
        }
        fields.push_back(sv.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string at(const std::string& path, std::size_t line_no) {
    return path + ":" + std::to_string(line_no) + ": ";
}

double parse_double(std::string_view field, const std::string& where) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw data_error(where + "bad number '" + std::string(field) + "'");
    if (!std::isfinite(value))
        throw data_error(where + "non-finite number '" + std::string(field) + "'");
    return value;
}

int parse_int(std::string_view field, const std::string& where) {
    int value = 0;
    const char* begin = field.data();
    const char* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw data_error(where + "bad integer '" + std::string(field) + "'");
    return value;
}

// Checked header + per-row field-count iteration shared by all readers.
template <typename RowFn>
void for_each_row(const std::string& path, const char* header, std::size_t n_fields, RowFn&& fn) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty() || lines[0] != header)
        throw data_error(at(path, 1) + "expected header '" + header + "'");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (lines[i].empty()) throw data_error(at(path, line_no) + "empty line");
        const auto fields = split_fields(lines[i]);
        if (fields.size() != n_fields)
            throw data_error(at(path, line_no) + "expected " + std::to_string(n_fields) +
                             " fields, got " + std::to_string(fields.size()));
        fn(fields, line_no);
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw data_error(path + ": cannot open file for writing");
    return file;
}

void finish_write(std::ofstream& file, const std::string& path) {
    file.flush();
    if (!file) throw data_error(path + ": write failed");
}

}  // namespace

std::vector<Anchor> read_anchors_csv(const std::string& path) {
    std::vector<Anchor> anchors;
    std::unordered_set<int> seen;
    for_each_row(path, "anchor_id,x_m,y_m,los", 4, [&](const auto& f, std::size_t line_no) {
        const std::string where = at(path, line_no);
        Anchor a;
        a.id = parse_int(f[0], where);
        a.x = parse_double(f[1], where);
        a.y = parse_double(f[2], where);
        if (f[3] == "1")
            a.los = true;
        else if (f[3] == "0")
            a.los = false;
        else
            throw data_error(where + "los must be 0 or 1");
        if (!seen.insert(a.id).second)
            throw data_error(where + "duplicate anchor id " + std::to_string(a.id));
        anchors.push_back(a);
    });
    if (anchors.empty()) throw data_error(path + ": no anchors");
    return anchors;
}

std::vector<ImuSample> read_imu_csv(const std::string& path) {
    std::vector<ImuSample> samples;
    for_each_row(path, "t_s,ax_body_mps2,ay_body_mps2,omega_z_radps", 4,
                 [&](const auto& f, std::size_t line_no) {
                     const std::string where = at(path, line_no);
                     ImuSample s;
                     s.t = parse_double(f[0], where);
                     s.ax_body = parse_double(f[1], where);
                     s.ay_body = parse_double(f[2], where);
                     s.omega_z = parse_double(f[3], where);
                     if (!samples.empty() && !(s.t > samples.back().t))
                         throw data_error(where + "timestamps must be strictly increasing");
                     samples.push_back(s);
                 });
    return samples;
}

std::vector<RangeMeasurement> read_uwb_csv(const std::string& path) {
    std::vector<RangeMeasurement> ranges;
    for_each_row(path, "t_s,anchor_id,range_m", 3, [&](const auto& f, std::size_t line_no) {
        const std::string where = at(path, line_no);
        RangeMeasurement r;
        r.t = parse_double(f[0], where);
        r.anchor_id = parse_int(f[1], where);
        r.distance = parse_double(f[2], where);
        if (r.distance < 0.0) throw data_error(where + "range must be >= 0");
        if (!ranges.empty() && r.t < ranges.back().t)
            throw data_error(where + "timestamps must be non-decreasing");
        ranges.push_back(r);
    });
    return ranges;
}

Trajectory read_truth_csv(const std::string& path) {
    Trajectory truth;
    for_each_row(path, "t_s,x_m,y_m,theta_rad", 4, [&](const auto& f, std::size_t line_no) {
        const std::string where = at(path, line_no);
        const double t = parse_double(f[0], where);
        if (t < 0.0) throw data_error(where + "t must be >= 0");
        if (!truth.empty() && !(t > truth.back().t))
            throw data_error(where + "timestamps must be strictly increasing");
        truth.append(TimedPose(t, parse_double(f[1], where), parse_double(f[2], where),
                               parse_double(f[3], where)));
    });
    return truth;
}

std::vector<std::pair<FusionMode, Trajectory>> read_estimates_csv(const std::string& path) {
    std::vector<std::pair<FusionMode, Trajectory>> groups;
    for_each_row(path, "t_s,x_m,y_m,mode", 4, [&](const auto& f, std::size_t line_no) {
        const std::string where = at(path, line_no);
        FusionMode mode;
        try {
            mode = fusion_mode_from_string(std::string(f[3]));
        } catch (const config_error&) {
            throw data_error(where + "unknown mode '" + std::string(f[3]) + "'");
        }
        const double t = parse_double(f[0], where);
        if (t < 0.0) throw data_error(where + "t must be >= 0");

        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == mode; });
        if (it == groups.end()) it = groups.insert(groups.end(), {mode, Trajectory{}});
        if (!it->second.empty() && !(t > it->second.back().t))
            throw data_error(where + "timestamps must be strictly increasing per mode");
        it->second.append(TimedPose(t, parse_double(f[1], where), parse_double(f[2], where), 0.0));
    });
    return groups;
}

Dataset ingest(const DatasetPaths& paths) {
    Dataset ds;
    ds.anchors = read_anchors_csv(paths.anchors_csv);
    ds.imu = read_imu_csv(paths.imu_csv);
    ds.uwb = read_uwb_csv(paths.uwb_csv);
    if (!paths.truth_csv.empty()) ds.truth = read_truth_csv(paths.truth_csv);

    std::unordered_set<int> known;
    for (const Anchor& a : ds.anchors) known.insert(a.id);
    for (std::size_t i = 0; i < ds.uwb.size(); ++i) {
        if (!known.contains(ds.uwb[i].anchor_id))
            throw data_error(at(paths.uwb_csv, i + 2) + "unknown anchor id " +
                             std::to_string(ds.uwb[i].anchor_id));
    }
    return ds;
}

void write_anchors_csv(const std::string& path, std::span<const Anchor> anchors) {
    auto file = open_out(path);
    file << "anchor_id,x_m,y_m,los\n";
    for (const Anchor& a : anchors)
        file << a.id << ',' << fmt_fixed(a.x, 9) << ',' << fmt_fixed(a.y, 9) << ','
             << (a.los ? 1 : 0) << '\n';
    finish_write(file, path);
}

void write_imu_csv(const std::string& path, std::span<const ImuSample> imu) {
    auto file = open_out(path);
    file << "t_s,ax_body_mps2,ay_body_mps2,omega_z_radps\n";
    for (const ImuSample& s : imu)
        file << fmt_fixed(s.t, 9) << ',' << fmt_fixed(s.ax_body, 9) << ','
             << fmt_fixed(s.ay_body, 9) << ',' << fmt_fixed(s.omega_z, 9) << '\n';
    finish_write(file, path);
}

void write_uwb_csv(const std::string& path, std::span<const RangeMeasurement> uwb) {
    auto file = open_out(path);
    file << "t_s,anchor_id,range_m\n";
    for (const RangeMeasurement& r : uwb)
        file << fmt_fixed(r.t, 9) << ',' << r.anchor_id << ',' << fmt_fixed(r.distance, 9) << '\n';
    finish_write(file, path);
}

void write_truth_csv(const std::string& path, const Trajectory& truth) {
    auto file = open_out(path);
    file << "t_s,x_m,y_m,theta_rad\n";
    for (const TimedPose& p : truth)
        file << fmt_fixed(p.t, 9) << ',' << fmt_fixed(p.x, 9) << ',' << fmt_fixed(p.y, 9) << ','
             << fmt_fixed(p.theta, 9) << '\n';
    finish_write(file, path);
}

void emit(std::span<const ModeOutput> outputs, const std::string& out_dir) {
    if (outputs.empty()) throw data_error("emit: nothing to write");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw data_error(out_dir + ": cannot create directory (" + ec.message() + ")");

    {
        auto file = open_out(out_dir + "/estimates.csv");
        file << "t_s,x_m,y_m,mode\n";
        for (const ModeOutput& mo : outputs)
            for (const TimedPose& p : mo.estimates)
                file << fmt_fixed(p.t, 6) << ',' << fmt_fixed(p.x, 6) << ',' << fmt_fixed(p.y, 6)
                     << ',' << to_string(mo.mode) << '\n';
        finish_write(file, out_dir + "/estimates.csv");
    }

    const bool any_report =
        std::any_of(outputs.begin(), outputs.end(), [](const ModeOutput& mo) { return bool(mo.report); });
    if (!any_report) return;

    {
        auto file = open_out(out_dir + "/errors.csv");
        file << "t_s,error_m,mode\n";
        for (const ModeOutput& mo : outputs) {
            if (!mo.report) continue;
            for (const auto& [t, err] : mo.report->error_series)
                file << fmt_fixed(t, 6) << ',' << fmt_fixed(err, 6) << ',' << to_string(mo.mode)
                     << '\n';
        }
        finish_write(file, out_dir + "/errors.csv");
    }

    {
        auto file = open_out(out_dir + "/report.json");
        const auto first = std::find_if(outputs.begin(), outputs.end(),
                                        [](const ModeOutput& mo) { return bool(mo.report); });
        file << "{\n";
        file << "  \"rmse_m\": " << fmt_fixed(first->report->rmse, 6) << ",\n";
        file << "  \"max_error_m\": " << fmt_fixed(first->report->max_error, 6) << ",\n";
        file << "  \"n_samples\": " << first->report->n_samples << ",\n";
        file << "  \"modes\": {\n";
        bool first_entry = true;
        for (const ModeOutput& mo : outputs) {
            if (!mo.report) continue;
            if (!first_entry) file << ",\n";
            first_entry = false;
            file << "    \"" << to_string(mo.mode) << "\": {\"rmse_m\": "
                 << fmt_fixed(mo.report->rmse, 6)
                 << ", \"max_error_m\": " << fmt_fixed(mo.report->max_error, 6)
                 << ", \"n_samples\": " << mo.report->n_samples << "}";
        }
        file << "\n  }\n}\n";
        finish_write(file, out_dir + "/report.json");
    }
}

std::vector<FusionMode> all_fusion_modes() {
    return {FusionMode::steady_state, FusionMode::classical, FusionMode::imu_only,
            FusionMode::uwb_only};
}

std::vector<FusionMode> canonicalize_modes(std::vector<FusionMode> modes) {
    std::sort(modes.begin(), modes.end());
    modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
    return modes;
}

namespace {

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                const char* context) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw config_error(std::string("config: unknown key '") + key + "' in " + context);
    }
}

const json& member_object(const json& j, const char* key) {
    const json& v = j.at(key);
    if (!v.is_object())
        throw config_error(std::string("config: '") + key + "' must be an object");
    return v;
}

ScenarioSpec scenario_from_json(const json& j) {
    if (!j.is_object()) throw config_error("config: 'scenario' must be an object");
    check_keys(j,
               {"waypoints", "speed_profile", "anchors", "imu_source_rate_hz", "imu_rate_hz",
                "uwb_rate_hz", "noise", "channel", "seed"},
               "scenario");

    ScenarioSpec spec = default_replication_spec();
    if (j.contains("waypoints")) {
        spec.waypoints.clear();
        for (const json& w : j.at("waypoints")) {
            if (!w.is_array() || w.size() != 2)
                throw config_error("config: each waypoint must be [x, y]");
            spec.waypoints.push_back({w[0].get<double>(), w[1].get<double>()});
        }
    }
    if (j.contains("speed_profile")) {
        spec.speed_profile.clear();
        for (const json& p : j.at("speed_profile")) {
            if (!p.is_array() || p.size() != 2)
                throw config_error("config: each speed profile point must be [s, v]");
            spec.speed_profile.push_back({p[0].get<double>(), p[1].get<double>()});
        }
    }
    if (j.contains("anchors")) {
        spec.anchors.clear();
        for (const json& a : j.at("anchors")) {
            if (!a.is_object()) throw config_error("config: each anchor must be an object");
            check_keys(a, {"id", "x", "y", "los"}, "anchor");
            Anchor anchor;
            anchor.id = a.at("id").get<int>();
            anchor.x = a.at("x").get<double>();
            anchor.y = a.at("y").get<double>();
            const json& los = a.at("los");
            anchor.los = los.is_boolean() ? los.get<bool>() : los.get<int>() != 0;
            spec.anchors.push_back(anchor);
        }
    }
    if (j.contains("imu_source_rate_hz"))
        spec.imu_source_rate_hz = j.at("imu_source_rate_hz").get<double>();
    if (j.contains("imu_rate_hz")) spec.imu_rate_hz = j.at("imu_rate_hz").get<double>();
    if (j.contains("uwb_rate_hz")) spec.uwb_rate_hz = j.at("uwb_rate_hz").get<double>();
    if (j.contains("noise")) {
        const json& n = member_object(j, "noise");
        check_keys(n, {"accel_snr_db", "accel_noise_std", "gyro_bias", "gyro_noise_std"},
                   "noise");
        if (n.contains("accel_snr_db") && n.contains("accel_noise_std"))
            throw config_error("config: set only one of accel_snr_db / accel_noise_std");
        if (n.contains("accel_snr_db")) {
            spec.noise.accel_snr_db = n.at("accel_snr_db").get<double>();
            spec.noise.accel_noise_std.reset();
        }
        if (n.contains("accel_noise_std")) {
            spec.noise.accel_noise_std = n.at("accel_noise_std").get<double>();
            spec.noise.accel_snr_db.reset();
        }
        if (n.contains("gyro_bias")) spec.noise.gyro_bias = n.at("gyro_bias").get<double>();
        if (n.contains("gyro_noise_std"))
            spec.noise.gyro_noise_std = n.at("gyro_noise_std").get<double>();
    }
    if (j.contains("channel")) {
        const json& c = member_object(j, "channel");
        check_keys(c,
                   {"tap_arrival_rate", "power_decay_const", "num_taps_max",
                    "nlos_excess_delay_mean", "los_direct_power_boost", "delay_resolution"},
                   "channel");
        if (c.contains("tap_arrival_rate"))
            spec.channel.tap_arrival_rate = c.at("tap_arrival_rate").get<double>();
        if (c.contains("power_decay_const"))
            spec.channel.power_decay_const = c.at("power_decay_const").get<double>();
        if (c.contains("num_taps_max")) spec.channel.num_taps_max = c.at("num_taps_max").get<int>();
        if (c.contains("nlos_excess_delay_mean"))
            spec.channel.nlos_excess_delay_mean = c.at("nlos_excess_delay_mean").get<double>();
        if (c.contains("los_direct_power_boost"))
            spec.channel.los_direct_power_boost = c.at("los_direct_power_boost").get<double>();
        if (c.contains("delay_resolution"))
            spec.channel.delay_resolution = c.at("delay_resolution").get<double>();
    }
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    return spec;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw config_error(path + ": cannot open config file");

    json j;
    try {
        j = json::parse(file);
    } catch (const json::exception& e) {
        throw config_error(path + ": " + e.what());
    }

    try {
        if (!j.is_object()) throw config_error("config: top level must be an object");
        check_keys(j,
                   {"scenario", "dataset", "filter", "modes", "out", "epoch_tolerance", "seed",
                    "runs"},
                   "config");

        RunConfig cfg;
        if (j.contains("scenario") && j.contains("dataset"))
            throw config_error("config: give either 'scenario' or 'dataset', not both");
        if (j.contains("scenario")) cfg.scenario = scenario_from_json(j.at("scenario"));
        if (j.contains("dataset")) {
            const json& d = member_object(j, "dataset");
            check_keys(d, {"anchors_csv", "imu_csv", "uwb_csv", "truth_csv"}, "dataset");
            DatasetPaths paths;
            paths.anchors_csv = d.at("anchors_csv").get<std::string>();
            paths.imu_csv = d.at("imu_csv").get<std::string>();
            paths.uwb_csv = d.at("uwb_csv").get<std::string>();
            if (d.contains("truth_csv")) paths.truth_csv = d.at("truth_csv").get<std::string>();
            cfg.dataset = paths;
        }
        if (j.contains("filter")) {
            const json& f = member_object(j, "filter");
            const bool has_gain = f.contains("kx") || f.contains("ky");
            const bool has_config = f.contains("q") || f.contains("r") || f.contains("p0");
            if (has_gain == has_config)
                throw config_error("config: 'filter' must hold either {kx, ky} or {q, r[, p0]}");
            if (has_gain) {
                check_keys(f, {"kx", "ky"}, "filter");
                FilterGain gain;
                gain.kx = f.at("kx").get<double>();
                gain.ky = f.at("ky").get<double>();
                gain.validate();
                cfg.filter_gain = gain;
            } else {
                check_keys(f, {"q", "r", "p0"}, "filter");
                FilterConfig fc;
                fc.q = f.at("q").get<double>();
                fc.r = f.at("r").get<double>();
                if (f.contains("p0")) fc.p0 = f.at("p0").get<double>();
                fc.validate();
                cfg.filter_config = fc;
            }
        }
        if (j.contains("modes")) {
            std::vector<FusionMode> modes;
            for (const json& m : j.at("modes"))
                modes.push_back(fusion_mode_from_string(m.get<std::string>()));
            if (modes.empty()) throw config_error("config: 'modes' must not be empty");
            cfg.modes = canonicalize_modes(std::move(modes));
        }
        if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
        if (j.contains("epoch_tolerance")) {
            cfg.epoch_tolerance = j.at("epoch_tolerance").get<double>();
            if (cfg.epoch_tolerance < 0.0)
                throw config_error("config: epoch_tolerance must be >= 0");
        }
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("runs")) {
            cfg.runs = j.at("runs").get<int>();
            if (cfg.runs < 1) throw config_error("config: runs must be >= 1");
        }
        return cfg;
    } catch (const json::exception& e) {
        throw config_error(path + ": " + e.what());
    }
}

}  // namespace locfuse
