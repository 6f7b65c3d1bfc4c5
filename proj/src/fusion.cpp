#include "locfuse/fusion.hpp"

#include <cmath>
#include <unordered_map>

#include "locfuse/io.hpp"
#include "locfuse/localization.hpp"
#include "locfuse/imu.hpp"

namespace locfuse {

void FilterConfig::validate() const {
    if (q < 0.0 || !(r > 0.0) || p0 < 0.0)
        throw config_error("FilterConfig: need q >= 0, r > 0, p0 >= 0");
}

void FilterGain::validate() const {
    if (!(kx >= 0.0 && kx <= 1.0 && ky >= 0.0 && ky <= 1.0))
        throw config_error("FilterGain: gains must lie in [0, 1]");
}

FilterGain compute_steady_state_gain(const FilterConfig& cfg) {
    cfg.validate();
    double p = 0.0;
    double k = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double p_minus = p + cfg.q;
        k = p_minus / (p_minus + cfg.r);
        const double p_next = (1.0 - k) * p_minus;
        const bool converged = std::abs(p_next - p) < 1e-9;
        p = p_next;
        if (converged) return {k, k};
    }
    throw numeric_error("compute_steady_state_gain: Riccati recursion did not converge");
}

FilterState sskf_predict(const FilterState& state, const Vec2& displacement) {
    FilterState next = state;
    next.x += displacement.x;
    next.y += displacement.y;
    return next;
}

FilterState sskf_update(const FilterState& state, const Vec2& fix, const FilterGain& gain) {
    FilterState next = state;
    next.x += gain.kx * (fix.x - state.x);
    next.y += gain.ky * (fix.y - state.y);
    return next;
}

FilterState classical_kf_predict(const FilterState& state, const Vec2& displacement,
                                 const FilterConfig& cfg) {
    FilterState next = state;
    next.x += displacement.x;
    next.y += displacement.y;
    next.px += cfg.q;
    next.py += cfg.q;
    return next;
}

FilterState classical_kf_update(const FilterState& state, const Vec2& fix,
                                const FilterConfig& cfg) {
    FilterState next = state;
    const double kx = state.px / (state.px + cfg.r);
    const double ky = state.py / (state.py + cfg.r);
    next.x += kx * (fix.x - state.x);
    next.y += ky * (fix.y - state.y);
    next.px = (1.0 - kx) * state.px;
    next.py = (1.0 - ky) * state.py;
    return next;
}

FilterState classical_kf_step(const FilterState& state, const Vec2& displacement,
                              const std::optional<Vec2>& fix, const FilterConfig& cfg) {
    cfg.validate();
    FilterState next = classical_kf_predict(state, displacement, cfg);
    if (fix) next = classical_kf_update(next, *fix, cfg);
    return next;
}

std::string to_string(FusionMode mode) {
    switch (mode) {
        case FusionMode::steady_state: return "steady_state";
        case FusionMode::classical: return "classical";
        case FusionMode::imu_only: return "imu_only";
        case FusionMode::uwb_only: return "uwb_only";
    }
    throw std::invalid_argument("to_string: unknown FusionMode");
}

FusionMode fusion_mode_from_string(const std::string& name) {
    if (name == "steady_state") return FusionMode::steady_state;
    if (name == "classical") return FusionMode::classical;
    if (name == "imu_only") return FusionMode::imu_only;
    if (name == "uwb_only") return FusionMode::uwb_only;
    throw config_error("unknown fusion mode: " + name);
}

namespace {

std::vector<AnchorRange> join_ranges(const Epoch& epoch,
                                     const std::unordered_map<int, Anchor>& anchor_by_id) {
    std::vector<AnchorRange> joined;
    joined.reserve(epoch.ranges.size());
    for (const RangeMeasurement& r : epoch.ranges) {
        const auto it = anchor_by_id.find(r.anchor_id);
        if (it == anchor_by_id.end())
            throw data_error("run_fusion: range refers to unknown anchor id " +
                             std::to_string(r.anchor_id));
        joined.push_back({it->second, r.distance});
    }
    return joined;
}

}  // namespace

FusionResult run_fusion(const KinematicState& initial, std::span<const ImuSample> imu,
                        std::span<const RangeMeasurement> uwb, std::span<const Anchor> anchors,
                        const FusionOptions& options) {
    if (options.mode == FusionMode::steady_state) {
        if (!options.gain) throw config_error("run_fusion: steady_state mode requires a gain");
        options.gain->validate();
    }
    if (options.mode == FusionMode::classical) {
        if (!options.config) throw config_error("run_fusion: classical mode requires a config");
        options.config->validate();
    }

    std::unordered_map<int, Anchor> anchor_by_id;
    for (const Anchor& a : anchors) anchor_by_id.emplace(a.id, a);

    const std::vector<Epoch> epochs = bucket_epochs(uwb, options.epoch_tolerance);

    FusionResult result;
    std::size_t next_epoch = 0;

    if (options.mode == FusionMode::uwb_only) {
        for (const Epoch& epoch : epochs) {
            const auto joined = join_ranges(epoch, anchor_by_id);
            if (joined.empty()) {
                ++result.skipped_epochs;
                continue;
            }
            const Vec2 fix = min_max(joined);
            result.estimates.append(TimedPose(epoch.t, fix.x, fix.y, 0.0));
        }
        return result;
    }

    const bool use_updates =
        options.mode == FusionMode::steady_state || options.mode == FusionMode::classical;
    const bool classical = options.mode == FusionMode::classical;

    FilterState est;
    est.x = initial.x;
    est.y = initial.y;
    if (classical) est.px = est.py = options.config->p0;

    KinematicState dr = initial;

    auto apply_pending_epochs = [&](double tick_time) {
        while (next_epoch < epochs.size() && epochs[next_epoch].t <= tick_time) {
            const Epoch& epoch = epochs[next_epoch++];
            if (!use_updates) continue;
            const auto joined = join_ranges(epoch, anchor_by_id);
            if (joined.empty()) {
                ++result.skipped_epochs;
                continue;
            }
            const Vec2 fix = min_max(joined);
            // Classical mode runs one full filter step per epoch: the cycle's
            // process noise enters here, so its gain sequence converges to the
            // same fixed point the constant gain was computed from.
            est = classical ? classical_kf_step(est, Vec2{0.0, 0.0}, fix, *options.config)
                            : sskf_update(est, fix, *options.gain);
        }
    };

    const double t0 = imu.empty() ? 0.0 : imu[0].t;
    apply_pending_epochs(t0);
    result.estimates.append(TimedPose(t0, est.x, est.y, dr.theta));

    for (std::size_t k = 1; k < imu.size(); ++k) {
        const double dt = imu[k].t - imu[k - 1].t;
        if (!(dt > 0.0))
            throw data_error("run_fusion: non-monotonic IMU timestamps at sample " +
                             std::to_string(k));
        const Vec2 before{dr.x, dr.y};
        dr = dead_reckon_step(dr, imu[k], dt);
        const Vec2 displacement = Vec2{dr.x, dr.y} - before;

        // Position carries the dead-reckoned displacement every tick in both
        // filter modes; classical covariance growth happens per epoch above.
        est = sskf_predict(est, displacement);
        apply_pending_epochs(imu[k].t);
        result.estimates.append(TimedPose(imu[k].t, est.x, est.y, dr.theta));
    }

    // Epochs later than the last IMU tick are never applied.
    result.skipped_epochs += epochs.size() - next_epoch;
    return result;
}

}  // namespace locfuse
