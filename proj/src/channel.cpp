#include "locfuse/channel.hpp"

#include <cmath>

#include "locfuse/rng.hpp"

namespace locfuse {

void ChannelParams::validate() const {
    if (!(tap_arrival_rate > 0.0) || !(power_decay_const > 0.0) || num_taps_max < 1 ||
        !(nlos_excess_delay_mean > 0.0) || !(los_direct_power_boost > 0.0))
        throw config_error("ChannelParams: rates, decay constants and boosts must be positive");
    if (delay_resolution < 0.0) throw config_error("ChannelParams: delay_resolution must be >= 0");
}

ChannelRealization realize_channel(double true_distance, bool los, const ChannelParams& params,
                                   std::uint64_t rng_seed) {
    params.validate();
    if (!(true_distance > 0.0))
        throw std::invalid_argument("realize_channel: distance must be > 0");

    Rng rng(rng_seed);
    const double direct_delay = true_distance / kSpeedOfLight;
    const double first_delay =
        los ? direct_delay : direct_delay + rng.exponential(params.nlos_excess_delay_mean);

    ChannelRealization ch;
    ch.los = los;
    ch.taps.reserve(static_cast<std::size_t>(params.num_taps_max));

    double delay = first_delay;
    for (int k = 0; k < params.num_taps_max; ++k) {
        const double excess = delay - first_delay;
        double mean_power = std::exp(-excess / params.power_decay_const);
        if (k == 0 && los) mean_power *= params.los_direct_power_boost;
        ch.taps.push_back({rng.rayleigh_mean_square(mean_power), rng.uniform(0.0, 2.0 * M_PI),
                           delay});
        delay += rng.exponential(1.0 / params.tap_arrival_rate);
    }
    return ch;
}

double extract_toa(const ChannelRealization& ch) {
    if (ch.taps.empty()) throw data_error("extract_toa: empty tap list");
    std::size_t best = 0;
    for (std::size_t k = 1; k < ch.taps.size(); ++k) {
        // Strict > keeps the earliest delay on magnitude ties (taps are
        // sorted by increasing delay).
        if (ch.taps[k].magnitude > ch.taps[best].magnitude) best = k;
    }
    return ch.taps[best].delay;
}

double range_from_toa(double t, double delay_resolution) {
    if (t < 0.0) throw std::invalid_argument("range_from_toa: t must be >= 0");
    if (delay_resolution > 0.0) t = std::round(t / delay_resolution) * delay_resolution;
    return kSpeedOfLight * t;
}

std::vector<RangeMeasurement> simulate_ranges(const Trajectory& truth,
                                              std::span<const Anchor> anchors, double rate_hz,
                                              const ChannelParams& params,
                                              std::uint64_t rng_seed) {
    params.validate();
    if (anchors.empty()) throw config_error("simulate_ranges: anchor list is empty");
    if (!(rate_hz > 0.0)) throw config_error("simulate_ranges: rate_hz must be > 0");
    if (truth.empty()) throw data_error("simulate_ranges: empty truth trajectory");

    const double t0 = truth.front().t;
    const double t_end = truth.back().t;
    const double step = 1.0 / rate_hz;
    const auto n_ticks = static_cast<std::size_t>(std::floor((t_end - t0) / step + 1e-9)) + 1;

    std::vector<RangeMeasurement> out(n_ticks * anchors.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long idx = 0; idx < static_cast<long long>(out.size()); ++idx) {
        const std::size_t tick = static_cast<std::size_t>(idx) / anchors.size();
        const std::size_t ai = static_cast<std::size_t>(idx) % anchors.size();
        // Clamp so fp drift in t0 + k*step never lands past the truth span.
        const double t = std::min(t0 + static_cast<double>(tick) * step, t_end);
        const TimedPose pose = interpolate(truth, t);
        const Anchor& anchor = anchors[ai];
        const double d = std::hypot(pose.x - anchor.x, pose.y - anchor.y);
        const auto sub_seed =
            mix_seed(rng_seed, static_cast<std::uint64_t>(tick), static_cast<std::uint64_t>(anchor.id));
        const ChannelRealization ch = realize_channel(d, anchor.los, params, sub_seed);
        out[static_cast<std::size_t>(idx)] = {t, anchor.id,
                                              range_from_toa(extract_toa(ch), params.delay_resolution)};
    }
    return out;
}

}  // namespace locfuse
