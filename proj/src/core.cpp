#include "locfuse/core.hpp"

#include <algorithm>

namespace locfuse {

Trajectory::Trajectory(std::vector<TimedPose> poses) : poses_(std::move(poses)) {
    for (std::size_t i = 1; i < poses_.size(); ++i) {
        if (!(poses_[i].t > poses_[i - 1].t))
            throw data_error("Trajectory: timestamps must be strictly increasing (index " +
                             std::to_string(i) + ")");
    }
}

void Trajectory::append(const TimedPose& p) {
    if (!poses_.empty() && !(p.t > poses_.back().t))
        throw data_error("Trajectory::append: timestamp " + std::to_string(p.t) +
                         " not after " + std::to_string(poses_.back().t));
    poses_.push_back(p);
}

TimedPose interpolate(const Trajectory& traj, double t) {
    if (traj.empty()) throw data_error("interpolate: empty trajectory");
    if (t < traj.front().t || t > traj.back().t)
        throw data_error("interpolate: t=" + std::to_string(t) + " outside span [" +
                         std::to_string(traj.front().t) + ", " + std::to_string(traj.back().t) +
                         "]");

    // First pose with time >= t.
    const auto& ps = traj.poses();
    auto it = std::lower_bound(ps.begin(), ps.end(), t,
                               [](const TimedPose& p, double v) { return p.t < v; });
    if (it->t == t) return *it;  // exact node, returned untouched

    const TimedPose& b = *it;
    const TimedPose& a = *(it - 1);
    const double u = (t - a.t) / (b.t - a.t);
    const double theta = normalize_angle(a.theta + u * angle_diff(b.theta, a.theta));
    return TimedPose(t, a.x + u * (b.x - a.x), a.y + u * (b.y - a.y), theta);
}

double path_length(const Trajectory& traj) {
    if (traj.empty()) throw data_error("path_length: empty trajectory");
    double len = 0.0;
    for (std::size_t i = 1; i < traj.size(); ++i)
        len += std::hypot(traj[i].x - traj[i - 1].x, traj[i].y - traj[i - 1].y);
    return len;
}

}  // namespace locfuse
