// Shared domain types and trajectory utilities for the UWB/IMU localization
// pipeline. Time is seconds (double) relative to scenario start; headings are
// radians about the vertical axis, normalized to (-pi, pi].
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace locfuse {

// Error taxonomy; the CLI maps these to exit codes 2/3/4.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Wrap an angle to (-pi, pi].
inline double normalize_angle(double a) {
    double r = std::fmod(a + M_PI, 2.0 * M_PI);
    if (r <= 0.0) r += 2.0 * M_PI;
    return r - M_PI;
}

/// Signed shortest-arc difference b - a, in (-pi, pi].
inline double angle_diff(double b, double a) { return normalize_angle(b - a); }

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm() const { return std::hypot(x, y); }
};

/// A timestamped planar pose. Heading is normalized on construction.
struct TimedPose {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    TimedPose() = default;
    TimedPose(double t_, double x_, double y_, double theta_)
        : t(t_), x(x_), y(y_), theta(normalize_angle(theta_)) {
        if (!(std::isfinite(t) && t >= 0.0))
            throw std::invalid_argument("TimedPose: t must be finite and non-negative");
        if (!(std::isfinite(x) && std::isfinite(y) && std::isfinite(theta)))
            throw std::invalid_argument("TimedPose: coordinates must be finite");
    }

    Vec2 position() const { return {x, y}; }
};

/// Full planar motion state: position, velocity, acceleration (global frame),
/// heading and angular rate.
struct KinematicState {
    double x = 0.0;
    double y = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    double ax = 0.0;
    double ay = 0.0;
    double theta = 0.0;
    double omega = 0.0;
};

/// One inertial reading: body-frame accelerations plus angular rate about z.
struct ImuSample {
    double t = 0.0;
    double ax_body = 0.0;
    double ay_body = 0.0;
    double omega_z = 0.0;
};

/// A ranging reference node at a known position. `los` marks line-of-sight
/// links to the tracked path.
struct Anchor {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
    bool los = true;
};

/// One TOA-derived distance from a single anchor.
struct RangeMeasurement {
    double t = 0.0;
    int anchor_id = 0;
    double distance = 0.0;
};

/// An ordered sequence of TimedPose with strictly increasing timestamps.
class Trajectory {
public:
    Trajectory() = default;
    explicit Trajectory(std::vector<TimedPose> poses);

    /// Appends a pose; throws data_error unless its timestamp exceeds the last.
    void append(const TimedPose& p);

    const std::vector<TimedPose>& poses() const { return poses_; }
    bool empty() const { return poses_.empty(); }
    std::size_t size() const { return poses_.size(); }
    const TimedPose& front() const { return poses_.front(); }
    const TimedPose& back() const { return poses_.back(); }
    const TimedPose& operator[](std::size_t i) const { return poses_[i]; }
    auto begin() const { return poses_.begin(); }
    auto end() const { return poses_.end(); }

private:
    std::vector<TimedPose> poses_;
};

/// Pose at time t by linear interpolation of position and shortest-arc
/// interpolation of heading. t must lie within the trajectory span.
TimedPose interpolate(const Trajectory& traj, double t);

/// Sum of Euclidean segment lengths; 0 for a single pose.
double path_length(const Trajectory& traj);

}  // namespace locfuse
