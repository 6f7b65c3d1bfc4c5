#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "locfuse/core.hpp"

using namespace locfuse;

TEST_CASE("normalize_angle wraps into (-pi, pi]") {
    CHECK(normalize_angle(0.0) == doctest::Approx(0.0));
    CHECK(normalize_angle(M_PI) == doctest::Approx(M_PI));
    CHECK(normalize_angle(-M_PI) == doctest::Approx(M_PI));
    CHECK(normalize_angle(3.0 * M_PI) == doctest::Approx(M_PI));
    CHECK(normalize_angle(2.0 * M_PI) == doctest::Approx(0.0));
    CHECK(normalize_angle(-0.5) == doctest::Approx(-0.5));
    for (double a = -20.0; a <= 20.0; a += 0.37) {
        const double r = normalize_angle(a);
        CHECK(r > -M_PI - 1e-12);
        CHECK(r <= M_PI + 1e-12);
        CHECK(std::abs(std::remainder(r - a, 2.0 * M_PI)) < 1e-9);
    }
}

TEST_CASE("angle_diff takes the shorter arc") {
    CHECK(angle_diff(3.0, -3.0) == doctest::Approx(-(2.0 * M_PI - 6.0)));
    CHECK(angle_diff(-3.0, 3.0) == doctest::Approx(2.0 * M_PI - 6.0));
    CHECK(angle_diff(0.5, 0.2) == doctest::Approx(0.3));
}

TEST_CASE("Vec2 arithmetic and norm") {
    const Vec2 v{3.0, 4.0};
    CHECK(v.norm() == doctest::Approx(5.0));
    const Vec2 w = v + Vec2{1.0, -1.0};
    CHECK(w.x == doctest::Approx(4.0));
    CHECK(w.y == doctest::Approx(3.0));
    const Vec2 d = v - Vec2{1.0, 1.0};
    CHECK(d.x == doctest::Approx(2.0));
    const Vec2 s = v * 2.0;
    CHECK(s.y == doctest::Approx(8.0));
}

TEST_CASE("TimedPose validates inputs and normalizes theta") {
    CHECK_THROWS_AS(TimedPose(-1.0, 0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(TimedPose(0.0, HUGE_VAL, 0.0, 0.0), std::invalid_argument);
    const TimedPose p(0.0, 1.0, 2.0, 3.0 * M_PI);
    CHECK(p.theta == doctest::Approx(M_PI));
}

TEST_CASE("Trajectory enforces strictly increasing timestamps") {
    Trajectory traj;
    traj.append(TimedPose(0.0, 0.0, 0.0, 0.0));
    traj.append(TimedPose(1.0, 1.0, 0.0, 0.0));
    CHECK_THROWS_AS(traj.append(TimedPose(1.0, 2.0, 0.0, 0.0)), data_error);
    CHECK_THROWS_AS(Trajectory({TimedPose(1.0, 0, 0, 0), TimedPose(0.5, 0, 0, 0)}), data_error);
    CHECK(traj.size() == 2);
}

TEST_CASE("interpolate: exact nodes, midpoints, wrap-aware heading") {
    Trajectory traj;
    traj.append(TimedPose(0.0, 0.0, 0.0, 3.0));
    traj.append(TimedPose(1.0, 1.0, 1.0, -3.0));

    const TimedPose node = interpolate(traj, 0.0);
    CHECK(node.x == 0.0);
    CHECK(node.theta == doctest::Approx(3.0));

    const TimedPose mid = interpolate(traj, 0.5);
    CHECK(mid.x == doctest::Approx(0.5));
    CHECK(mid.y == doctest::Approx(0.5));
    // Shorter arc from 3.0 to -3.0 passes through pi, not zero.
    CHECK(mid.theta == doctest::Approx(M_PI));

    CHECK_THROWS_AS(interpolate(traj, -0.1), data_error);
    CHECK_THROWS_AS(interpolate(traj, 1.1), data_error);
    CHECK_THROWS_AS(interpolate(Trajectory{}, 0.0), data_error);
}

TEST_CASE("path_length sums segment lengths") {
    Trajectory square;
    square.append(TimedPose(0.0, 0.0, 0.0, 0.0));
    square.append(TimedPose(1.0, 1.0, 0.0, 0.0));
    square.append(TimedPose(2.0, 1.0, 1.0, 0.0));
    square.append(TimedPose(3.0, 0.0, 1.0, 0.0));
    square.append(TimedPose(4.0, 0.0, 0.0, 0.0));
    CHECK(path_length(square) == doctest::Approx(4.0));
    CHECK_THROWS_AS(path_length(Trajectory{}), data_error);
}
