#include "locfuse/localization.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "locfuse/rng.hpp"

using namespace locfuse;

namespace {

std::vector<AnchorRange> ranges_to(const std::vector<Anchor>& anchors, Vec2 p) {
    std::vector<AnchorRange> out;
    for (const Anchor& a : anchors) out.push_back({a, std::hypot(p.x - a.x, p.y - a.y)});
    return out;
}

}  // namespace

TEST_CASE("min_max hand-worked cases") {
    // Single anchor: a box centered on the anchor.
    std::vector<AnchorRange> one{{{0, 0.0, 0.0, true}, 1.0}};
    Vec2 c = min_max(one);
    CHECK(c.x == doctest::Approx(0.0));
    CHECK(c.y == doctest::Approx(0.0));

    // Symmetric square of anchors around (1,1).
    const std::vector<Anchor> square{
        {0, 0.0, 0.0, true}, {1, 2.0, 0.0, true}, {2, 0.0, 2.0, true}, {3, 2.0, 2.0, true}};
    c = min_max(ranges_to(square, {1.0, 1.0}));
    CHECK(c.x == doctest::Approx(1.0));
    CHECK(c.y == doctest::Approx(1.0));

    // Two anchors: x in [1,2], y in [-2,2], center (1.5, 0).
    std::vector<AnchorRange> two{{{0, 0.0, 0.0, true}, 2.0}, {{1, 4.0, 0.0, true}, 3.0}};
    const BoundingBox box = min_max_box(two);
    CHECK(box.x_lo == doctest::Approx(1.0));
    CHECK(box.x_hi == doctest::Approx(2.0));
    CHECK(box.y_lo == doctest::Approx(-2.0));
    CHECK(box.y_hi == doctest::Approx(2.0));
    c = min_max(two);
    CHECK(c.x == doctest::Approx(1.5));
    CHECK(c.y == doctest::Approx(0.0));
}

TEST_CASE("min_max centers inverted boxes") {
    // Disjoint squares: x bounds cross ([8, 2]), center still defined.
    std::vector<AnchorRange> rs{{{0, 0.0, 0.0, true}, 2.0}, {{1, 10.0, 0.0, true}, 2.0}};
    const BoundingBox box = min_max_box(rs);
    CHECK(box.x_lo > box.x_hi);
    const Vec2 c = min_max(rs);
    CHECK(c.x == doctest::Approx(5.0));
    CHECK(c.y == doctest::Approx(0.0));
}

TEST_CASE("min_max input validation") {
    CHECK_THROWS_AS(min_max({}), data_error);
    std::vector<AnchorRange> bad{{{0, 0.0, 0.0, true}, -0.5}};
    CHECK_THROWS_AS(min_max(bad), std::invalid_argument);
}

TEST_CASE("min_max is translation-equivariant") {
    Rng rng(314);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<AnchorRange> rs;
        const int n = 1 + static_cast<int>(rng.uniform(0.0, 5.0));
        for (int i = 0; i < n; ++i)
            rs.push_back({{i, std::floor(rng.uniform(-10.0, 10.0)),
                           std::floor(rng.uniform(-10.0, 10.0)), true},
                          std::floor(rng.uniform(0.0, 12.0))});
        const Vec2 base = min_max(rs);

        std::vector<AnchorRange> moved = rs;
        for (AnchorRange& r : moved) {
            r.anchor.x += 7.0;
            r.anchor.y -= 3.0;
        }
        const Vec2 shifted = min_max(moved);
        CHECK(shifted.x == doctest::Approx(base.x + 7.0).epsilon(1e-12));
        CHECK(shifted.y == doctest::Approx(base.y - 3.0).epsilon(1e-12));
    }
}

TEST_CASE("uniform range inflation keeps the box center") {
    Rng rng(159);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<AnchorRange> rs;
        const int n = 2 + static_cast<int>(rng.uniform(0.0, 4.0));
        for (int i = 0; i < n; ++i)
            rs.push_back({{i, rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0), true},
                          rng.uniform(0.5, 12.0)});

        // Uniform inflation cannot reorder x_i - d_i or x_i + d_i, so the
        // binding anchors stay the same and the center shift cancels.
        const double eps = rng.uniform(0.1, 2.0);
        std::vector<AnchorRange> fat = rs;
        for (AnchorRange& r : fat) r.distance += eps;

        const Vec2 a = min_max(rs);
        const Vec2 b = min_max(fat);
        CHECK(b.x == doctest::Approx(a.x).epsilon(1e-9));
        CHECK(b.y == doctest::Approx(a.y).epsilon(1e-9));
    }
}

TEST_CASE("inflating one range only widens the box") {
    Rng rng(265);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<AnchorRange> rs;
        const int n = 2 + static_cast<int>(rng.uniform(0.0, 4.0));
        for (int i = 0; i < n; ++i)
            rs.push_back({{i, rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0), true},
                          rng.uniform(0.5, 12.0)});
        const BoundingBox base = min_max_box(rs);

        std::vector<AnchorRange> spiked = rs;
        const auto victim = static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(n)));
        spiked[std::min(spiked.size() - 1, victim)].distance += rng.uniform(5.0, 60.0);
        const BoundingBox wide = min_max_box(spiked);

        CHECK(wide.x_lo <= base.x_lo);
        CHECK(wide.x_hi >= base.x_hi);
        CHECK(wide.y_lo <= base.y_lo);
        CHECK(wide.y_hi >= base.y_hi);
    }
}

TEST_CASE("min_max matches an independent clipping oracle") {
    Rng rng(8086);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<AnchorRange> rs;
        const int n = 1 + static_cast<int>(rng.uniform(0.0, 5.0));
        for (int i = 0; i < n; ++i)
            rs.push_back({{i, std::floor(rng.uniform(-20.0, 20.0)),
                           std::floor(rng.uniform(-20.0, 20.0)), true},
                          std::floor(rng.uniform(0.0, 25.0))});

        // Oracle: clip a huge interval against every square, one side at a time.
        double xl = -1e18, xh = 1e18, yl = -1e18, yh = 1e18;
        for (const AnchorRange& r : rs) {
            if (r.anchor.x - r.distance > xl) xl = r.anchor.x - r.distance;
            if (r.anchor.x + r.distance < xh) xh = r.anchor.x + r.distance;
            if (r.anchor.y - r.distance > yl) yl = r.anchor.y - r.distance;
            if (r.anchor.y + r.distance < yh) yh = r.anchor.y + r.distance;
        }
        const Vec2 got = min_max(rs);
        CHECK(got.x == doctest::Approx((xl + xh) / 2.0).epsilon(1e-12));
        CHECK(got.y == doctest::Approx((yl + yh) / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("multilateration recovers exact positions") {
    const std::vector<Anchor> tri{{0, 0.0, 0.0, true}, {1, 4.0, 0.0, true}, {2, 0.0, 4.0, true}};
    const Vec2 p = multilateration_ls(ranges_to(tri, {1.0, 1.0}));
    CHECK(p.x == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.y == doctest::Approx(1.0).epsilon(1e-9));

    // Overdetermined consistent system.
    const std::vector<Anchor> quad{
        {0, 0.0, 0.0, true}, {1, 4.0, 0.0, true}, {2, 0.0, 3.0, true}, {3, 5.0, 5.0, true}};
    const Vec2 q = multilateration_ls(ranges_to(quad, {2.0, 1.0}));
    CHECK(q.x == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(q.y == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("multilateration degenerate inputs") {
    const std::vector<Anchor> line{{0, 0.0, 0.0, true}, {1, 1.0, 0.0, true}, {2, 2.0, 0.0, true}};
    CHECK_THROWS_AS(multilateration_ls(ranges_to(line, {1.0, 1.0})), numeric_error);

    std::vector<AnchorRange> two{{{0, 0.0, 0.0, true}, 1.0}, {{1, 4.0, 0.0, true}, 3.0}};
    CHECK_THROWS_AS(multilateration_ls(two), data_error);
}
