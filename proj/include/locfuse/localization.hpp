// Single-epoch position estimation from anchor ranges: Min-Max box
// intersection (primary) and linearized least-squares multilateration.
#pragma once

#include <span>
#include <utility>

#include "locfuse/core.hpp"

namespace locfuse {

/// Axis-aligned bounds; Min-Max may produce inverted bounds when the squares
/// have an empty geometric intersection.
struct BoundingBox {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double y_lo = 0.0;
    double y_hi = 0.0;

    Vec2 center() const { return {(x_lo + x_hi) / 2.0, (y_lo + y_hi) / 2.0}; }
};

/// One anchor's estimated distance for an epoch.
struct AnchorRange {
    Anchor anchor;
    double distance = 0.0;
};

/// Intersection of the per-anchor squares [x_i +- d_i] x [y_i +- d_i].
BoundingBox min_max_box(std::span<const AnchorRange> ranges);

/// Center of the Min-Max box, computed even when the bounds are inverted.
Vec2 min_max(std::span<const AnchorRange> ranges);

/// Least-squares solution of the linearized circle system obtained by
/// subtracting the first anchor's equation from the others. Requires >= 3
/// ranges and non-collinear anchors.
Vec2 multilateration_ls(std::span<const AnchorRange> ranges);

}  // namespace locfuse
