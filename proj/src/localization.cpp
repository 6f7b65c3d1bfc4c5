#include "locfuse/localization.hpp"

#include <algorithm>
#include <cmath>

namespace locfuse {

BoundingBox min_max_box(std::span<const AnchorRange> ranges) {
    if (ranges.empty()) throw data_error("min_max: no ranges");
    BoundingBox box{-HUGE_VAL, HUGE_VAL, -HUGE_VAL, HUGE_VAL};
    for (const AnchorRange& r : ranges) {
        if (r.distance < 0.0) throw std::invalid_argument("min_max: negative distance");
        box.x_lo = std::max(box.x_lo, r.anchor.x - r.distance);
        box.x_hi = std::min(box.x_hi, r.anchor.x + r.distance);
        box.y_lo = std::max(box.y_lo, r.anchor.y - r.distance);
        box.y_hi = std::min(box.y_hi, r.anchor.y + r.distance);
    }
    return box;
}

Vec2 min_max(std::span<const AnchorRange> ranges) { return min_max_box(ranges).center(); }

Vec2 multilateration_ls(std::span<const AnchorRange> ranges) {
    if (ranges.size() < 3) throw data_error("multilateration_ls: need at least 3 ranges");

    // Subtracting anchor 0's circle equation from anchor i's gives the linear
    // system A p = b with rows A_i = 2 (x_i - x_0, y_i - y_0).
    const Anchor& a0 = ranges[0].anchor;
    const double d0 = ranges[0].distance;
    double ata00 = 0.0, ata01 = 0.0, ata11 = 0.0, atb0 = 0.0, atb1 = 0.0;
    for (std::size_t i = 1; i < ranges.size(); ++i) {
        const Anchor& ai = ranges[i].anchor;
        const double di = ranges[i].distance;
        const double r0 = 2.0 * (ai.x - a0.x);
        const double r1 = 2.0 * (ai.y - a0.y);
        const double b = d0 * d0 - di * di + ai.x * ai.x - a0.x * a0.x + ai.y * ai.y -
                         a0.y * a0.y;
        ata00 += r0 * r0;
        ata01 += r0 * r1;
        ata11 += r1 * r1;
        atb0 += r0 * b;
        atb1 += r1 * b;
    }

    // Eigenvalues of the 2x2 normal matrix; singular values of A are their
    // square roots, so the collinearity test compares eigenvalue ratios.
    const double tr = ata00 + ata11;
    const double det = ata00 * ata11 - ata01 * ata01;
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    const double eig_max = tr / 2.0 + disc;
    const double eig_min = tr / 2.0 - disc;
    if (eig_max <= 0.0 || std::sqrt(std::max(0.0, eig_min)) < 1e-9 * std::sqrt(eig_max))
        throw numeric_error("multilateration_ls: degenerate anchor geometry (collinear anchors)");

    return {(ata11 * atb0 - ata01 * atb1) / det, (ata00 * atb1 - ata01 * atb0) / det};
}

}  // namespace locfuse
