#pragma once

#include "commpath/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace commpath {

/// Uniform grid on [-1, 1]: rep points -1 + 2(k-1)h and support points
/// -1 + (2k-3)h for the effective half-spacing h = 1/(count-1) <= delta.
struct DeltaGrid {
    double delta = 1.0;
    double spacing = 1.0;  // h
    Index count = 2;
    std::vector<double> rep_points;
    std::vector<double> support_points;

    /// Zero-based bin of value v: the half-open cell (support[k], support[k+1]].
    /// Values within 1e-12 of a support point fall into the lower cell.
    Index bin(double v) const {
        const double s = (v + 1.0 + spacing) / (2.0 * spacing);
        const double k = std::ceil(s - 1e-12 / (2.0 * spacing));
        return std::clamp(static_cast<Index>(k), Index{1}, count) - 1;
    }

    double snap(double v) const { return rep_points[static_cast<std::size_t>(bin(v))]; }
};

inline DeltaGrid build_grids(double delta) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw InvalidArgument("grid delta must lie in (0, 1]");
    Index intervals = static_cast<Index>(std::ceil((1.0 / delta) * (1.0 - 1e-12)));
    intervals = std::max<Index>(intervals, 1);
    if (1.0 / static_cast<double>(intervals) > delta)
        ++intervals;

    DeltaGrid g;
    g.delta = delta;
    g.count = intervals + 1;
    g.spacing = 1.0 / static_cast<double>(intervals);
    g.rep_points.resize(static_cast<std::size_t>(g.count));
    g.support_points.resize(static_cast<std::size_t>(g.count + 1));
    for (Index k = 0; k < g.count; ++k)
        g.rep_points[static_cast<std::size_t>(k)] = -1.0 + 2.0 * static_cast<double>(k) * g.spacing;
    g.rep_points.back() = 1.0;
    for (Index k = 0; k <= g.count; ++k)
        g.support_points[static_cast<std::size_t>(k)] = -1.0 + static_cast<double>(2 * k - 1) * g.spacing;
    return g;
}

}  // namespace commpath
