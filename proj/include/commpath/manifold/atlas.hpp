#pragma once

#include "commpath/core/types.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>

namespace commpath {

/// A coordinate chart phi: R^d -> R^m with inverse on its patch. margin(z) is
/// positive inside the chart domain, grows towards its centre and is -inf
/// when z is not in the chart's image at all.
struct Chart {
    std::function<RealVector(const RealVector&)> forward;
    std::function<RealVector(const RealVector&)> inverse;
    std::function<double(const RealVector&)> margin;
};

struct ManifoldPoint {
    RealVector ambient;
    Index chart_id = 0;
    RealVector parameters;
};

enum class AtlasKind { sphere, torus, cube };

struct ChartAtlas {
    std::string id;
    AtlasKind kind = AtlasKind::cube;
    Index d = 0;  // intrinsic dimension
    Index m = 0;  // ambient dimension
    std::vector<Chart> charts;

    // Parameter radius (sup norm) keeping ambient moves within delta, for
    // chart parameters of points located by best_chart.
    std::function<double(double)> modulus;
    // Upper bound on sup_t ||phi(p + t(q - p)) - phi(p)||_inf within a chart.
    std::function<double(const RealVector&, const RealVector&)> segment_deviation;
    std::function<RealVector(const RealVector&)> project;
    std::function<double(const RealVector&)> distance;

    /// Chart of maximal margin; ties go to the lower index.
    Index best_chart(const RealVector& z) const {
        Index best = 0;
        double best_margin = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < charts.size(); ++c) {
            const double mg = charts[c].margin(z);
            if (mg > best_margin) {
                best_margin = mg;
                best = static_cast<Index>(c);
            }
        }
        return best;
    }

    ManifoldPoint locate(const RealVector& z) const {
        ManifoldPoint p;
        p.ambient = z;
        p.chart_id = best_chart(z);
        p.parameters = charts[static_cast<std::size_t>(p.chart_id)].inverse(z);
        return p;
    }
};

namespace detail {

inline RealVector drop_coordinate(const RealVector& z, Index a) {
    RealVector p(z.size() - 1);
    for (Index i = 0, k = 0; i < z.size(); ++i)
        if (i != a)
            p(k++) = z(i);
    return p;
}

inline double wrap_angle(double t) {
    constexpr double pi = std::numbers::pi;
    t = std::remainder(t, 2.0 * pi);
    return t <= -pi ? t + 2.0 * pi : t;
}

}  // namespace detail

/// Unit sphere S^{m-1} in R^m with 2m hemispherical graph charts. Chart 2a
/// solves z_a = +sqrt(1 - |p|^2), chart 2a+1 solves z_a = -sqrt(...); the
/// parameters are the remaining coordinates in order.
inline ChartAtlas sphere_atlas(Index m) {
    if (m < 2)
        throw InvalidArgument("sphere atlas requires m >= 2");
    ChartAtlas atlas;
    atlas.id = "sphere-" + std::to_string(m);
    atlas.kind = AtlasKind::sphere;
    atlas.m = m;
    atlas.d = m - 1;

    const double dm = static_cast<double>(m);
    const double sqrt_d = std::sqrt(static_cast<double>(atlas.d));
    const double edge = std::min(0.35, 0.5 / std::sqrt(dm));
    const double r_max = std::sqrt(1.0 - edge * edge);
    const double r0 = std::sqrt(1.0 - 1.0 / dm);
    const double r_cap = 0.5 * (1.0 + r0);

    for (Index a = 0; a < m; ++a) {
        for (double sign : {1.0, -1.0}) {
            Chart c;
            c.forward = [a, sign, m](const RealVector& p) {
                RealVector z(m);
                for (Index i = 0, k = 0; i < m; ++i)
                    if (i != a)
                        z(i) = p(k++);
                z(a) = sign * std::sqrt(std::max(0.0, 1.0 - p.squaredNorm()));
                return z;
            };
            c.inverse = [a](const RealVector& z) { return detail::drop_coordinate(z, a); };
            c.margin = [a, sign, r_max](const RealVector& z) {
                if (sign * z(a) <= 0.0)
                    return -std::numeric_limits<double>::infinity();
                return r_max - detail::drop_coordinate(z, a).norm();
            };
            atlas.charts.push_back(std::move(c));
        }
    }

    const double lipschitz = std::max(1.0, sqrt_d * r_cap / std::sqrt(1.0 - r_cap * r_cap));
    atlas.modulus = [=](double delta) { return std::min((1.0 - r0) / (2.0 * sqrt_d), delta / lipschitz); };
    atlas.segment_deviation = [](const RealVector& p, const RealVector& q) {
        const double r = std::max(p.norm(), q.norm());
        if (r >= 1.0)
            return std::numeric_limits<double>::infinity();
        const double step = (q - p).cwiseAbs().maxCoeff();
        return std::max(step, r / std::sqrt(1.0 - r * r) * (q - p).norm());
    };
    atlas.project = [](const RealVector& p) {
        const double r = p.norm();
        if (r == 1.0)
            return p;
        if (r == 0.0) {
            RealVector e = RealVector::Zero(p.size());
            e(0) = 1.0;
            return e;
        }
        return RealVector(p / r);
    };
    atlas.distance = [](const RealVector& p) { return std::abs(p.norm() - 1.0); };
    return atlas;
}

/// Torus T^m embedded in R^{2m} as (cos t_1, sin t_1, ..., cos t_m, sin t_m).
/// Chart b (bit i of b selects centre pi for factor i) uses parameters
/// u in [-1, 1]^m with t_i = c_i + (3 pi / 4) u_i.
inline ChartAtlas torus_atlas(Index m) {
    if (m < 1)
        throw InvalidArgument("torus atlas requires m >= 1");
    if (m > 16)
        throw InvalidArgument("torus atlas supports at most 16 factors");
    constexpr double pi = std::numbers::pi;
    constexpr double scale = 0.75 * pi;
    ChartAtlas atlas;
    atlas.id = "torus-" + std::to_string(m);
    atlas.kind = AtlasKind::torus;
    atlas.m = 2 * m;
    atlas.d = m;

    for (Index b = 0; b < (Index{1} << m); ++b) {
        RealVector centre(m);
        for (Index i = 0; i < m; ++i)
            centre(i) = ((b >> i) & 1) ? pi : 0.0;
        Chart c;
        c.forward = [centre, m](const RealVector& u) {
            RealVector z(2 * m);
            for (Index i = 0; i < m; ++i) {
                const double t = centre(i) + scale * u(i);
                z(2 * i) = std::cos(t);
                z(2 * i + 1) = std::sin(t);
            }
            return z;
        };
        c.inverse = [centre, m](const RealVector& z) {
            RealVector u(m);
            for (Index i = 0; i < m; ++i)
                u(i) = detail::wrap_angle(std::atan2(z(2 * i + 1), z(2 * i)) - centre(i)) / scale;
            return u;
        };
        const auto inverse = c.inverse;
        c.margin = [inverse](const RealVector& z) { return 1.0 - inverse(z).cwiseAbs().maxCoeff(); };
        atlas.charts.push_back(std::move(c));
    }

    atlas.modulus = [](double delta) { return delta / scale; };
    atlas.segment_deviation = [](const RealVector& p, const RealVector& q) {
        return scale * (q - p).cwiseAbs().maxCoeff();
    };
    atlas.project = [m](const RealVector& p) {
        RealVector z(2 * m);
        for (Index i = 0; i < m; ++i) {
            const double r = std::hypot(p(2 * i), p(2 * i + 1));
            z(2 * i) = r > 0.0 ? p(2 * i) / r : 1.0;
            z(2 * i + 1) = r > 0.0 ? p(2 * i + 1) / r : 0.0;
        }
        return z;
    };
    atlas.distance = [m](const RealVector& p) {
        double s = 0.0;
        for (Index i = 0; i < m; ++i) {
            const double e = std::hypot(p(2 * i), p(2 * i + 1)) - 1.0;
            s += e * e;
        }
        return std::sqrt(s);
    };
    return atlas;
}

/// The cube [-1, 1]^m with the single identity chart.
inline ChartAtlas cube_atlas(Index m) {
    if (m < 1)
        throw InvalidArgument("cube atlas requires m >= 1");
    ChartAtlas atlas;
    atlas.id = "cube-" + std::to_string(m);
    atlas.kind = AtlasKind::cube;
    atlas.m = m;
    atlas.d = m;
    Chart c;
    c.forward = [](const RealVector& p) { return p; };
    c.inverse = [](const RealVector& z) { return z; };
    c.margin = [](const RealVector& z) { return 1.0 - z.cwiseAbs().maxCoeff(); };
    atlas.charts.push_back(std::move(c));
    atlas.modulus = [](double delta) { return delta; };
    atlas.segment_deviation = [](const RealVector& p, const RealVector& q) { return (q - p).cwiseAbs().maxCoeff(); };
    atlas.project = [](const RealVector& p) { return RealVector(p.cwiseMax(-1.0).cwiseMin(1.0)); };
    atlas.distance = [](const RealVector& p) { return (p - p.cwiseMax(-1.0).cwiseMin(1.0)).norm(); };
    return atlas;
}

/// Atlas by id: "sphere-<m>", "torus-<m>" or "cube-<m>".
inline ChartAtlas builtin_atlas(const std::string& id) {
    const auto dash = id.rfind('-');
    if (dash == std::string::npos || dash + 1 >= id.size())
        throw InvalidArgument("unknown atlas '" + id + "'");
    const std::string kind = id.substr(0, dash);
    Index m = 0;
    try {
        std::size_t used = 0;
        m = static_cast<Index>(std::stol(id.substr(dash + 1), &used));
        if (used != id.size() - dash - 1)
            throw InvalidArgument("bad atlas dimension");
    } catch (const std::logic_error&) {
        throw InvalidArgument("unknown atlas '" + id + "'");
    }
    if (kind == "sphere")
        return sphere_atlas(m);
    if (kind == "torus")
        return torus_atlas(m);
    if (kind == "cube")
        return cube_atlas(m);
    throw InvalidArgument("unknown atlas '" + id + "'");
}

/// Nearest manifold point together with its best chart.
inline ManifoldPoint snap_to_manifold(const RealVector& p, const ChartAtlas& atlas, double tol = 1e-6) {
    if (p.size() != atlas.m)
        throw DimensionError("snap_to_manifold: point has wrong ambient dimension");
    const double dist = atlas.distance(p);
    if (!(dist <= tol))
        throw PreconditionError("snap_to_manifold: point is too far from the manifold", dist);
    return atlas.locate(atlas.project(p));
}

}  // namespace commpath
