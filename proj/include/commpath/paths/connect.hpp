#pragma once

#include "commpath/interpolant/interpolant.hpp"
#include "commpath/manifold/manifold_cpma.hpp"
#include "commpath/manifold/residuals.hpp"
#include "commpath/paths/path.hpp"

#include <limits>
#include <memory>

namespace commpath {

struct ConnectOptions {
    int max_retries = 6;
    JointDiagOptions diag;
};

namespace detail {

inline const VarietyTag cube_tag{VarietyKind::cube, {}};

inline double output_eth(const MatrixTuple& a, const MatrixTuple& b, Lift lift) {
    if (lift == Lift::none)
        return metric_eth(a, b);
    return metric_eth(push_down(a, lift, {}), push_down(b, lift, {}));
}

// Factor turning a per-coordinate bound in the lifted space into a bound in
// the output space.
inline double lift_factor(Lift lift) { return lift == Lift::none ? 1.0 : std::numbers::sqrt2; }
inline double gap_factor(Lift lift) { return lift == Lift::none ? 1.0 : 2.0; }

inline bool cross_commuting(const MatrixTuple& a, const MatrixTuple& b) {
    const double scale = std::max(1.0, std::max(max_norm(a), max_norm(b)));
    const double tol = 1e-10 * scale * scale;
    return max_commutator(a) <= tol && max_commutator(b) <= tol && max_cross_commutator(a, b) <= tol;
}

inline MatrixPath chain(std::vector<MatrixPath> parts) {
    // ((p0 ⊛ p1) ⊛ p2) ⊛ ... as in the constructions.
    MatrixPath out = std::move(parts.front());
    for (std::size_t i = 1; i < parts.size(); ++i)
        out = concat(out, parts[i]);
    return out;
}

inline MatrixPath lifted_piece(PathSegment seg, Lift lift, const VarietyTag& tag) {
    MatrixTuple a = push_down(seg.start(), lift, tag);
    MatrixTuple b = push_down(seg.end(), lift, tag);
    return make_path(std::move(seg), lift, tag, std::move(a), std::move(b));
}

// Radial projection of every (j, j + m) coordinate pair onto the closed unit
// disk; keeps grid labels of disk tuples inside the disk.
inline void project_pairs_to_disk(Matrix& labels) {
    const Index m = labels.rows() / 2;
    for (Index k = 0; k < labels.cols(); ++k)
        for (Index j = 0; j < m; ++j) {
            const double a = labels(j, k).real(), b = labels(j + m, k).real();
            const double r = std::hypot(a, b);
            if (r > 1.0) {
                labels(j, k) = a / r;
                labels(j + m, k) = b / r;
            }
        }
}

// The cube construction on (possibly lifted) hermitian tuples, with budgets
// measured in the output space:
//   delta = d(X, Xtilde),  nu = max(2 ||1 - Z||, d(Psi X, Y) + d(X, Y)),
// and the path ((l(X,Xtilde) ⊛ kappa) ⊛ l(Ytilde, Psi X)) ⊛ l(Psi X, Y).
inline MatrixPath cube_construction(const MatrixTuple& x_out, const MatrixTuple& y_out, const MatrixTuple& xl, const MatrixTuple& yl, double epsilon_target, Lift lift, const VarietyTag& tag, double delta0, const ConnectOptions& opt) {
    if (!(epsilon_target > 0.0))
        throw InvalidArgument("connect: epsilon must be positive");
    if (x_out.same_entries(y_out))
        return constant_path(x_out, tag);

    if (cross_commuting(xl, yl)) {
        const double d = metric_eth(x_out, y_out);
        MatrixPath p = lifted_piece(PathSegment::hermitian_linear(xl.with_variety(cube_tag), yl.with_variety(cube_tag)), lift, tag);
        p.start = x_out.with_variety(tag);
        p.end = y_out.with_variety(tag);
        p.budgets = {0.0, d};
        p.epsilon = 2.0 * d;
        if (p.epsilon >= epsilon_target)
            throw BudgetInfeasible("commuting endpoints are farther apart than epsilon/2", p.budgets);
        return p;
    }

    const double nu = epsilon_target / 4.0;
    const ConjugationMorphism cm = conjugation_morphism(xl, yl, opt.diag);
    const MatrixTuple psi_out = push_down(cm.psi_x, lift, tag);
    const double eth_xy = metric_eth(x_out, y_out);
    const double psi_term = metric_eth(psi_out, y_out) + eth_xy;
    std::function<void(Matrix&)> adjust;
    if (lift == Lift::juncture)
        adjust = project_pairs_to_disk;

    Budgets last{delta0, psi_term};
    double last_defect = 0.0, last_limit = 0.0;
    for (int r = 0; r <= opt.max_retries; ++r) {
        const double delta = delta0 / std::ldexp(1.0, r);
        IsospectralInterpolant itp;
        try {
            itp = build_interpolant_from(cm, xl, yl, delta, lift == Lift::none ? nu : std::numeric_limits<double>::max(), adjust);
        } catch (const BudgetInfeasible& e) {
            last = e.achieved();
            last_defect = e.defect();
            last_limit = e.defect_limit();
            continue;
        }
        Budgets b;
        b.delta = lift == Lift::none ? itp.budgets.delta : metric_eth(x_out, push_down(itp.xtilde, lift, tag));
        b.nu = lift == Lift::none ? itp.budgets.nu : std::max(2.0 * spectral_norm(identity(x_out.dim()) - itp.z), psi_term);
        last = b;
        if (b.nu >= nu)
            continue;

        std::vector<MatrixPath> parts;
        parts.push_back(lifted_piece(PathSegment::hermitian_linear(xl.with_variety(cube_tag), itp.xtilde), lift, tag));
        parts.push_back(lifted_piece(PathSegment::rotation(itp.xtilde, itp.generator, itp.ytilde), lift, tag));
        parts.push_back(lifted_piece(PathSegment::hermitian_linear(itp.ytilde, itp.psi_x.with_variety(cube_tag)), lift, tag));
        parts.push_back(lifted_piece(PathSegment::hermitian_linear(itp.psi_x.with_variety(cube_tag), yl.with_variety(cube_tag)), lift, tag));
        parts.front().start = x_out.with_variety(tag);
        parts.back().end = y_out.with_variety(tag);
        MatrixPath p = chain(std::move(parts));
        p.budgets = b;
        p.epsilon = 2.0 * (b.nu + b.delta);
        return p;
    }
    throw BudgetInfeasible("no interpolant within budget after retries; the endpoints are too far apart for this epsilon", last, last_defect, last_limit);
}

struct ChartedPair {
    std::vector<Index> charts;
    RealMatrix p, q;
};

// Per column, the chart maximizing the smaller margin of the two points.
inline ChartedPair chart_pairs(const Matrix& a, const Matrix& b, const ChartAtlas& atlas) {
    const Index n = a.cols();
    ChartedPair out;
    out.charts.resize(static_cast<std::size_t>(n));
    out.p.resize(atlas.d, n);
    out.q.resize(atlas.d, n);
    for (Index k = 0; k < n; ++k) {
        const RealVector u = snap_to_manifold(a.col(k).real(), atlas).ambient;
        const RealVector v = snap_to_manifold(b.col(k).real(), atlas).ambient;
        Index best = 0;
        double margin = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < atlas.charts.size(); ++c) {
            const double mg = std::min(atlas.charts[c].margin(u), atlas.charts[c].margin(v));
            if (mg > margin) {
                margin = mg;
                best = static_cast<Index>(c);
            }
        }
        if (!(margin > 0.0))
            throw PreconditionError("connect_manifold: no chart covers both spectral points", margin);
        const Chart& c = atlas.charts[static_cast<std::size_t>(best)];
        out.charts[static_cast<std::size_t>(k)] = best;
        out.p.col(k) = c.inverse(u);
        out.q.col(k) = c.inverse(v);
    }
    return out;
}

// max_s d(seg(s), seg.start()) in the output space.
inline double chart_segment_bound(const PathSegment& seg, Lift lift) {
    return lift_factor(lift) * seg.chart_deviation() + 2.0 * gap_factor(lift) * seg.endpoint_gap();
}

inline MatrixTuple stack(const MatrixTuple& a, const MatrixTuple& b) {
    std::vector<Matrix> c(a.components());
    c.insert(c.end(), b.begin(), b.end());
    return MatrixTuple(std::move(c));
}

// The manifold construction with chart-linear segments; budgets in the
// output space:
//   nu1    = max(2 ||1 - Z||, d(Psi U, V) + d(U, V)),
//   delta  = max(d(U, Utilde), deviation of the two CPMA segments),
//   nu_ln  = deviation of the final segment,
//   epsilon = 2 (nu1 + max(nu_ln, delta)).
inline MatrixPath manifold_construction(const MatrixTuple& u_out, const MatrixTuple& v_out, const MatrixTuple& ul, const MatrixTuple& vl, double epsilon_target, const std::shared_ptr<const ChartAtlas>& atlas, Lift lift, const VarietyTag& tag, const ConnectOptions& opt) {
    if (!(epsilon_target > 0.0))
        throw InvalidArgument("connect: epsilon must be positive");
    if (ul.arity() != atlas->m)
        throw DimensionError("connect_manifold: tuple arity does not match the atlas");
    const VarietyTag lifted_tag = manifold_tag(*atlas);
    if (u_out.same_entries(v_out)) {
        MatrixPath p = constant_path(u_out, tag);
        p.atlas_id = atlas->id;
        return p;
    }
    const Index n = ul.dim();

    if (cross_commuting(ul, vl)) {
        try {
            const JointSpectrum js = joint_diagonalize(stack(ul, vl), opt.diag);
            const ChartedPair cp = chart_pairs(js.points.topRows(atlas->m), js.points.bottomRows(atlas->m), *atlas);
            PathSegment seg = PathSegment::chart_linear(atlas, js.basis, cp.charts, cp.p, cp.q, ul.with_variety(lifted_tag), vl.with_variety(lifted_tag));
            const double dev = chart_segment_bound(seg, lift);
            if (dev > 0.0 && 2.0 * dev < epsilon_target) {
                MatrixPath p = lifted_piece(std::move(seg), lift, tag);
                p.start = u_out.with_variety(tag);
                p.end = v_out.with_variety(tag);
                p.budgets = {0.0, dev};
                p.epsilon = 2.0 * dev;
                p.atlas_id = atlas->id;
                return p;
            }
        } catch (const ConvergenceError&) {
        } catch (const PreconditionError&) {
        }
    }

    const ConjugationMorphism cm = conjugation_morphism(ul, vl, opt.diag);
    const Matrix& qv = cm.y_spectrum.basis;
    const Matrix qx = cm.w.adjoint() * qv;
    const MatrixTuple psi_out = push_down(cm.psi_x, lift, tag);
    const double psi_term = metric_eth(psi_out, v_out) + metric_eth(u_out, v_out);

    const ChartedPair line = chart_pairs(cm.psi_points, cm.y_spectrum.points, *atlas);
    PathSegment seg_d = PathSegment::chart_linear(atlas, qv, line.charts, line.p, line.q, cm.psi_x.with_variety(lifted_tag), vl.with_variety(lifted_tag));
    const double nu_line = chart_segment_bound(seg_d, lift);

    const double delta0 = epsilon_target / (4.0 * lift_factor(lift));
    Budgets last{delta0, psi_term};
    double last_defect = 0.0, last_limit = 0.0;
    for (int r = 0; r <= opt.max_retries; ++r) {
        const double delta = std::min(1.0, delta0 / std::ldexp(1.0, r));
        const ManifoldCpmaResult mc = manifold_cpma_from_spectrum(qv, cm.psi_points, delta, *atlas);
        detail::RotationCore core;
        try {
            core = detail::rotation_core(cm.w, mc.decomp, last);
        } catch (const BudgetInfeasible& e) {
            last_defect = e.defect();
            last_limit = e.defect_limit();
            continue;
        }
        const MatrixTuple ytilde = mc.ztilde;
        const MatrixTuple utilde = assemble_tuple(qx, mc.ambient_labels.cast<Complex>(), lifted_tag);
        PathSegment seg_a = PathSegment::chart_linear(atlas, qx, mc.column_charts, mc.params, mc.param_labels, ul.with_variety(lifted_tag), utilde);
        PathSegment seg_k = PathSegment::rotation(utilde, core.generator, ytilde);
        PathSegment seg_c = PathSegment::chart_linear(atlas, qv, mc.column_charts, mc.param_labels, mc.params, ytilde, cm.psi_x.with_variety(lifted_tag));

        Budgets b;
        b.nu = std::max(2.0 * spectral_norm(identity(n) - core.z) + gap_factor(lift) * seg_k.endpoint_gap(), psi_term);
        const double delta_a = std::max({output_eth(ul, utilde, lift), chart_segment_bound(seg_a, lift), chart_segment_bound(seg_c, lift)});
        b.delta = std::max(nu_line, delta_a);
        last = b;
        const double eps = 2.0 * (b.nu + b.delta);
        if (eps >= epsilon_target)
            continue;

        std::vector<MatrixPath> parts;
        parts.push_back(lifted_piece(std::move(seg_a), lift, tag));
        parts.push_back(lifted_piece(std::move(seg_k), lift, tag));
        parts.push_back(lifted_piece(std::move(seg_c), lift, tag));
        parts.push_back(lifted_piece(seg_d, lift, tag));
        parts.front().start = u_out.with_variety(tag);
        parts.back().end = v_out.with_variety(tag);
        MatrixPath p = chain(std::move(parts));
        p.budgets = b;
        p.epsilon = eps;
        p.atlas_id = atlas->id;
        return p;
    }
    throw BudgetInfeasible("no manifold interpolant within budget after retries; the endpoints are too far apart for this epsilon", last, last_defect, last_limit);
}

inline void require_variety(const MatrixTuple& x, const VarietyTag& tag, double tol, const char* what) {
    const ResidualReport r = variety_residuals(x, tag);
    const double worst = std::max({r.commutator_max, r.hermiticity_or_normality_max, r.norm_excess_max, r.defining_eq_residual.value_or(0.0)});
    if (worst > tol)
        throw PreconditionError(std::string(what) + ": input is not in the variety", worst);
}

}  // namespace detail

/// Path in the matrix cube from X to Y staying within the returned epsilon.
inline MatrixPath connect_cube(const MatrixTuple& x, const MatrixTuple& y, double epsilon_target, const ConnectOptions& opt = {}) {
    require_same_shape(x, y);
    const VarietyTag tag = detail::cube_tag;
    detail::require_variety(x, tag, 1e-8, "connect_cube");
    detail::require_variety(y, tag, 1e-8, "connect_cube");
    return detail::cube_construction(x, y, x, y, epsilon_target, Lift::none, tag, epsilon_target / 4.0, opt);
}

/// Commuting normal contractions: the cube construction on hermitian
/// partitions, pushed down by the juncture.
inline MatrixPath connect_disk(const MatrixTuple& z, const MatrixTuple& s, double epsilon_target, const ConnectOptions& opt = {}) {
    require_same_shape(z, s);
    const VarietyTag tag{VarietyKind::disk, {}};
    detail::require_variety(z, tag, 1e-8, "connect_disk");
    detail::require_variety(s, tag, 1e-8, "connect_disk");
    return detail::cube_construction(z, s, hermitian_partition(z), hermitian_partition(s), epsilon_target, Lift::juncture, tag, epsilon_target / 8.0, opt);
}

inline MatrixPath connect_manifold(const MatrixTuple& u, const MatrixTuple& v, double epsilon_target, const ChartAtlas& atlas, const ConnectOptions& opt = {}) {
    require_same_shape(u, v);
    const VarietyTag tag = manifold_tag(atlas);
    for (const MatrixTuple* x : {&u, &v}) {
        const ResidualReport r = variety_residuals(*x, tag, &atlas);
        if (r.hermiticity_or_normality_max > 1e-8 || r.commutator_max > 1e-8)
            throw PreconditionError("connect_manifold: input is not a commuting hermitian tuple", std::max(r.hermiticity_or_normality_max, r.commutator_max));
    }
    auto shared = std::make_shared<const ChartAtlas>(atlas);
    return detail::manifold_construction(u, v, u, v, epsilon_target, shared, Lift::none, tag, opt);
}

inline MatrixPath connect_torus(const MatrixTuple& u, const MatrixTuple& v, double epsilon_target, const ConnectOptions& opt = {}) {
    require_same_shape(u, v);
    const VarietyTag tag{VarietyKind::torus, {}};
    detail::require_variety(u, tag, 1e-8, "connect_torus");
    detail::require_variety(v, tag, 1e-8, "connect_torus");
    auto atlas = std::make_shared<const ChartAtlas>(torus_atlas(u.arity()));
    return detail::manifold_construction(u, v, interleaved_partition(u), interleaved_partition(v), epsilon_target, atlas, Lift::interleaved_juncture, tag, opt);
}

inline MatrixPath connect_sphere(const MatrixTuple& h1, const MatrixTuple& h2, double epsilon_target, const ConnectOptions& opt = {}) {
    require_same_shape(h1, h2);
    const VarietyTag tag{VarietyKind::sphere, {}};
    detail::require_variety(h1, tag, 1e-8, "connect_sphere");
    detail::require_variety(h2, tag, 1e-8, "connect_sphere");
    auto atlas = std::make_shared<const ChartAtlas>(sphere_atlas(h1.arity()));
    return detail::manifold_construction(h1, h2, h1, h2, epsilon_target, atlas, Lift::none, tag, opt);
}

inline MatrixPath connect_spherical_unitary(const MatrixTuple& s, const MatrixTuple& t, double epsilon_target, const ConnectOptions& opt = {}) {
    require_same_shape(s, t);
    const VarietyTag tag{VarietyKind::spherical_unitary, {}};
    detail::require_variety(s, tag, 1e-8, "connect_spherical_unitary");
    detail::require_variety(t, tag, 1e-8, "connect_spherical_unitary");
    auto atlas = std::make_shared<const ChartAtlas>(sphere_atlas(2 * s.arity()));
    return detail::manifold_construction(s, t, interleaved_partition(s), interleaved_partition(t), epsilon_target, atlas, Lift::interleaved_juncture, tag, opt);
}

/// Dispatch on the variety tag of x.
inline MatrixPath connect(const MatrixTuple& x, const MatrixTuple& y, double epsilon_target, const ConnectOptions& opt = {}) {
    const VarietyTag& tag = x.variety();
    if (!(tag == y.variety()))
        throw InvalidArgument("connect: endpoints carry different variety tags");
    switch (tag.kind) {
    case VarietyKind::cube:
        return connect_cube(x, y, epsilon_target, opt);
    case VarietyKind::disk:
        return connect_disk(x, y, epsilon_target, opt);
    case VarietyKind::manifold:
        return connect_manifold(x, y, epsilon_target, builtin_atlas(tag.atlas_id), opt);
    case VarietyKind::torus:
        return connect_torus(x, y, epsilon_target, opt);
    case VarietyKind::sphere:
        return connect_sphere(x, y, epsilon_target, opt);
    case VarietyKind::spherical_unitary:
        return connect_spherical_unitary(x, y, epsilon_target, opt);
    case VarietyKind::none:
        break;
    }
    throw InvalidArgument("connect: endpoints carry no variety tag");
}

}  // namespace commpath
