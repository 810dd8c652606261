#pragma once

#include "commpath/core/joint_diag.hpp"
#include "commpath/manifold/atlas.hpp"
#include "commpath/pma/cpma.hpp"

#include <map>

namespace commpath {

struct ManifoldCpmaResult {
    MatrixTuple ztilde;
    MatrixTuple h;       // chart parameters, d hermitians
    MatrixTuple htilde;  // snapped chart parameters
    ProjectiveDecomposition decomp;
    std::vector<Index> chart_assignment;  // per projector
    std::vector<Index> column_charts;     // per basis column
    RealMatrix params;                    // d x n, chart parameters per column
    RealMatrix param_labels;              // d x n, snapped parameters per column
    RealMatrix ambient;                   // m x n, snapped-to-manifold joint spectrum
    RealMatrix ambient_labels;            // m x n, phi(label) per column
    double nu = 0.0;                      // parameter grid modulus
};

inline VarietyTag manifold_tag(const ChartAtlas& atlas) { return {VarietyKind::manifold, atlas.id}; }

/// Manifold CPMA from a joint spectrum (real parts of the columns of
/// `points`) in the unitary `basis`. Each point is snapped to the manifold,
/// placed in its best chart, and its parameters are snapped to the grid of
/// half-spacing nu = atlas.modulus(delta). Projectors group equal
/// (chart, label) pairs, ordered lexicographically.
inline ManifoldCpmaResult manifold_cpma_from_spectrum(const Matrix& basis, const Matrix& points, double delta, const ChartAtlas& atlas, double snap_tol = 1e-6) {
    if (points.rows() != atlas.m)
        throw DimensionError("manifold_cpma: tuple arity does not match the atlas");
    const Index n = points.cols();
    const Index d = atlas.d;
    ManifoldCpmaResult out;
    if (!(delta > 0.0 && delta <= 1.0))
        throw InvalidArgument("manifold_cpma: delta must lie in (0, 1]");
    out.nu = atlas.modulus(delta);
    const DeltaGrid grid = build_grids(std::min(1.0, out.nu));

    out.params.resize(d, n);
    out.param_labels.resize(d, n);
    out.ambient.resize(atlas.m, n);
    out.ambient_labels.resize(atlas.m, n);
    out.column_charts.resize(static_cast<std::size_t>(n));

    std::map<std::pair<Index, std::vector<Index>>, std::vector<Index>> cells;
    for (Index k = 0; k < n; ++k) {
        const ManifoldPoint mp = snap_to_manifold(points.col(k).real(), atlas, snap_tol);
        const Chart& chart = atlas.charts[static_cast<std::size_t>(mp.chart_id)];
        if (!(chart.margin(mp.ambient) > 0.0))
            throw PreconditionError("manifold_cpma: joint spectral point not covered by any chart", chart.margin(mp.ambient));
        std::vector<Index> key(static_cast<std::size_t>(d));
        RealVector label(d);
        for (Index i = 0; i < d; ++i) {
            key[static_cast<std::size_t>(i)] = grid.bin(mp.parameters(i));
            label(i) = grid.rep_points[static_cast<std::size_t>(key[static_cast<std::size_t>(i)])];
        }
        out.ambient.col(k) = mp.ambient;
        out.params.col(k) = mp.parameters;
        out.param_labels.col(k) = label;
        out.ambient_labels.col(k) = chart.forward(label);
        out.column_charts[static_cast<std::size_t>(k)] = mp.chart_id;
        cells[{mp.chart_id, key}].push_back(k);
    }

    out.decomp.basis = basis;
    out.decomp.arity = d;
    for (auto& [key, cols] : cells) {
        out.decomp.labels.push_back(out.param_labels.col(cols.front()));
        out.decomp.charts.push_back(key.first);
        out.chart_assignment.push_back(key.first);
        out.decomp.groups.push_back(std::move(cols));
    }

    const VarietyTag tag = manifold_tag(atlas);
    out.ztilde = assemble_tuple(basis, out.ambient_labels.cast<Complex>(), tag);
    out.h = assemble_tuple(basis, out.params.cast<Complex>(), {VarietyKind::cube, {}});
    out.htilde = assemble_tuple(basis, out.param_labels.cast<Complex>(), {VarietyKind::cube, {}});
    return out;
}

inline ManifoldCpmaResult manifold_cpma(const MatrixTuple& z, double delta, const ChartAtlas& atlas, const JointDiagOptions& opt = {}) {
    if (z.arity() != atlas.m)
        throw DimensionError("manifold_cpma: tuple arity does not match the atlas");
    const double scale = std::max(1.0, max_norm(z));
    if (const double h = max_hermiticity_defect(z); h > 1e-8 * scale)
        throw PreconditionError("manifold_cpma: component is not hermitian", h);
    const JointSpectrum js = joint_diagonalize(z, opt);
    return manifold_cpma_from_spectrum(js.basis, js.points, delta, atlas);
}

}  // namespace commpath
