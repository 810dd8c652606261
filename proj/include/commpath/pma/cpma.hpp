#pragma once

#include "commpath/core/joint_diag.hpp"
#include "commpath/pma/grid.hpp"

#include <map>
#include <tuple>

namespace commpath {

/// Orthogonal partition of unity given by groups of columns of one unitary
/// basis. Projector j is B_j B_j^H where B_j holds the columns in groups[j].
/// Labels are the grid values attached to each projector; charts is empty
/// unless the decomposition came from an atlas.
struct ProjectiveDecomposition {
    Matrix basis;
    std::vector<std::vector<Index>> groups;
    std::vector<RealVector> labels;
    std::vector<Index> charts;
    Index arity = 0;

    Index size() const { return static_cast<Index>(groups.size()); }
    Index dim() const { return basis.rows(); }

    Matrix block(Index j) const {
        const auto& cols = groups[static_cast<std::size_t>(j)];
        Matrix b(basis.rows(), static_cast<Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c)
            b.col(static_cast<Index>(c)) = basis.col(cols[c]);
        return b;
    }

    Matrix projector(Index j) const {
        const Matrix b = block(j);
        return hermitian_part(b * b.adjoint());
    }

    /// Group index of every basis column.
    std::vector<Index> column_groups() const {
        std::vector<Index> owner(static_cast<std::size_t>(basis.cols()), -1);
        for (std::size_t j = 0; j < groups.size(); ++j)
            for (Index c : groups[j])
                owner[static_cast<std::size_t>(c)] = static_cast<Index>(j);
        return owner;
    }
};

struct CpmaResult {
    MatrixTuple xtilde;
    ProjectiveDecomposition decomp;
    Matrix points;       // joint spectrum of the input, m x n
    Matrix grid_points;  // snapped labels per column, m x n
    DeltaGrid grid;
};

/// Snaps every joint spectral point (columns of `points`, real parts) to the
/// product grid and groups equal labels. Groups are ordered lexicographically
/// by label.
inline CpmaResult cpma_from_spectrum(const Matrix& basis, const Matrix& points, double delta, VarietyTag tag = {VarietyKind::cube, {}}) {
    const Index m = points.rows();
    const Index n = points.cols();
    CpmaResult out;
    out.grid = build_grids(delta);
    out.points = points;
    out.grid_points = Matrix::Zero(m, n);

    std::map<std::vector<Index>, std::vector<Index>> cells;
    for (Index k = 0; k < n; ++k) {
        std::vector<Index> key(static_cast<std::size_t>(m));
        for (Index j = 0; j < m; ++j) {
            key[static_cast<std::size_t>(j)] = out.grid.bin(points(j, k).real());
            out.grid_points(j, k) = out.grid.rep_points[static_cast<std::size_t>(key[static_cast<std::size_t>(j)])];
        }
        cells[key].push_back(k);
    }

    out.decomp.basis = basis;
    out.decomp.arity = m;
    for (auto& [key, cols] : cells) {
        RealVector label(m);
        for (Index j = 0; j < m; ++j)
            label(j) = out.grid.rep_points[static_cast<std::size_t>(key[static_cast<std::size_t>(j)])];
        out.decomp.groups.push_back(std::move(cols));
        out.decomp.labels.push_back(std::move(label));
    }
    out.xtilde = assemble_tuple(basis, out.grid_points, std::move(tag));
    return out;
}

namespace detail {

inline void require_cube_tuple(const JointSpectrum& js, const MatrixTuple& x) {
    const double scale = std::max(1.0, max_norm(x));
    if (const double h = max_hermiticity_defect(x); h > 1e-8 * scale)
        throw PreconditionError("cpma: component is not hermitian", h);
    const double peak = js.points.cwiseAbs().maxCoeff();
    if (peak > 1.0 + 1e-12)
        throw PreconditionError("cpma: component norm exceeds 1", peak - 1.0);
}

}  // namespace detail

/// Commuting pseudospectral approximant of a commuting hermitian tuple.
inline CpmaResult cpma_md(const MatrixTuple& x, double delta, const JointDiagOptions& opt = {}) {
    build_grids(delta);
    const JointSpectrum js = joint_diagonalize(x, opt);
    detail::require_cube_tuple(js, x);
    return cpma_from_spectrum(js.basis, js.points, delta);
}

inline CpmaResult cpma_1d(const Matrix& x, double delta, const JointDiagOptions& opt = {}) {
    return cpma_md(MatrixTuple({x}), delta, opt);
}

}  // namespace commpath
