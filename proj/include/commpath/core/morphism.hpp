#pragma once

#include "commpath/core/assignment.hpp"
#include "commpath/core/joint_diag.hpp"

namespace commpath {

/// Result of aligning X with Y's joint eigenbasis. W maps the eigenvector of
/// X carrying point perm[k] onto Y's k-th eigenvector, so psi_x = Ad[W](X) is
/// diagonal in Y's basis.
struct ConjugationMorphism {
    Matrix w;
    MatrixTuple psi_x;
    Permutation perm;
    JointSpectrum x_spectrum;
    JointSpectrum y_spectrum;
    Matrix psi_points;  // m x n, column k = X point perm[k]
    double eth_psi_x = 0.0;
    double eth_psi_y = 0.0;
};

inline ConjugationMorphism conjugation_morphism(const MatrixTuple& x, const MatrixTuple& y, const JointDiagOptions& opt = {}) {
    require_same_shape(x, y);
    ConjugationMorphism out;
    out.x_spectrum = joint_diagonalize(x, opt);
    out.y_spectrum = joint_diagonalize(y, opt);
    out.perm = eigenvalue_assignment(out.x_spectrum.points, out.y_spectrum.points);

    const Index n = x.dim();
    Matrix permuted_x_basis(n, n);
    out.psi_points.resize(x.arity(), n);
    for (Index k = 0; k < n; ++k) {
        const Index src = out.perm[static_cast<std::size_t>(k)];
        permuted_x_basis.col(k) = out.x_spectrum.basis.col(src);
        out.psi_points.col(k) = out.x_spectrum.points.col(src);
    }
    out.w = out.y_spectrum.basis * permuted_x_basis.adjoint();
    out.psi_x = assemble_tuple(out.y_spectrum.basis, out.psi_points, x.variety());
    out.eth_psi_x = metric_eth(out.psi_x, x);
    out.eth_psi_y = metric_eth(out.psi_x, y);
    return out;
}

}  // namespace commpath
