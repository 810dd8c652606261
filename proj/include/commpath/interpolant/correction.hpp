#pragma once

#include "commpath/core/linalg.hpp"
#include "commpath/pma/cpma.hpp"

#include <numbers>

namespace commpath {

namespace detail {

// Operator norm of a tall n x r matrix through its r x r Gram matrix.
inline double tall_norm(const Matrix& a) {
    if (a.cols() == 0)
        return 0.0;
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0)
        return 0.0;
    const Matrix b = a / scale;
    Eigen::SelfAdjointEigenSolver<Matrix> es(b.adjoint() * b, Eigen::EigenvaluesOnly);
    return scale * std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// Unitary factor of the polar decomposition.
inline Matrix polar_unitary(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

// Inverse square root of a hermitian positive definite matrix.
inline Matrix inverse_sqrt(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a));
    const RealVector w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Unitary U with U P U^H = Q, the polar factor of T = QP + (1-Q)(1-P).
inline Matrix projection_exchange_unitary(const Matrix& p, const Matrix& q) {
    if (p.rows() != q.rows() || p.cols() != q.cols() || p.rows() != p.cols())
        throw DimensionError("projection_exchange_unitary: shape mismatch");
    const double gap = spectral_norm(p - q);
    if (gap >= 1.0)
        throw PreconditionError("projection_exchange_unitary: projectors are at distance >= 1", gap);
    const Matrix one = identity(p.rows());
    const Matrix t = q * p + (one - q) * (one - p);
    return t * detail::inverse_sqrt(t.adjoint() * t);
}

struct AlmostUnitCorrection {
    Matrix z;                     // commutes with every projector
    Matrix wtilde;                // z^H
    std::vector<double> defects;  // ||W P_j W^H - P_j||
    double defect = 0.0;
    double defect_limit = 0.0;    // 1 / (sqrt 2 N)
    double bound = 0.0;           // sqrt 2 N defect
    double distance = 0.0;        // ||1 - W Z||
};

/// Corrects W to a unitary commuting with the decomposition. With W_j the
/// exchange unitary taking W P_j W^H to P_j, Wtilde = sum_j W_j W P_j and
/// Z = Wtilde^H. On range(P_j) this equals B_j polar(B_j^H W B_j) B_j^H,
/// which is how it is evaluated.
inline AlmostUnitCorrection almost_commuting_unitary_correction(const Matrix& w, const ProjectiveDecomposition& decomp) {
    const Index n = decomp.dim();
    if (w.rows() != n || w.cols() != n)
        throw DimensionError("almost_commuting_unitary_correction: shape mismatch");
    const Index count = decomp.size();
    AlmostUnitCorrection out;
    out.defect_limit = 1.0 / (std::numbers::sqrt2 * static_cast<double>(count));

    const Matrix core = decomp.basis.adjoint() * w * decomp.basis;
    Matrix blocks = Matrix::Zero(n, n);
    for (Index j = 0; j < count; ++j) {
        const auto& cols = decomp.groups[static_cast<std::size_t>(j)];
        const Index r = static_cast<Index>(cols.size());
        const Matrix b = decomp.block(j);
        const Matrix a = w * b;
        Matrix m(r, r);
        for (Index u = 0; u < r; ++u)
            for (Index v = 0; v < r; ++v)
                m(u, v) = core(cols[static_cast<std::size_t>(u)], cols[static_cast<std::size_t>(v)]);
        const double d = detail::tall_norm(a - b * m);
        out.defects.push_back(d);
        out.defect = std::max(out.defect, d);
        const Matrix polar = detail::polar_unitary(m);
        for (Index u = 0; u < r; ++u)
            for (Index v = 0; v < r; ++v)
                blocks(cols[static_cast<std::size_t>(u)], cols[static_cast<std::size_t>(v)]) = polar(u, v);
    }
    if (out.defect >= out.defect_limit)
        throw PreconditionError("almost_commuting_unitary_correction: projector defect exceeds 1/(sqrt(2) N)", out.defect);

    out.wtilde = decomp.basis * blocks * decomp.basis.adjoint();
    out.z = out.wtilde.adjoint();
    out.bound = std::numbers::sqrt2 * static_cast<double>(count) * out.defect;
    out.distance = spectral_norm(identity(n) - w * out.z);
    return out;
}

}  // namespace commpath
