#pragma once

#include "commpath/core/types.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace commpath {

/// Operator 2-norm. Uses the largest eigenvalue of A^H A, which is accurate
/// to relative machine precision for the largest singular value.
inline double spectral_norm(const Matrix& a) {
    if (a.size() == 0)
        return 0.0;
    if (a.rows() == 1 && a.cols() == 1)
        return std::abs(a(0, 0));
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0)
        return 0.0;
    const Matrix b = a / scale;
    Eigen::SelfAdjointEigenSolver<Matrix> es(b.adjoint() * b, Eigen::EigenvaluesOnly);
    return scale * std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline double smallest_singular_value(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues().minCoeff();
}

inline Matrix identity(Index n) { return Matrix::Identity(n, n); }

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline double hermiticity_defect(const Matrix& a) { return spectral_norm(a - a.adjoint()); }

inline double normality_defect(const Matrix& a) { return spectral_norm(a * a.adjoint() - a.adjoint() * a); }

inline double unitarity_defect(const Matrix& u) { return spectral_norm(u * u.adjoint() - identity(u.rows())); }

inline Matrix hermitian_part(const Matrix& a) { return (a + a.adjoint()) / 2.0; }

inline Matrix skew_hermitian_part_over_i(const Matrix& a) { return (a - a.adjoint()) / Complex(0.0, 2.0); }

/// Q diag(values) Q^H. When every value is real the result is made exactly
/// hermitian.
inline Matrix assemble(const Matrix& basis, const ComplexVector& values) {
    Matrix out = basis * values.asDiagonal() * basis.adjoint();
    if ((values.imag().array() == 0.0).all())
        out = hermitian_part(out);
    return out;
}

inline Matrix assemble(const Matrix& basis, const RealVector& values) {
    return hermitian_part(basis * values.cast<Complex>().asDiagonal() * basis.adjoint());
}

/// Ad[u](x) = u x_j u^H componentwise.
inline MatrixTuple conjugate(const Matrix& u, const MatrixTuple& x) {
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(x.arity()));
    for (const auto& c : x)
        out.push_back(u * c * u.adjoint());
    return MatrixTuple(std::move(out), x.variety());
}

inline double max_norm(const MatrixTuple& x) {
    double s = 0.0;
    for (const auto& c : x)
        s = std::max(s, spectral_norm(c));
    return s;
}

/// The tuple metric: max_j ||S_j - T_j||.
inline double metric_eth(const MatrixTuple& s, const MatrixTuple& t) {
    require_same_shape(s, t);
    double d = 0.0;
    for (Index j = 0; j < s.arity(); ++j)
        d = std::max(d, spectral_norm(s[j] - t[j]));
    return d;
}

inline double max_commutator(const MatrixTuple& x) {
    double r = 0.0;
    for (Index j = 0; j < x.arity(); ++j)
        for (Index k = j + 1; k < x.arity(); ++k)
            r = std::max(r, spectral_norm(commutator(x[j], x[k])));
    return r;
}

/// Largest commutator between any component of a and any component of b.
inline double max_cross_commutator(const MatrixTuple& a, const MatrixTuple& b) {
    double r = 0.0;
    for (const auto& p : a)
        for (const auto& q : b)
            r = std::max(r, spectral_norm(commutator(p, q)));
    return r;
}

inline double max_hermiticity_defect(const MatrixTuple& x) {
    double r = 0.0;
    for (const auto& c : x)
        r = std::max(r, hermiticity_defect(c));
    return r;
}

inline double max_normality_defect(const MatrixTuple& x) {
    double r = 0.0;
    for (const auto& c : x)
        r = std::max(r, normality_defect(c));
    return r;
}

/// (X_1..X_m) -> (Re X_1..Re X_m, Im X_1..Im X_m).
inline MatrixTuple hermitian_partition(const MatrixTuple& x, double tol = 1e-8) {
    std::vector<Matrix> out(static_cast<std::size_t>(2 * x.arity()));
    for (Index j = 0; j < x.arity(); ++j) {
        const double defect = normality_defect(x[j]);
        const double scale = std::max(1.0, spectral_norm(x[j]));
        if (defect > tol * scale * scale)
            throw PreconditionError("hermitian_partition: component is not normal", defect);
        out[static_cast<std::size_t>(j)] = hermitian_part(x[j]);
        out[static_cast<std::size_t>(j + x.arity())] = skew_hermitian_part_over_i(x[j]);
    }
    return MatrixTuple(std::move(out), VarietyTag{VarietyKind::cube, {}});
}

/// (H_1..H_2m) -> (H_1 + i H_{m+1}, ..., H_m + i H_{2m}).
inline MatrixTuple juncture(const MatrixTuple& h) {
    if (h.arity() % 2 != 0)
        throw InvalidArgument("juncture requires an even number of components");
    const Index m = h.arity() / 2;
    std::vector<Matrix> out(static_cast<std::size_t>(m));
    for (Index j = 0; j < m; ++j)
        out[static_cast<std::size_t>(j)] = h[j] + Complex(0.0, 1.0) * h[j + m];
    return MatrixTuple(std::move(out), VarietyTag{VarietyKind::disk, {}});
}

/// (U_1..U_m) -> (Re U_1, Im U_1, ..., Re U_m, Im U_m); the interleaved lift
/// used for torus and spherical-unitary tuples.
inline MatrixTuple interleaved_partition(const MatrixTuple& u) {
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(2 * u.arity()));
    for (const auto& c : u) {
        out.push_back(hermitian_part(c));
        out.push_back(skew_hermitian_part_over_i(c));
    }
    return MatrixTuple(std::move(out));
}

/// Inverse of interleaved_partition.
inline MatrixTuple interleaved_juncture(const MatrixTuple& h) {
    if (h.arity() % 2 != 0)
        throw InvalidArgument("juncture requires an even number of components");
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(h.arity() / 2));
    for (Index j = 0; j < h.arity(); j += 2)
        out.push_back(h[j] + Complex(0.0, 1.0) * h[j + 1]);
    return MatrixTuple(std::move(out));
}

/// Projection onto the diagonal.
inline Matrix full_pinching(const Matrix& a) {
    Matrix d = Matrix::Zero(a.rows(), a.cols());
    d.diagonal() = a.diagonal();
    return d;
}

/// Hausdorff distance between finite point sets (columns) in C^d.
inline double hausdorff_distance(const Matrix& a, const Matrix& b) {
    if (a.cols() == 0 || b.cols() == 0)
        throw InvalidArgument("hausdorff_distance: point sets must be nonempty");
    if (a.rows() != b.rows())
        throw DimensionError("hausdorff_distance: points differ in dimension");
    auto directed = [](const Matrix& p, const Matrix& q) {
        double sup = 0.0;
        for (Index i = 0; i < p.cols(); ++i) {
            double inf = std::numeric_limits<double>::infinity();
            for (Index k = 0; k < q.cols(); ++k)
                inf = std::min(inf, (p.col(i) - q.col(k)).norm());
            sup = std::max(sup, inf);
        }
        return sup;
    };
    return std::max(directed(a, b), directed(b, a));
}

inline double hausdorff_distance(const ComplexVector& a, const ComplexVector& b) {
    return hausdorff_distance(Matrix(a.transpose()), Matrix(b.transpose()));
}

/// Eigenvalues of a normal matrix, computed with the general complex solver.
inline ComplexVector normal_spectrum(const Matrix& a) {
    Eigen::ComplexEigenSolver<Matrix> es(a, false);
    return es.eigenvalues();
}

/// lambda lies in the eps-pseudospectrum of X iff s_min(X - lambda) <= eps.
inline bool pseudospectrum_member(const Matrix& x, Complex lambda, double eps) {
    if (eps < 0.0)
        throw InvalidArgument("pseudospectrum_member: eps must be nonnegative");
    const Matrix shifted = x - lambda * identity(x.rows());
    // Exact eigenvalues can leave s_min at rounding level; eps = 0 then asks
    // for singularity up to that level.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, spectral_norm(x));
    return smallest_singular_value(shifted) <= std::max(eps, floor);
}

}  // namespace commpath
