#pragma once

#include "commpath/core/linalg.hpp"

#include <array>
#include <cstdint>
#include <random>

namespace commpath {

/// Joint spectrum of a commuting normal tuple: column k of `basis` is the
/// k-th joint eigenvector and column k of `points` is Lambda^(k) in C^m.
struct JointSpectrum {
    Matrix basis;
    Matrix points;  // m x n
    bool hermitian = false;

    Index dim() const { return basis.rows(); }
    Index arity() const { return points.rows(); }

    RealVector real_point(Index k) const { return points.col(k).real(); }
    ComplexVector component_values(Index j) const { return points.row(j).transpose(); }
};

struct JointDiagOptions {
    // Commutator/normality tolerance relative to max_j ||X_j||^2, and
    // off-diagonal tolerance relative to ||X_j||.
    double tol = 1e-8;
    std::uint64_t seed = 0x5eed'c0ffeeULL;
    int max_sweeps = 60;
};

namespace detail {

// One complex Jacobi rotation acting on indices (p, q) of a family of
// hermitian matrices, chosen to maximise the joint diagonal energy.
struct JacobiRotation {
    double c = 1.0;
    Complex s = 0.0;
};

inline JacobiRotation joint_rotation(const std::vector<Matrix>& as, Index p, Index q) {
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    for (const auto& a : as) {
        const Complex b = a(p, q);
        const Eigen::Vector3d v(a(p, p).real() - a(q, q).real(), 2.0 * b.real(), 2.0 * b.imag());
        g += v * v.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(g);
    Eigen::Vector3d v = es.eigenvectors().col(2);
    if (v(0) < 0.0)
        v = -v;
    JacobiRotation r;
    r.c = std::sqrt((1.0 + v(0)) / 2.0);
    r.s = Complex(v(1), -v(2)) / (2.0 * r.c);
    return r;
}

// A <- R^H A R with R = [[c, -conj(s)], [s, c]] on coordinates (p, q).
inline void apply_rotation(Matrix& a, Index p, Index q, const JacobiRotation& r) {
    const Complex sc = std::conj(r.s);
    const ComplexVector colp = a.col(p);
    const ComplexVector colq = a.col(q);
    a.col(p) = r.c * colp + r.s * colq;
    a.col(q) = -sc * colp + r.c * colq;
    const Eigen::RowVectorXcd rowp = a.row(p);
    const Eigen::RowVectorXcd rowq = a.row(q);
    a.row(p) = r.c * rowp + sc * rowq;
    a.row(q) = -r.s * rowp + r.c * rowq;
}

inline void apply_rotation_right(Matrix& q_basis, Index p, Index q, const JacobiRotation& r) {
    const ComplexVector colp = q_basis.col(p);
    const ComplexVector colq = q_basis.col(q);
    q_basis.col(p) = r.c * colp + r.s * colq;
    q_basis.col(q) = -std::conj(r.s) * colp + r.c * colq;
}

inline double max_off_diagonal(const Matrix& a) {
    double r = 0.0;
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            if (i != j)
                r = std::max(r, std::abs(a(i, j)));
    return r;
}

// Cyclic Jacobi sweeps reducing the joint off-diagonal energy of `as`.
inline void jacobi_refine(std::vector<Matrix>& as, Matrix& basis, double scale, int max_sweeps) {
    const Index n = basis.rows();
    const double floor = 1e-15 * scale;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double largest = 0.0;
        for (Index p = 0; p < n; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                double off = 0.0;
                for (const auto& a : as)
                    off = std::max(off, std::abs(a(p, q)));
                if (off <= floor)
                    continue;
                const JacobiRotation r = joint_rotation(as, p, q);
                if (std::abs(r.s) < 1e-18)
                    continue;
                largest = std::max(largest, std::abs(r.s));
                for (auto& a : as)
                    apply_rotation(a, p, q, r);
                apply_rotation_right(basis, p, q, r);
            }
        }
        if (largest < 1e-15)
            break;
    }
}

}  // namespace detail

/// Simultaneous unitary diagonalisation of a tuple of pairwise commuting
/// normal matrices. A generic real combination of the hermitian parts is
/// eigendecomposed, then Jacobi sweeps repair near-degenerate clusters.
inline JointSpectrum joint_diagonalize(const MatrixTuple& x, const JointDiagOptions& opt = {}) {
    const Index n = x.dim();
    const Index m = x.arity();
    const double scale = max_norm(x);

    JointSpectrum out;
    out.points = Matrix::Zero(m, n);
    out.hermitian = std::all_of(x.begin(), x.end(), [](const Matrix& c) {
        return (c - c.adjoint()).cwiseAbs().maxCoeff() == 0.0;
    });
    if (scale == 0.0) {
        out.basis = identity(n);
        return out;
    }

    const double comm_tol = opt.tol * scale * scale;
    if (const double r = max_normality_defect(x); r > comm_tol)
        throw PreconditionError("joint_diagonalize: component is not normal", r);
    if (const double r = max_commutator(x); r > comm_tol)
        throw PreconditionError("joint_diagonalize: components do not commute", r);

    std::vector<Matrix> parts;
    parts.reserve(static_cast<std::size_t>(2 * m));
    for (const auto& c : x) {
        parts.push_back(hermitian_part(c));
        Matrix im = skew_hermitian_part_over_i(c);
        if (im.cwiseAbs().maxCoeff() > 0.0)
            parts.push_back(hermitian_part(im));
    }

    Matrix combo;
    if (parts.size() == 1) {
        combo = parts.front();
    } else {
        std::mt19937_64 rng(opt.seed);
        std::uniform_real_distribution<double> coeff(0.5, 1.5);
        combo = Matrix::Zero(n, n);
        for (std::size_t k = 0; k < parts.size(); ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            combo += (sign * coeff(rng) / static_cast<double>(k + 1)) * parts[k];
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(combo);
    Matrix basis = es.eigenvectors();

    std::vector<Matrix> rotated;
    rotated.reserve(parts.size());
    double off = 0.0;
    for (const auto& p : parts) {
        rotated.push_back(basis.adjoint() * p * basis);
        off = std::max(off, detail::max_off_diagonal(rotated.back()));
    }
    if (off > 1e-14 * scale)
        detail::jacobi_refine(rotated, basis, scale, opt.max_sweeps);

    // Phase convention: the largest-magnitude entry of each column is real
    // and positive.
    for (Index k = 0; k < n; ++k) {
        Index arg = 0;
        basis.col(k).cwiseAbs().maxCoeff(&arg);
        const Complex z = basis(arg, k);
        basis.col(k) *= std::conj(z) / std::abs(z);
        basis(arg, k) = Complex(std::abs(basis(arg, k)), 0.0);
    }

    double worst = 0.0;
    for (Index j = 0; j < m; ++j) {
        const Matrix d = basis.adjoint() * x[j] * basis;
        out.points.row(j) = d.diagonal().transpose();
        const double nj = spectral_norm(x[j]);
        if (nj > 0.0)
            worst = std::max(worst, detail::max_off_diagonal(d) / nj);
    }
    if (worst > opt.tol)
        throw ConvergenceError("joint_diagonalize: off-diagonal residual above tolerance", worst);
    if (out.hermitian)
        out.points = out.points.real().cast<Complex>();
    out.basis = std::move(basis);
    return out;
}

/// Rebuilds the tuple (Q diag(points_j) Q^H)_j.
inline MatrixTuple assemble_tuple(const Matrix& basis, const Matrix& points, VarietyTag tag = {}) {
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(points.rows()));
    for (Index j = 0; j < points.rows(); ++j)
        out.push_back(assemble(basis, ComplexVector(points.row(j).transpose())));
    return MatrixTuple(std::move(out), std::move(tag));
}

}  // namespace commpath
