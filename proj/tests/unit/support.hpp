#pragma once

#include "commpath/commpath.hpp"

#include <random>

namespace testing_support {

using namespace commpath;

inline Matrix random_gaussian(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix a(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            a(i, j) = Complex(g(rng), g(rng));
    return a;
}

inline Matrix random_unitary(Index n, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Matrix> qr(random_gaussian(n, rng));
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR();
    for (Index k = 0; k < n; ++k) {
        const Complex d = r(k, k);
        if (std::abs(d) > 0.0)
            q.col(k) *= d / std::abs(d);
    }
    return q;
}

inline Matrix random_hermitian(Index n, std::mt19937_64& rng) {
    const Matrix a = random_gaussian(n, rng);
    return (a + a.adjoint()) / 2.0;
}

inline RealVector uniform_vector(Index n, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    RealVector v(n);
    for (Index k = 0; k < n; ++k)
        v(k) = u(rng);
    return v;
}

inline Matrix diag(std::initializer_list<Complex> values) {
    ComplexVector v(static_cast<Index>(values.size()));
    Index k = 0;
    for (Complex z : values)
        v(k++) = z;
    return v.asDiagonal();
}

// Commuting hermitian tuple Q diag(points_j) Q^H with points uniform in [-r, r].
inline MatrixTuple random_cube_tuple(Index n, Index m, std::mt19937_64& rng, double r = 1.0) {
    const Matrix q = random_unitary(n, rng);
    std::vector<Matrix> comps;
    for (Index j = 0; j < m; ++j)
        comps.push_back(assemble(q, uniform_vector(n, -r, r, rng)));
    return MatrixTuple(std::move(comps), VarietyTag{VarietyKind::cube, {}});
}

inline Matrix expm_hermitian(const Matrix& h, double scale) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h));
    ComplexVector ph(h.rows());
    for (Index k = 0; k < h.rows(); ++k)
        ph(k) = std::polar(1.0, scale * es.eigenvalues()(k));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

inline double max_abs(const Matrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testing_support
