#pragma once

#include "commpath/core/joint_diag.hpp"
#include "commpath/manifold/atlas.hpp"

#include <numbers>
#include <random>

namespace commpath {

/// Haar unitary: QR of a complex Gaussian matrix with the diagonal of R
/// normalized to positive reals.
inline Matrix haar_unitary(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix a(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            a(i, j) = Complex(g(rng), g(rng));
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    const Matrix& r = qr.matrixQR();
    for (Index j = 0; j < n; ++j) {
        const double mag = std::abs(r(j, j));
        if (mag > 0.0)
            q.col(j) *= r(j, j) / mag;
    }
    return q;
}

/// Arity of the tuple that `gen` builds for a variety; m is the user-facing
/// count (ignored for builtin manifold ids, which fix their own arity).
inline Index instance_arity(const VarietyTag& tag, Index m) {
    if (tag.kind == VarietyKind::manifold)
        return builtin_atlas(tag.atlas_id).m;
    return m;
}

namespace detail {

inline RealVector gaussian_unit(Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    RealVector v(d);
    do {
        for (Index i = 0; i < d; ++i)
            v(i) = g(rng);
    } while (v.norm() == 0.0);
    return v / v.norm();
}

// One random joint spectral point (a column of length `arity`).
inline ComplexVector random_spectral_point(const VarietyTag& tag, Index arity, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    ComplexVector p(arity);
    switch (tag.kind) {
    case VarietyKind::none:
    case VarietyKind::cube:
        for (Index i = 0; i < arity; ++i)
            p(i) = unif(rng);
        break;
    case VarietyKind::disk:
        for (Index i = 0; i < arity; ++i)
            p(i) = std::polar(std::sqrt(0.5 * (unif(rng) + 1.0)), angle(rng));
        break;
    case VarietyKind::torus:
        for (Index i = 0; i < arity; ++i)
            p(i) = std::polar(1.0, angle(rng));
        break;
    case VarietyKind::sphere:
        p = gaussian_unit(arity, rng).cast<Complex>();
        break;
    case VarietyKind::spherical_unitary: {
        const RealVector v = gaussian_unit(2 * arity, rng);
        for (Index i = 0; i < arity; ++i)
            p(i) = Complex(v(2 * i), v(2 * i + 1));
        break;
    }
    case VarietyKind::manifold: {
        const ChartAtlas atlas = builtin_atlas(tag.atlas_id);
        if (atlas.kind == AtlasKind::sphere)
            return random_spectral_point({VarietyKind::sphere, {}}, arity, rng);
        if (atlas.kind == AtlasKind::cube)
            return random_spectral_point({VarietyKind::cube, {}}, arity, rng);
        for (Index i = 0; i < arity / 2; ++i) {
            const double t = angle(rng);
            p(2 * i) = std::cos(t);
            p(2 * i + 1) = std::sin(t);
        }
        break;
    }
    }
    return p;
}

// Moves a spectral point by at most `a` per coordinate (complex modulus for
// complex coordinates) while staying in the spectral set.
inline ComplexVector move_spectral_point(const ComplexVector& p, const VarietyTag& tag, double a, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    const Index m = p.size();
    ComplexVector q = p;
    auto rotate_on_sphere = [&](const RealVector& x) {
        // Great-circle step of length <= a in a random tangent direction.
        RealVector t = gaussian_unit(x.size(), rng);
        t -= t.dot(x) * x;
        if (t.norm() < 1e-12)
            return x;
        t /= t.norm();
        const double s = a * 0.5 * (unif(rng) + 1.0);
        RealVector y = std::cos(s) * x + std::sin(s) * t;
        return RealVector(y / y.norm());
    };
    switch (tag.kind) {
    case VarietyKind::none:
    case VarietyKind::cube:
        for (Index i = 0; i < m; ++i)
            q(i) = std::clamp(p(i).real() + a * unif(rng), -1.0, 1.0);
        break;
    case VarietyKind::disk:
        for (Index i = 0; i < m; ++i) {
            Complex z = p(i) + std::polar(a * 0.5 * (unif(rng) + 1.0), angle(rng));
            if (std::abs(z) > 1.0)
                z /= std::abs(z);
            q(i) = z;
        }
        break;
    case VarietyKind::torus:
        for (Index i = 0; i < m; ++i)
            q(i) = p(i) * std::polar(1.0, a * unif(rng));
        break;
    case VarietyKind::sphere:
        q = rotate_on_sphere(p.real()).cast<Complex>();
        break;
    case VarietyKind::spherical_unitary: {
        RealVector x(2 * m);
        for (Index i = 0; i < m; ++i) {
            x(2 * i) = p(i).real();
            x(2 * i + 1) = p(i).imag();
        }
        const RealVector y = rotate_on_sphere(x);
        for (Index i = 0; i < m; ++i)
            q(i) = Complex(y(2 * i), y(2 * i + 1));
        break;
    }
    case VarietyKind::manifold: {
        const ChartAtlas atlas = builtin_atlas(tag.atlas_id);
        if (atlas.kind == AtlasKind::sphere)
            return move_spectral_point(p, {VarietyKind::sphere, {}}, a, rng);
        if (atlas.kind == AtlasKind::cube)
            return move_spectral_point(p, {VarietyKind::cube, {}}, a, rng);
        for (Index i = 0; i < m / 2; ++i) {
            const double t = std::atan2(p(2 * i + 1).real(), p(2 * i).real()) + a * unif(rng);
            q(2 * i) = std::cos(t);
            q(2 * i + 1) = std::sin(t);
        }
        break;
    }
    }
    return q;
}

inline void tidy(MatrixTuple& x) {
    const VarietyKind k = x.variety().kind;
    if (k == VarietyKind::cube || k == VarietyKind::sphere || k == VarietyKind::manifold)
        for (Index j = 0; j < x.arity(); ++j)
            x[j] = hermitian_part(x[j]);
}

}  // namespace detail

/// Random tuple on a variety: a random joint spectrum on the spectral set,
/// conjugated by a Haar unitary.
inline MatrixTuple random_instance(const VarietyTag& tag, Index n, Index m, std::uint64_t seed) {
    if (n < 1)
        throw InvalidArgument("random_instance: n must be positive");
    if (tag.kind == VarietyKind::none)
        throw InvalidArgument("random_instance: a variety is required");
    const Index arity = instance_arity(tag, m);
    if (arity < 1)
        throw InvalidArgument("random_instance: m must be positive");
    if (tag.kind == VarietyKind::sphere && arity < 2)
        throw InvalidArgument("random_instance: sphere tuples need m >= 2");
    std::mt19937_64 rng(seed);
    const Matrix q = haar_unitary(n, rng);
    Matrix pts(arity, n);
    for (Index k = 0; k < n; ++k)
        pts.col(k) = detail::random_spectral_point(tag, arity, rng);
    MatrixTuple x = assemble_tuple(q, pts, tag);
    detail::tidy(x);
    return x;
}

struct PerturbedPair {
    MatrixTuple x;
    MatrixTuple y;
    double eth = 0.0;  // achieved d(x, y)
};

/// Second tuple on the same variety with d(x, y) <= delta: joint spectral
/// points moved by at most delta/2 inside the spectral set, then the basis
/// rotated by exp(i eta K) with ||K|| = 1 and eta = delta/4.
inline PerturbedPair perturb(const MatrixTuple& x, double delta, std::uint64_t seed, const JointDiagOptions& opt = {}) {
    if (!(delta >= 0.0) || delta > 2.0)
        throw InvalidArgument("perturb: delta must lie in [0, 2]");
    PerturbedPair out{x, x, 0.0};
    if (delta == 0.0)
        return out;
    std::mt19937_64 rng(seed);
    const JointSpectrum js = joint_diagonalize(x, opt);
    const Index n = x.dim();
    Matrix pts(x.arity(), n);
    for (Index k = 0; k < n; ++k)
        pts.col(k) = detail::move_spectral_point(js.points.col(k), x.variety(), 0.5 * delta, rng);

    Matrix k = haar_unitary(n, rng);
    k = hermitian_part(k);
    k /= std::max(spectral_norm(k), 1e-300);
    Eigen::SelfAdjointEigenSolver<Matrix> es(k);
    ComplexVector ph(n);
    for (Index i = 0; i < n; ++i)
        ph(i) = std::polar(1.0, 0.25 * delta * es.eigenvalues()(i));
    const Matrix v = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();

    out.y = assemble_tuple(v * js.basis, pts, x.variety());
    detail::tidy(out.y);
    out.eth = metric_eth(out.x, out.y);
    if (out.eth > delta)
        throw ConvergenceError("perturb: achieved distance exceeds delta", out.eth);
    return out;
}

}  // namespace commpath
