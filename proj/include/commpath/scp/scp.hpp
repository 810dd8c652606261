#pragma once

#include "commpath/cli/instances.hpp"
#include "commpath/paths/connect.hpp"

#include <random>

namespace commpath {

/// Unital completely positive map X -> sum_j S_j X S_j^H from a spherical
/// unitary Kraus tuple.
struct SCPMap {
    MatrixTuple kraus;

    Index dim() const { return kraus.dim(); }
    Index arity() const { return kraus.arity(); }
};

/// Largest of the spherical-unitary residuals: ||sum S S^H - 1||,
/// normality and commutators.
inline double scp_residual(const MatrixTuple& s) {
    const ResidualReport r = variety_residuals(s, {VarietyKind::spherical_unitary, {}});
    return std::max({r.defining_eq_residual.value_or(0.0), r.hermiticity_or_normality_max, r.commutator_max});
}

inline SCPMap make_scp_map(const MatrixTuple& kraus, double tol = 1e-10) {
    if (const double r = scp_residual(kraus); r > tol)
        throw PreconditionError("make_scp_map: Kraus tuple is not a spherical unitary", r);
    return {kraus.with_variety({VarietyKind::spherical_unitary, {}})};
}

inline Matrix apply_scp(const SCPMap& map, const Matrix& x) {
    if (x.rows() != map.dim() || x.cols() != map.dim())
        throw DimensionError("apply_scp: dimension mismatch");
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    for (const auto& s : map.kraus)
        out += s * x * s.adjoint();
    return out;
}

/// Random contraction with ||X|| = 1.
inline Matrix random_contraction(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix x(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            x(i, j) = Complex(g(rng), g(rng));
    return x / spectral_norm(x);
}

/// t -> psi_{gamma(t)} for a spherical-unitary path gamma.
struct SCPPath {
    MatrixPath kraus_path;
    double epsilon = 0.0;  // 2m times the Kraus path radius

    SCPMap at(double t) const { return {kraus_path.eval(t)}; }
};

/// Path of SCP maps from psi_S to psi_T; the Kraus path is built with
/// radius epsilon / (2m), so ||Psi_t(X) - psi_S(X)|| < epsilon on contractions.
inline SCPPath connect_scp(const SCPMap& s, const SCPMap& t, double epsilon_target, const ConnectOptions& opt = {}) {
    require_same_shape(s.kraus, t.kraus);
    const double m = static_cast<double>(s.arity());
    SCPPath out;
    out.kraus_path = connect_spherical_unitary(s.kraus, t.kraus, epsilon_target / (2.0 * m), opt);
    out.epsilon = 2.0 * m * out.kraus_path.epsilon;
    return out;
}

struct SCPBoundReport {
    int trials = 0;
    double eth = 0.0;           // d(S, T)
    double bound = 0.0;         // 2 m d(S, T)
    double max_deviation = 0.0; // max ||psi_S(X) - psi_T(X)||
    double max_ratio = 0.0;     // max deviation / bound
    int violations = 0;         // trials with deviation > bound + 1e-10
};

/// Monte-Carlo check of ||psi_S(X) - psi_T(X)|| <= 2m d(S,T) over random
/// contractions.
inline SCPBoundReport scp_deviation_bound_check(const SCPMap& s, const SCPMap& t, int trials, std::uint64_t seed) {
    require_same_shape(s.kraus, t.kraus);
    SCPBoundReport r;
    r.trials = trials;
    r.eth = metric_eth(s.kraus, t.kraus);
    r.bound = 2.0 * static_cast<double>(s.arity()) * r.eth;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < trials; ++i) {
        const Matrix x = random_contraction(s.dim(), rng);
        const double dev = spectral_norm(apply_scp(s, x) - apply_scp(t, x));
        r.max_deviation = std::max(r.max_deviation, dev);
        if (r.bound > 0.0)
            r.max_ratio = std::max(r.max_ratio, dev / r.bound);
        if (dev > r.bound + 1e-10)
            ++r.violations;
    }
    return r;
}

}  // namespace commpath
