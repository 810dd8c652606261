#pragma once

#include "commpath/core/joint_diag.hpp"
#include "commpath/manifold/atlas.hpp"

#include <optional>

namespace commpath {

struct ResidualReport {
    double commutator_max = 0.0;
    double hermiticity_or_normality_max = 0.0;
    double norm_excess_max = 0.0;
    std::optional<double> manifold_distance;
    std::optional<double> defining_eq_residual;
};

namespace detail {

// Largest distance of a joint spectral point from the manifold; empty when
// the tuple is too far from commuting to be jointly diagonalized.
inline std::optional<double> joint_spectrum_distance(const MatrixTuple& x, const std::function<double(const RealVector&)>& distance, bool complex_points) {
    JointDiagOptions loose;
    loose.tol = 1e-6;
    try {
        const JointSpectrum js = joint_diagonalize(x, loose);
        double worst = 0.0;
        for (Index k = 0; k < js.points.cols(); ++k) {
            RealVector p;
            if (complex_points) {
                p.resize(2 * js.points.rows());
                for (Index j = 0; j < js.points.rows(); ++j) {
                    p(2 * j) = js.points(j, k).real();
                    p(2 * j + 1) = js.points(j, k).imag();
                }
            } else {
                p = js.points.col(k).real();
            }
            worst = std::max(worst, distance(p));
        }
        return worst;
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace detail

/// Membership residuals of x in the given variety. Never throws on
/// well-formed tuples; an atlas is needed only for VarietyKind::manifold.
inline ResidualReport variety_residuals(const MatrixTuple& x, const VarietyTag& variety, const ChartAtlas* atlas = nullptr) {
    ResidualReport r;
    r.commutator_max = max_commutator(x);
    for (const auto& c : x)
        r.norm_excess_max = std::max(r.norm_excess_max, std::max(0.0, spectral_norm(c) - 1.0));
    const Index n = x.dim();

    switch (variety.kind) {
    case VarietyKind::cube:
        r.hermiticity_or_normality_max = max_hermiticity_defect(x);
        break;
    case VarietyKind::none:
    case VarietyKind::disk:
        r.hermiticity_or_normality_max = max_normality_defect(x);
        break;
    case VarietyKind::manifold: {
        r.hermiticity_or_normality_max = max_hermiticity_defect(x);
        if (atlas && atlas->m == x.arity())
            r.manifold_distance = detail::joint_spectrum_distance(x, atlas->distance, false);
        break;
    }
    case VarietyKind::sphere: {
        r.hermiticity_or_normality_max = max_hermiticity_defect(x);
        Matrix s = -identity(n);
        for (const auto& c : x)
            s += c * c;
        r.defining_eq_residual = spectral_norm(s);
        r.manifold_distance = detail::joint_spectrum_distance(x, [](const RealVector& p) { return std::abs(p.norm() - 1.0); }, false);
        break;
    }
    case VarietyKind::torus: {
        r.hermiticity_or_normality_max = max_normality_defect(x);
        double worst = 0.0;
        for (const auto& c : x)
            worst = std::max(worst, unitarity_defect(c));
        r.defining_eq_residual = worst;
        break;
    }
    case VarietyKind::spherical_unitary: {
        r.hermiticity_or_normality_max = max_normality_defect(x);
        Matrix s = -identity(n);
        for (const auto& c : x)
            s += c * c.adjoint();
        r.defining_eq_residual = spectral_norm(s);
        break;
    }
    }
    return r;
}

}  // namespace commpath
