#pragma once

#include "commpath/core/morphism.hpp"
#include "commpath/interpolant/correction.hpp"
#include "commpath/interpolant/log_generator.hpp"
#include "commpath/pma/cpma.hpp"

#include <functional>

namespace commpath {

/// psi_t = Ad[exp(i pi t H / 2)] with psi_1(Xtilde) = Ad[W](Xtilde).
/// W aligns X with Y's basis, Wtilde commutes with the decomposition and
/// Z = Wtilde^H W = exp(i pi H / 2).
struct IsospectralInterpolant {
    Matrix w;
    Matrix wtilde;
    Matrix z;
    MatrixTuple xtilde;
    MatrixTuple ytilde;  // Ad[W](Xtilde), diagonal in Y's basis
    MatrixTuple psi_x;   // Ad[W](X)
    LogGenerator generator;
    ProjectiveDecomposition decomp;
    Budgets budgets;
    std::vector<double> defects;
    double defect = 0.0;
    double defect_limit = 0.0;
    double correction_bound = 0.0;

    const Matrix& h() const { return generator.h; }

    MatrixTuple psi(double t, const MatrixTuple& a) const {
        if (t == 0.0)
            return a;
        const Matrix u = generator.rotation(t);
        std::vector<Matrix> out;
        out.reserve(static_cast<std::size_t>(a.arity()));
        for (const auto& c : a)
            out.push_back(u * c * u.adjoint());
        return MatrixTuple(std::move(out), a.variety());
    }
};

namespace detail {

struct RotationCore {
    AlmostUnitCorrection correction;
    Matrix z;
    LogGenerator generator;
};

// Shared tail of the cube and manifold constructions: correct W^H against
// the decomposition (defined in Y's basis) and take the principal generator.
inline RotationCore rotation_core(const Matrix& w, const ProjectiveDecomposition& decomp, const Budgets& partial) {
    RotationCore core;
    try {
        core.correction = almost_commuting_unitary_correction(w.adjoint(), decomp);
    } catch (const PreconditionError& e) {
        const double limit = 1.0 / (std::numbers::sqrt2 * static_cast<double>(decomp.size()));
        throw BudgetInfeasible("projector defect exceeds the correction limit; shrink delta", partial, e.residual(), limit);
    }
    core.z = core.correction.wtilde * w;
    core.generator = unitary_log_generator(core.z);
    return core;
}

inline void require_cube_input(const MatrixTuple& x, const char* what) {
    const double scale = std::max(1.0, max_norm(x));
    if (const double h = max_hermiticity_defect(x); h > 1e-8 * scale)
        throw PreconditionError(std::string(what) + ": component is not hermitian", h);
    for (const auto& c : x)
        if (const double e = spectral_norm(c) - 1.0; e > 1e-8)
            throw PreconditionError(std::string(what) + ": component is not a contraction", e);
}

}  // namespace detail

/// Interpolant from a precomputed conjugation morphism. delta is the CPMA
/// grid budget and nu the rotation budget; the achieved values are
///   delta_a = d(X, Xtilde),
///   nu_a    = max(2 ||1 - Z||, d(Psi(X), Y) + d(X, Y)),
/// and nu_a < nu is required. `adjust_labels` may move the snapped joint
/// spectral points (m x n) before Xtilde and Ytilde are assembled.
inline IsospectralInterpolant build_interpolant_from(const ConjugationMorphism& cm, const MatrixTuple& x, const MatrixTuple& y, double delta, double nu, const std::function<void(Matrix&)>& adjust_labels = {}) {
    if (!(nu > 0.0))
        throw InvalidArgument("build_interpolant: nu must be positive");
    const CpmaResult cp = cpma_from_spectrum(cm.y_spectrum.basis, cm.psi_points, delta);
    Matrix labels = cp.grid_points;
    if (adjust_labels)
        adjust_labels(labels);

    IsospectralInterpolant itp;
    itp.w = cm.w;
    itp.psi_x = cm.psi_x;
    itp.ytilde = adjust_labels ? assemble_tuple(cm.y_spectrum.basis, labels, {VarietyKind::cube, {}}) : cp.xtilde;
    itp.xtilde = assemble_tuple(cm.w.adjoint() * cm.y_spectrum.basis, labels, {VarietyKind::cube, {}});
    itp.decomp = cp.decomp;

    const double eth_xy = metric_eth(x, y);
    Budgets partial{metric_eth(x, itp.xtilde), cm.eth_psi_y + eth_xy};
    const detail::RotationCore core = detail::rotation_core(cm.w, itp.decomp, partial);
    itp.wtilde = core.correction.z;
    itp.z = core.z;
    itp.generator = core.generator;
    itp.defects = core.correction.defects;
    itp.defect = core.correction.defect;
    itp.defect_limit = core.correction.defect_limit;
    itp.correction_bound = core.correction.bound;

    itp.budgets.delta = partial.delta;
    itp.budgets.nu = std::max(2.0 * spectral_norm(identity(x.dim()) - itp.z), partial.nu);
    if (itp.budgets.nu >= nu)
        throw BudgetInfeasible("achieved nu exceeds the requested budget", itp.budgets, itp.defect, itp.defect_limit);
    return itp;
}

inline IsospectralInterpolant build_interpolant(const MatrixTuple& x, const MatrixTuple& y, double delta, double nu, const JointDiagOptions& opt = {}) {
    require_same_shape(x, y);
    detail::require_cube_input(x, "build_interpolant");
    detail::require_cube_input(y, "build_interpolant");
    return build_interpolant_from(conjugation_morphism(x, y, opt), x, y, delta, nu);
}

}  // namespace commpath
