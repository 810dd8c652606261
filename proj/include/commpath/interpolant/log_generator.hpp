#pragma once

#include "commpath/core/joint_diag.hpp"

#include <algorithm>
#include <numbers>

namespace commpath {

/// H = basis diag(values) basis^H with Z = exp(i pi H / 2).
struct LogGenerator {
    Matrix h;
    Matrix basis;
    RealVector values;

    /// exp(i pi t H / 2).
    Matrix rotation(double t) const {
        ComplexVector phases(values.size());
        for (Index k = 0; k < values.size(); ++k)
            phases(k) = std::polar(1.0, 0.5 * std::numbers::pi * t * values(k));
        return basis * phases.asDiagonal() * basis.adjoint();
    }
};

inline LogGenerator generator_from_spectrum(Matrix basis, RealVector values) {
    LogGenerator g;
    g.h = assemble(basis, values);
    g.basis = std::move(basis);
    g.values = std::move(values);
    return g;
}

/// Principal generator of a unitary whose eigenvalue phases lie in
/// (-pi/2, pi/2].
inline LogGenerator unitary_log_generator(const Matrix& z) {
    if (z.rows() != z.cols())
        throw DimensionError("unitary_log_generator: matrix is not square");
    if (const double u = unitarity_defect(z); u > 1e-8)
        throw PreconditionError("unitary_log_generator: matrix is not unitary", u);
    const JointSpectrum js = joint_diagonalize(MatrixTuple({z}));
    const Index n = z.rows();
    RealVector values(n);
    for (Index k = 0; k < n; ++k) {
        const double theta = std::arg(js.points(0, k));
        if (std::abs(theta) > 0.5 * std::numbers::pi * (1.0 + 1e-14))
            throw PreconditionError("unitary_log_generator: eigenvalue phase outside (-pi/2, pi/2)", std::abs(theta) - 0.5 * std::numbers::pi);
        values(k) = std::clamp(2.0 * theta / std::numbers::pi, -1.0, 1.0);
    }
    return generator_from_spectrum(js.basis, values);
}

}  // namespace commpath
