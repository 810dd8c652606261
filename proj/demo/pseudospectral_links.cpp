#include "commpath/commpath.hpp"

#include <cstdio>

using namespace commpath;

// Normal contractions in M_10: spectrum on the circle of radius 3/5 joined to
// a unitary with the same angles. Writes the eigenvalue trajectories as CSV.
int main(int argc, char** argv) {
    const Index n = 10;
    ComplexVector inner(n), outer(n);
    for (Index k = 0; k < n; ++k) {
        const double theta = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.25) / static_cast<double>(n);
        inner(k) = std::polar(0.6, theta);
        outer(k) = std::polar(1.0, theta);
    }
    std::mt19937_64 rng(808);
    const Matrix q = haar_unitary(n, rng);
    const VarietyTag disk{VarietyKind::disk, {}};
    const MatrixTuple x({Matrix(q * inner.asDiagonal() * q.adjoint())}, disk);
    const MatrixTuple y({Matrix(q * outer.asDiagonal() * q.adjoint())}, disk);

    const MatrixPath path = connect(x, y, 4.0);
    write_text(argc > 1 ? argv[1] : "-", trace_to_csv(trace_path(path, 65)));
    std::fprintf(stderr, "%zu segments, reported epsilon %.4g\n", path.segments.size(), path.epsilon);
    return 0;
}
