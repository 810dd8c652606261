#include "support.hpp"

#include <gtest/gtest.h>

using namespace commpath;
using namespace testing_support;

namespace {

// Nearest rep point by exhaustive search. Near-ties (within 1e-12) go to the
// lower point, the same side as the half-open cells (x_k - h, x_k + h].
double nearest_rep(const std::vector<double>& reps, double v) {
    double best = reps.front();
    for (double r : reps)
        if (std::abs(v - r) < std::abs(v - best) - 1e-12)
            best = r;
    return best;
}

void expect_partition_of_unity(const ProjectiveDecomposition& d, double tol) {
    const Index n = d.dim();
    Matrix sum = Matrix::Zero(n, n);
    for (Index j = 0; j < d.size(); ++j) {
        const Matrix p = d.projector(j);
        EXPECT_LE(max_abs(p - p.adjoint()), tol);
        EXPECT_LE(spectral_norm(p * p - p), tol);
        EXPECT_GT(spectral_norm(p), 0.5);
        for (Index k = j + 1; k < d.size(); ++k)
            EXPECT_LE(spectral_norm(p * d.projector(k)), tol);
        sum += p;
    }
    EXPECT_LE(spectral_norm(sum - identity(n)), tol);
}

}  // namespace

TEST(Grid, HalfSpacing) {
    const DeltaGrid g = build_grids(0.5);
    EXPECT_EQ(g.count, 3);
    EXPECT_EQ(g.rep_points, (std::vector<double>{-1.0, 0.0, 1.0}));
    EXPECT_EQ(g.support_points, (std::vector<double>{-1.5, -0.5, 0.5, 1.5}));
}

TEST(Grid, UnitSpacing) {
    const DeltaGrid g = build_grids(1.0);
    EXPECT_EQ(g.rep_points, (std::vector<double>{-1.0, 1.0}));
    EXPECT_EQ(g.support_points, (std::vector<double>{-2.0, 0.0, 2.0}));
}

TEST(Grid, NonIntegralReciprocal) {
    const DeltaGrid g = build_grids(0.4);
    // 1/0.4 = 2.5 intervals rounds up to 3, half-spacing 1/3.
    EXPECT_EQ(g.count, 4);
    EXPECT_LE(g.spacing, 0.4);
    EXPECT_DOUBLE_EQ(g.rep_points.front(), -1.0);
    EXPECT_DOUBLE_EQ(g.rep_points.back(), 1.0);
}

TEST(Grid, DensityAndStraddling) {
    for (double delta : {1.0, 0.5, 0.4, 0.3, 0.1, 0.07, 0.02}) {
        const DeltaGrid g = build_grids(delta);
        EXPECT_LE(g.spacing, delta);
        for (std::size_t k = 0; k < g.rep_points.size(); ++k) {
            EXPECT_LT(g.support_points[k], g.rep_points[k]);
            EXPECT_GT(g.support_points[k + 1], g.rep_points[k]);
        }
        for (int s = 0; s <= 1000; ++s) {
            const double v = -1.0 + 2.0 * s / 1000.0;
            EXPECT_LE(std::abs(v - g.snap(v)), delta + 1e-15);
            EXPECT_DOUBLE_EQ(g.snap(v), nearest_rep(g.rep_points, v)) << "v=" << v << " delta=" << delta;
        }
    }
}

TEST(Grid, BoundaryGoesToLowerBin) {
    const DeltaGrid g = build_grids(0.5);
    EXPECT_EQ(g.snap(0.5), 0.0);
    EXPECT_EQ(g.snap(0.5 + 1e-13), 0.0);
    EXPECT_EQ(g.snap(0.5 + 1e-9), 1.0);
    EXPECT_EQ(g.snap(-0.5), -1.0);
}

TEST(Grid, RejectsOutOfRange) {
    EXPECT_THROW(build_grids(0.0), InvalidArgument);
    EXPECT_THROW(build_grids(1.5), InvalidArgument);
    EXPECT_THROW(build_grids(-0.1), InvalidArgument);
}

TEST(Cpma, ZeroMatrix) {
    const CpmaResult r = cpma_1d(Matrix::Zero(3, 3), 0.3);
    EXPECT_EQ(max_abs(r.xtilde[0]), 0.0);
}

TEST(Cpma, DiagonalExample) {
    const CpmaResult r = cpma_1d(diag({0.24, -0.74}), 0.5);
    EXPECT_EQ(max_abs(r.xtilde[0] - diag({0.0, -1.0})), 0.0);
    EXPECT_NEAR(spectral_norm(diag({0.24, -0.74}) - r.xtilde[0]), 0.26, 1e-15);
}

TEST(Cpma, DiagonalPairExample) {
    const MatrixTuple x({diag({0.24, -0.74}), diag({0.9, 0.9})});
    const CpmaResult r = cpma_md(x, 0.5);
    EXPECT_EQ(max_abs(r.xtilde[0] - diag({0.0, -1.0})), 0.0);
    EXPECT_EQ(max_abs(r.xtilde[1] - diag({1.0, 1.0})), 0.0);
    EXPECT_EQ(r.decomp.size(), 2);
    // Lexicographic label order.
    EXPECT_EQ(r.decomp.labels[0](0), -1.0);
    EXPECT_EQ(r.decomp.labels[1](0), 0.0);
}

TEST(Cpma, ArityOneMatchesOneDimensional) {
    std::mt19937_64 rng(21);
    const MatrixTuple x = random_cube_tuple(12, 1, rng);
    const CpmaResult a = cpma_1d(x[0], 0.1);
    const CpmaResult b = cpma_md(x, 0.1);
    EXPECT_TRUE(a.xtilde.same_entries(b.xtilde));
}

TEST(Cpma, RandomHermitianContraction) {
    std::mt19937_64 rng(22);
    Matrix a = random_hermitian(32, rng);
    a /= spectral_norm(a);
    const CpmaResult r = cpma_1d(a, 0.1);
    EXPECT_LE(spectral_norm(commutator(a, r.xtilde[0])), 1e-10);
    EXPECT_LE(spectral_norm(a - r.xtilde[0]), 0.1);
    const ComplexVector sx = normal_spectrum(a);
    const ComplexVector st = normal_spectrum(r.xtilde[0]);
    EXPECT_LE(hausdorff_distance(sx, st), 0.1);
    const DeltaGrid g = build_grids(0.1);
    for (Index k = 0; k < st.size(); ++k)
        EXPECT_NEAR(st(k).real(), nearest_rep(g.rep_points, st(k).real()), 1e-12);
    expect_partition_of_unity(r.decomp, 1e-10);
}

TEST(Cpma, ConjugatedDiagonalTuplesMatchTransportedOracle) {
    std::mt19937_64 rng(23);
    const Index n = 16, m = 3;
    const double delta = 0.1;
    const Matrix q = random_unitary(n, rng);
    const DeltaGrid g = build_grids(delta);
    std::vector<Matrix> comps, oracle;
    for (Index j = 0; j < m; ++j) {
        const RealVector v = uniform_vector(n, -1, 1, rng);
        RealVector s(n);
        for (Index k = 0; k < n; ++k)
            s(k) = nearest_rep(g.rep_points, v(k));
        comps.push_back(assemble(q, v));
        oracle.push_back(assemble(q, s));
    }
    const MatrixTuple x(comps);
    const CpmaResult r = cpma_md(x, delta);
    EXPECT_LE(metric_eth(r.xtilde, MatrixTuple(oracle)), 1e-10);
    for (Index j = 0; j < m; ++j) {
        EXPECT_LE(spectral_norm(x[j] - r.xtilde[j]), delta);
        for (Index k = 0; k < m; ++k) {
            EXPECT_LE(spectral_norm(commutator(r.xtilde[j], x[k])), 1e-10);
            EXPECT_LE(spectral_norm(commutator(r.xtilde[j], r.xtilde[k])), 1e-10);
        }
    }
    expect_partition_of_unity(r.decomp, 1e-10);
    for (Index j = 0; j < r.decomp.size(); ++j) {
        Matrix rebuilt = Matrix::Zero(n, n);
        for (Index k = 0; k < r.decomp.size(); ++k)
            rebuilt += r.decomp.labels[static_cast<std::size_t>(k)](j % m) * r.decomp.projector(k);
        EXPECT_LE(spectral_norm(rebuilt - r.xtilde[j % m]), 1e-10);
    }
}

TEST(Cpma, DiagonalInputsEqualSnappingOracleExactly) {
    std::mt19937_64 rng(24);
    for (double delta : {0.5, 0.1, 0.02}) {
        const DeltaGrid g = build_grids(delta);
        for (Index m : {1, 2, 3}) {
            std::vector<Matrix> comps, oracle;
            for (Index j = 0; j < m; ++j) {
                const RealVector v = uniform_vector(9, -1, 1, rng);
                ComplexVector s(9);
                for (Index k = 0; k < 9; ++k)
                    s(k) = nearest_rep(g.rep_points, v(k));
                comps.push_back(v.cast<Complex>().asDiagonal());
                oracle.push_back(s.asDiagonal());
            }
            const CpmaResult r = cpma_md(MatrixTuple(comps), delta);
            EXPECT_TRUE(r.xtilde.same_entries(MatrixTuple(oracle)));
        }
    }
}

TEST(Cpma, MonotoneRefinementAcrossSizes) {
    std::mt19937_64 rng(25);
    for (Index n : {2, 8, 32, 128}) {
        const MatrixTuple x = random_cube_tuple(n, 2, rng);
        double previous = 2.0;
        for (double delta : {0.5, 0.25, 0.1}) {
            const CpmaResult r = cpma_md(x, delta);
            const double err = metric_eth(x, r.xtilde);
            EXPECT_LE(err, delta);
            EXPECT_LE(delta, previous);
            previous = delta;
        }
    }
}

TEST(Cpma, RejectsBadInputs) {
    std::mt19937_64 rng(26);
    EXPECT_THROW(cpma_1d(diag({1.5, 0.0}), 0.1), PreconditionError);
    EXPECT_THROW(cpma_1d(diag({Complex(0.0, 0.5), 0.0}), 0.1), PreconditionError);
    EXPECT_THROW(cpma_md(MatrixTuple({random_hermitian(4, rng), random_hermitian(4, rng)}), 0.1), PreconditionError);
}
