#include "commpath/commpath.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace commpath;

namespace {

constexpr double kHausdorffSlack = 1e-10;
constexpr double kAlgebraic = 1e-10;
constexpr double kTransported = 1e-8;
constexpr double kDrift = 1e-9;
constexpr double kManifold = 1e-6;
constexpr double kTraceEndpoint = 1e-8;
constexpr double kEpsTarget = 0.5;

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double time_limit;  // seconds
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double opnorm(const Matrix& a) { return Eigen::JacobiSVD<Matrix>(a).singularValues()(0); }

Matrix normal_matrix(const Matrix& u, const ComplexVector& z) { return u * z.asDiagonal() * u.adjoint(); }

ComplexVector disk_points(Index n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> r(0.0, 1.0), a(-std::numbers::pi, std::numbers::pi);
    ComplexVector z(n);
    for (Index k = 0; k < n; ++k)
        z(k) = std::polar(std::sqrt(r(rng)), a(rng));
    return z;
}

Matrix small_rotation(Index n, double eta, std::mt19937_64& rng) {
    Matrix k = hermitian_part(haar_unitary(n, rng));
    k /= opnorm(k);
    Eigen::SelfAdjointEigenSolver<Matrix> es(k);
    ComplexVector ph(n);
    for (Index i = 0; i < n; ++i)
        ph(i) = std::polar(1.0, eta * es.eigenvalues()(i));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

Outcome hausdorff_inequality() {
    Outcome o;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> scale(0.0, 0.3);
    int pairs = 0;
    double worst = -1.0;
    for (int i = 0; i < 500; ++i) {
        const Index n = std::array<Index, 3>{2, 8, 32}[static_cast<std::size_t>(i % 3)];
        const Matrix u = haar_unitary(n, rng);
        const ComplexVector z = disk_points(n, rng);
        Matrix v;
        ComplexVector w;
        if (i % 2 == 0) {
            v = haar_unitary(n, rng);
            w = disk_points(n, rng);
        } else {
            const double s = scale(rng);
            v = small_rotation(n, s, rng) * u;
            w = z + s * disk_points(n, rng);
        }
        const Matrix a = normal_matrix(u, z), b = normal_matrix(v, w);
        const ComplexVector sa = Eigen::ComplexEigenSolver<Matrix>(a, false).eigenvalues();
        const ComplexVector sb = Eigen::ComplexEigenSolver<Matrix>(b, false).eigenvalues();
        const double dh = hausdorff_distance(sa, sb);
        const double gap = dh - opnorm(a - b);
        worst = std::max(worst, gap);
        if (gap > kHausdorffSlack)
            o.pass = false;
        ++pairs;
    }
    o.detail = fmt("%d pairs, max d_H - ||A-B|| = %.3e", pairs, worst);
    return o;
}

// Rep points -1 + 2kh with h = 1/ceil(1/delta), nearest with ties downward.
double snap_oracle(double v, double delta) {
    const long intervals = std::lround(std::ceil(1.0 / delta - 1e-9));
    const double h = 1.0 / static_cast<double>(intervals);
    double best = -1.0;
    for (long k = 0; k <= intervals; ++k) {
        const double r = k == intervals ? 1.0 : -1.0 + 2.0 * static_cast<double>(k) * h;
        if (std::abs(v - r) < std::abs(v - best) - 1e-12)
            best = r;
    }
    return best;
}

std::string cpma_suite_output(Outcome* o) {
    std::ostringstream log;
    double worst_move = 0.0, worst_comm = 0.0, worst_dh = 0.0, worst_pou = 0.0;
    int runs = 0, oracle_checks = 0;
    for (double delta : {0.5, 0.1, 0.02})
        for (Index n : {2, 8, 32, 128})
            for (Index m : {1, 2, 3}) {
                const std::uint64_t seed = 1000 + 100 * static_cast<std::uint64_t>(n) + 10 * static_cast<std::uint64_t>(m) + static_cast<std::uint64_t>(delta * 100);
                const MatrixTuple x = random_instance({VarietyKind::cube, {}}, n, m, seed);
                const CpmaResult r = cpma_md(x, delta);
                ++runs;
                Matrix pou = Matrix::Zero(n, n);
                for (Index j = 0; j < r.decomp.size(); ++j)
                    pou += r.decomp.projector(j);
                worst_pou = std::max(worst_pou, opnorm(pou - identity(n)));
                worst_comm = std::max(worst_comm, max_commutator(r.xtilde));
                for (Index j = 0; j < m; ++j) {
                    const double move = opnorm(x[j] - r.xtilde[j]);
                    worst_move = std::max(worst_move, move - delta);
                    const ComplexVector sx = Eigen::ComplexEigenSolver<Matrix>(x[j], false).eigenvalues();
                    const ComplexVector st = Eigen::ComplexEigenSolver<Matrix>(r.xtilde[j], false).eigenvalues();
                    worst_dh = std::max(worst_dh, hausdorff_distance(sx, st) - delta);
                }
                log << tuple_to_json(r.xtilde).dump() << '\n';

                std::mt19937_64 rng(seed);
                std::uniform_real_distribution<double> u(-1.0, 1.0);
                std::vector<Matrix> diag_in, diag_oracle;
                for (Index j = 0; j < m; ++j) {
                    ComplexVector v(n), s(n);
                    for (Index k = 0; k < n; ++k) {
                        v(k) = u(rng);
                        s(k) = snap_oracle(v(k).real(), delta);
                    }
                    diag_in.push_back(v.asDiagonal());
                    diag_oracle.push_back(s.asDiagonal());
                }
                if (!cpma_md(MatrixTuple(diag_in), delta).xtilde.same_entries(MatrixTuple(diag_oracle)))
                    o->pass = false;
                ++oracle_checks;
            }
    // one ulp of slack for eigenvalues sitting on a support point
    if (worst_move > 1e-15 || worst_dh > 1e-12 || worst_comm > kAlgebraic || worst_pou > kAlgebraic)
        o->pass = false;
    o->detail = fmt("%d runs, max(||X-X~||-delta) = %.2e, max(d_H-delta) = %.2e, commutator %.2e, partition %.2e, %d diagonal oracle matches", runs, worst_move, worst_dh, worst_comm, worst_pou, oracle_checks);
    return log.str();
}

Outcome cpma_suite() {
    Outcome o;
    cpma_suite_output(&o);
    return o;
}

ProjectiveDecomposition random_decomposition(Index n, Index parts, std::mt19937_64& rng) {
    ProjectiveDecomposition d;
    d.basis = haar_unitary(n, rng);
    d.groups.resize(static_cast<std::size_t>(parts));
    for (Index c = 0; c < n; ++c)
        d.groups[static_cast<std::size_t>(c % parts)].push_back(c);
    d.labels.assign(static_cast<std::size_t>(parts), RealVector::Zero(1));
    d.arity = 1;
    return d;
}

Outcome almost_unit() {
    Outcome o;
    std::mt19937_64 rng(303);
    double worst_comm = 0.0, worst_slack = -1.0;
    int families = 0;
    for (Index n : {2, 4, 8, 16, 32})
        for (Index parts : {Index{1}, Index{2}, std::min<Index>(n, 4)})
            for (double eta : {1e-4, 1e-3, 1e-2}) {
                const ProjectiveDecomposition d = random_decomposition(n, parts, rng);
                const Matrix w = small_rotation(n, eta, rng);
                double defect = 0.0;
                for (Index j = 0; j < d.size(); ++j) {
                    const Matrix p = d.projector(j);
                    defect = std::max(defect, opnorm(w * p * w.adjoint() - p));
                }
                if (defect >= 1.0 / (std::numbers::sqrt2 * static_cast<double>(parts)))
                    continue;
                const AlmostUnitCorrection c = almost_commuting_unitary_correction(w, d);
                for (Index j = 0; j < d.size(); ++j) {
                    const Matrix p = d.projector(j);
                    worst_comm = std::max(worst_comm, opnorm(c.z * p - p * c.z));
                }
                const double dist = opnorm(identity(n) - w * c.z);
                worst_slack = std::max(worst_slack, dist - std::numbers::sqrt2 * static_cast<double>(parts) * defect);
                ++families;
            }
    // 2x2: W = exp(i eps sigma_x) against the coordinate projectors; the
    // diagonal blocks are cos(eps) > 0, so the correction is the identity
    // and the defect is sin(eps).
    double closed_form = 0.0;
    for (double eps : {1e-3, 0.05, 0.2}) {
        Matrix w(2, 2);
        w << std::cos(eps), Complex(0, std::sin(eps)), Complex(0, std::sin(eps)), std::cos(eps);
        ProjectiveDecomposition d;
        d.basis = identity(2);
        d.groups = {{0}, {1}};
        d.labels.assign(2, RealVector::Zero(1));
        d.arity = 1;
        const AlmostUnitCorrection c = almost_commuting_unitary_correction(w, d);
        closed_form = std::max({closed_form, c.z.cwiseAbs().maxCoeff() - 1.0, std::abs(c.z(0, 1)), std::abs(c.defect - std::sin(eps)), std::abs(opnorm(identity(2) - w * c.z) - 2.0 * std::sin(eps / 2.0))});
    }
    if (worst_comm > kAlgebraic || worst_slack > kAlgebraic || closed_form > 1e-14 || families < 30)
        o.pass = false;
    o.detail = fmt("%d families, max ||[Z,P]|| = %.2e, max(||1-WZ|| - sqrt2 N d) = %.2e, 2x2 oracle error %.2e", families, worst_comm, worst_slack, closed_form);
    return o;
}

std::optional<IsospectralInterpolant> interpolant_with_retries(const MatrixTuple& x, const MatrixTuple& y, double delta, double nu) {
    for (int attempt = 0; attempt <= 6; ++attempt, delta /= 2.0) {
        try {
            return build_interpolant(x, y, delta, nu);
        } catch (const BudgetInfeasible&) {
        }
    }
    return std::nullopt;
}

Outcome interpolant_suite() {
    Outcome o;
    int built = 0, failed = 0;
    double worst_psi1 = 0.0, worst_drift = 0.0, worst_ratio = 0.0;
    std::uint64_t seed = 400;
    for (Index n : {2, 8, 32})
        for (Index m : {1, 2, 3})
            for (int rep = 0; rep < 3; ++rep) {
                const MatrixTuple x = random_instance({VarietyKind::cube, {}}, n, m, ++seed);
                const PerturbedPair pr = perturb(x, 0.01, ++seed);
                const auto itp = interpolant_with_retries(pr.x, pr.y, kEpsTarget / 4.0, kEpsTarget / 4.0);
                if (!itp) {
                    ++failed;
                    continue;
                }
                ++built;
                const InterpolantCertificate c = certify_interpolant(*itp, pr.x);
                worst_psi1 = std::max(worst_psi1, c.psi1_residual);
                worst_drift = std::max(worst_drift, *std::max_element(c.spectral_drift.begin(), c.spectral_drift.end()));
                if (c.nu_reported > 0.0)
                    worst_ratio = std::max(worst_ratio, *std::max_element(c.eth_to_xtilde.begin(), c.eth_to_xtilde.end()) / c.nu_reported);
                if (!c.pass) {
                    o.pass = false;
                    o.detail += fmt("[n=%ld m=%ld fails %s] ", static_cast<long>(n), static_cast<long>(m), c.failing_check.c_str());
                }
            }
    if (failed > 0 || worst_psi1 > kTransported || worst_drift > kDrift)
        o.pass = false;
    o.detail += fmt("%d interpolants (%d infeasible), max psi_1 residual %.2e, max drift %.2e, max eth/nu %.3f", built, failed, worst_psi1, worst_drift, worst_ratio);
    return o;
}

struct ConnectStats {
    int pairs = 0;
    int infeasible = 0;
    int failed = 0;
    double max_eth_ratio = 0.0;  // max_t eth / target
    double max_residual = 0.0;
    std::string first_failure;
};

void connect_and_certify(const MatrixTuple& x, double delta, std::uint64_t seed, ConnectStats& s, std::ostringstream* log) {
    const PerturbedPair pr = perturb(x, delta, seed);
    ++s.pairs;
    MatrixPath p;
    try {
        p = connect(pr.x, pr.y, kEpsTarget);
    } catch (const BudgetInfeasible& e) {
        ++s.infeasible;
        if (s.first_failure.empty())
            s.first_failure = e.what();
        return;
    }
    const PathCertificate c = certify_path(p);
    if (log)
        *log << path_to_json(p).dump() << '\n' << to_json(c).dump() << '\n';
    s.max_eth_ratio = std::max(s.max_eth_ratio, c.max_eth() / kEpsTarget);
    for (const auto* v : {&c.commutator_max, &c.hermiticity_or_normality_max, &c.norm_excess_max})
        s.max_residual = std::max(s.max_residual, *std::max_element(v->begin(), v->end()));
    for (const auto& v : c.defining_eq_residual)
        s.max_residual = std::max(s.max_residual, v.value_or(0.0));
    if (!c.pass || !(c.epsilon_reported < kEpsTarget)) {
        ++s.failed;
        if (s.first_failure.empty())
            s.first_failure = to_string(p.variety) + " n=" + std::to_string(x.dim()) + ": " + (c.pass ? "epsilon above target" : c.failing_check);
    }
}

std::string cube_connectivity_output(Outcome* o) {
    std::ostringstream log;
    std::string per_n;
    for (Index n : {2, 8, 32, 128}) {
        ConnectStats s;
        const int count = n == 128 ? 14 : 12;  // 50 pairs in total
        for (int i = 0; i < count; ++i) {
            const Index m = 1 + i % 3;
            const std::uint64_t seed = 5000 + 1000 * static_cast<std::uint64_t>(n) + 2 * static_cast<std::uint64_t>(i);
            connect_and_certify(random_instance({VarietyKind::cube, {}}, n, m, seed), 0.01, seed + 1, s, &log);
        }
        per_n += fmt("n=%ld: %d pairs, max eth/target %.3f, residual %.1e; ", static_cast<long>(n), s.pairs, s.max_eth_ratio, s.max_residual);
        if (s.failed || s.infeasible) {
            o->pass = false;
            per_n += fmt("[%d failed, %d infeasible: %s] ", s.failed, s.infeasible, s.first_failure.c_str());
        }
    }
    o->detail = per_n;
    return log.str();
}

Outcome cube_connectivity() {
    Outcome o;
    cube_connectivity_output(&o);
    return o;
}

Outcome other_varieties() {
    Outcome o;
    const std::vector<std::pair<VarietyTag, std::vector<Index>>> cases{
        {{VarietyKind::disk, {}}, {1, 2, 3}},
        {{VarietyKind::torus, {}}, {1, 2, 3}},
        {{VarietyKind::sphere, {}}, {2, 3}},
        {{VarietyKind::spherical_unitary, {}}, {1, 2, 3}},
    };
    std::uint64_t seed = 6000;
    for (const auto& [tag, ms] : cases) {
        ConnectStats s;
        for (Index n : {2, 8, 32, 128})
            for (Index m : ms) {
                seed += 2;
                connect_and_certify(random_instance(tag, n, m, seed), 0.01, seed + 1, s, nullptr);
            }
        o.detail += fmt("%s: %d pairs, max eth/target %.3f, residual %.1e; ", to_string(tag).c_str(), s.pairs, s.max_eth_ratio, s.max_residual);
        if (s.failed || s.infeasible) {
            o.pass = false;
            o.detail += fmt("[%d failed, %d infeasible: %s] ", s.failed, s.infeasible, s.first_failure.c_str());
        }
    }
    return o;
}

Outcome scp_bound() {
    Outcome o;
    const VarietyTag su{VarietyKind::spherical_unitary, {}};
    int violations = 0, paths = 0, path_failures = 0;
    double worst_ratio = 0.0, worst_dev = 0.0;
    std::uint64_t seed = 7000;
    for (Index m : {1, 2, 3})
        for (Index n : {2, 8}) {
            seed += 3;
            const PerturbedPair far = perturb(random_instance(su, n, m, seed), 0.2, seed + 1);
            const SCPBoundReport r = scp_deviation_bound_check(make_scp_map(far.x, 1e-9), make_scp_map(far.y, 1e-9), 200, seed + 2);
            violations += r.violations;
            worst_ratio = std::max(worst_ratio, r.max_ratio);

            const PerturbedPair near = perturb(random_instance(su, n, m, seed + 50), 0.002, seed + 51);
            const SCPMap s = make_scp_map(near.x, 1e-9);
            const SCPPath path = connect_scp(s, make_scp_map(near.y, 1e-9), kEpsTarget);
            ++paths;
            std::mt19937_64 rng(seed + 52);
            std::vector<Matrix> xs;
            for (int i = 0; i < 10; ++i)
                xs.push_back(random_contraction(n, rng));
            bool ok = path.epsilon < kEpsTarget;
            for (double t : sample_schedule(33)) {
                const SCPMap st = path.at(t);
                for (const auto& x : xs) {
                    const double dev = opnorm(apply_scp(st, x) - apply_scp(s, x));
                    worst_dev = std::max(worst_dev, dev);
                    ok = ok && dev < kEpsTarget;
                }
            }
            if (!ok)
                ++path_failures;
        }
    if (violations || path_failures)
        o.pass = false;
    o.detail = fmt("1200 bound trials, %d violations, max ratio to 2m d(S,T) %.3f; %d SCP paths, %d failures, max deviation %.3e", violations, worst_ratio, paths, path_failures, worst_dev);
    return o;
}

struct FigureRun {
    std::string csv;
    Index trajectories = 0;
    double endpoint_error = 0.0;
    double max_step = 0.0;
};

FigureRun figure_run(const MatrixTuple& x, const MatrixTuple& y, double epsilon) {
    const MatrixPath p = connect(x, y, epsilon);
    const LinkTrace tr = trace_path(p, 65);
    FigureRun f;
    f.csv = trace_to_csv(tr);
    f.trajectories = tr.n;
    const Matrix sx = joint_diagonalize(x).points, sy = joint_diagonalize(y).points;
    // trajectory k must start and end at spectral points of X and Y
    for (Index k = 0; k < tr.n; ++k) {
        double d0 = std::numeric_limits<double>::infinity(), d1 = d0;
        for (Index c = 0; c < tr.n; ++c) {
            d0 = std::min(d0, (tr.points.front().col(k) - sx.col(c)).cwiseAbs().maxCoeff());
            d1 = std::min(d1, (tr.points.back().col(k) - sy.col(c)).cwiseAbs().maxCoeff());
        }
        f.endpoint_error = std::max({f.endpoint_error, d0, d1});
    }
    f.endpoint_error = std::max({f.endpoint_error, hausdorff_distance(tr.points.front(), sx), hausdorff_distance(tr.points.back(), sy)});
    for (std::size_t s = 1; s < tr.points.size(); ++s)
        f.max_step = std::max(f.max_step, (tr.points[s] - tr.points[s - 1]).cwiseAbs().maxCoeff());
    return f;
}

std::pair<MatrixTuple, MatrixTuple> disk_figure_pair() {
    const Index n = 10;
    std::mt19937_64 rng(808);
    ComplexVector inner(n), outer(n);
    for (Index k = 0; k < n; ++k) {
        const double theta = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.25) / static_cast<double>(n);
        inner(k) = std::polar(0.6, theta);
        outer(k) = std::polar(1.0, theta);
    }
    const Matrix q = small_rotation(n, 0.05, rng);
    const VarietyTag disk{VarietyKind::disk, {}};
    return {MatrixTuple({normal_matrix(q, inner)}, disk), MatrixTuple({Matrix(outer.asDiagonal())}, disk)};
}

std::string figure_output(Outcome* o) {
    const auto [dx, dy] = disk_figure_pair();
    const FigureRun disk = figure_run(dx, dy, 4.0);
    const PerturbedPair sp = perturb(random_instance({VarietyKind::sphere, {}}, 7, 3, 909), 0.01, 910);
    const FigureRun sphere = figure_run(sp.x, sp.y, kEpsTarget);
    if (disk.trajectories != 10 || sphere.trajectories != 7 || disk.endpoint_error > kTraceEndpoint || sphere.endpoint_error > kTraceEndpoint)
        o->pass = false;
    o->detail = fmt("disk n=10: %ld trajectories, endpoint error %.2e, max step %.3f; sphere n=7 m=3: %ld trajectories, endpoint error %.2e, max step %.3f", static_cast<long>(disk.trajectories), disk.endpoint_error, disk.max_step, static_cast<long>(sphere.trajectories), sphere.endpoint_error, sphere.max_step);
    return disk.csv + sphere.csv;
}

Outcome figure_structure() {
    Outcome o;
    figure_output(&o);
    return o;
}

Outcome determinism() {
    Outcome o;
    Outcome scratch;
    std::vector<std::string> first{cpma_suite_output(&scratch), cube_connectivity_output(&scratch), figure_output(&scratch)};
    setenv("COMMPATH_THREADS", "1", 1);
    std::vector<std::string> second{cpma_suite_output(&scratch), cube_connectivity_output(&scratch), figure_output(&scratch)};
    unsetenv("COMMPATH_THREADS");
    std::size_t bytes = 0;
    const char* names[] = {"cpma", "cube paths", "traces"};
    for (std::size_t i = 0; i < first.size(); ++i) {
        bytes += first[i].size();
        if (first[i] != second[i]) {
            o.pass = false;
            o.detail += std::string(names[i]) + " differ; ";
        }
    }
    o.detail += fmt("%zu bytes compared across two runs (default and single-threaded)", bytes);
    return o;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "hausdorff inequality", 10.0, hausdorff_inequality},
        {2, "cpma suite", 60.0, cpma_suite},
        {3, "almost-unit correction", 10.0, almost_unit},
        {4, "interpolant suite", 60.0, interpolant_suite},
        {5, "cube connectivity", 300.0, cube_connectivity},
        {6, "disk/torus/sphere/spherical-unitary connectivity", 300.0, other_varieties},
        {7, "scp bound", 30.0, scp_bound},
        {8, "figure structure", 10.0, figure_structure},
        {9, "determinism", 600.0, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs >= c.time_limit) {
            o.pass = false;
            o.detail += fmt(" [runtime over %.0f s]", c.time_limit);
        }
        failures += o.pass ? 0 : 1;
        std::printf("criterion %d %s: %s (%.2f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
