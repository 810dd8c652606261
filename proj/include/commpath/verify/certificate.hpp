#pragma once

#include "commpath/interpolant/interpolant.hpp"
#include "commpath/manifold/residuals.hpp"
#include "commpath/paths/path.hpp"

#include "json.hpp"

#include <cstdlib>
#include <limits>
#include <optional>
#include <thread>

namespace commpath {

struct Tolerances {
    double algebraic = 1e-10;    // identities that hold exactly in exact arithmetic
    double transported = 1e-8;   // identities after one conjugation / diagonalization
    double manifold = 1e-6;      // defining equations and manifold distance along paths
    double junction = 1e-12;
    int samples = 33;
};

/// Chebyshev-Lobatto points on [0,1], endpoints exact.
inline std::vector<double> sample_schedule(int count) {
    if (count < 2)
        throw InvalidArgument("sample schedule needs at least 2 points");
    std::vector<double> ts(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        ts[static_cast<std::size_t>(i)] = 0.5 * (1.0 - std::cos(std::numbers::pi * i / (count - 1)));
    ts.front() = 0.0;
    ts.back() = 1.0;
    return ts;
}

/// Worker count from COMMPATH_THREADS, else the hardware concurrency.
inline unsigned worker_count(std::size_t jobs) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("COMMPATH_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1)
            n = static_cast<unsigned>(v);
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

/// Runs f(i) for i in [0, count), results written by index.
template <class F>
void parallel_for(std::size_t count, F&& f) {
    const unsigned workers = worker_count(count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers)
                    f(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

struct PathCertificate {
    std::vector<double> sample_ts;
    std::vector<double> eth_to_base;
    std::vector<double> commutator_max;
    std::vector<double> hermiticity_or_normality_max;
    std::vector<double> norm_excess_max;
    std::vector<std::optional<double>> manifold_distance;
    std::vector<std::optional<double>> defining_eq_residual;
    bool endpoints_exact = false;
    double junction_gap = 0.0;
    double epsilon_reported = 0.0;
    Budgets budgets;
    std::string variety;
    bool pass = false;
    std::string failing_check;  // empty on pass

    double max_eth() const { return eth_to_base.empty() ? 0.0 : *std::max_element(eth_to_base.begin(), eth_to_base.end()); }
};

namespace detail {

inline double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

// Largest value, or +inf when any sample has no value.
inline double max_of(const std::vector<std::optional<double>>& v) {
    double m = 0.0;
    for (const auto& x : v)
        m = std::max(m, x.value_or(std::numeric_limits<double>::infinity()));
    return m;
}

inline bool has_any(const std::vector<std::optional<double>>& v) {
    return std::any_of(v.begin(), v.end(), [](const auto& x) { return x.has_value(); });
}

inline std::unique_ptr<ChartAtlas> path_atlas(const MatrixPath& p) {
    if (p.variety.kind == VarietyKind::manifold)
        return std::make_unique<ChartAtlas>(builtin_atlas(p.variety.atlas_id));
    return nullptr;
}

}  // namespace detail

/// Samples the path and checks, in order: endpoints, junctions, commutators,
/// hermiticity or normality, norms, defining equation, manifold distance,
/// ball containment and the epsilon = 2(nu + delta) budget.
inline PathCertificate certify_path(const MatrixPath& path, const Tolerances& tol = {}) {
    PathCertificate c;
    c.variety = to_string(path.variety);
    c.epsilon_reported = path.epsilon;
    c.budgets = path.budgets;
    c.sample_ts = sample_schedule(tol.samples);
    const std::size_t count = c.sample_ts.size();
    c.eth_to_base.resize(count);
    c.commutator_max.resize(count);
    c.hermiticity_or_normality_max.resize(count);
    c.norm_excess_max.resize(count);
    c.manifold_distance.resize(count);
    c.defining_eq_residual.resize(count);

    const auto atlas = detail::path_atlas(path);
    parallel_for(count, [&](std::size_t i) {
        const MatrixTuple g = path.eval(c.sample_ts[i]);
        const ResidualReport r = variety_residuals(g, path.variety, atlas.get());
        c.eth_to_base[i] = metric_eth(g, path.base());
        c.commutator_max[i] = r.commutator_max;
        c.hermiticity_or_normality_max[i] = r.hermiticity_or_normality_max;
        c.norm_excess_max[i] = r.norm_excess_max;
        c.manifold_distance[i] = r.manifold_distance;
        c.defining_eq_residual[i] = r.defining_eq_residual;
    });

    const MatrixTuple first = push_down(path.segments.front().segment.start(), path.lift, path.variety);
    const MatrixTuple last = push_down(path.segments.back().segment.end(), path.lift, path.variety);
    c.endpoints_exact = path.eval(0.0).same_entries(path.start) && path.eval(1.0).same_entries(path.end) && metric_eth(first, path.start) <= tol.algebraic && metric_eth(last, path.end) <= tol.algebraic;
    c.junction_gap = junction_gap(path);

    const double max_eth = c.max_eth();
    const bool contained = max_eth < c.epsilon_reported || (max_eth == 0.0 && c.epsilon_reported == 0.0);
    const double budget = 2.0 * (c.budgets.nu + c.budgets.delta);
    const std::vector<std::pair<const char*, bool>> checks{
        {"endpoints", c.endpoints_exact},
        {"junctions", c.junction_gap <= tol.junction},
        {"commutator", detail::max_of(c.commutator_max) <= tol.transported},
        {"hermiticity_or_normality", detail::max_of(c.hermiticity_or_normality_max) <= tol.transported},
        {"norm", detail::max_of(c.norm_excess_max) <= tol.transported},
        {"defining_equation", !detail::has_any(c.defining_eq_residual) || detail::max_of(c.defining_eq_residual) <= tol.manifold},
        {"manifold_distance", (path.variety.kind != VarietyKind::manifold && path.variety.kind != VarietyKind::sphere) || detail::max_of(c.manifold_distance) <= tol.manifold},
        {"ball_containment", contained},
        {"budget", c.epsilon_reported <= budget * (1.0 + 1e-12)},
    };
    c.pass = true;
    for (const auto& [name, ok] : checks)
        if (!ok) {
            c.pass = false;
            c.failing_check = name;
            break;
        }
    return c;
}

struct InterpolantCertificate {
    std::vector<double> sample_ts;
    bool psi0_exact = false;
    double psi1_residual = 0.0;            // ||psi_1(Xtilde) - Psi(Xtilde)||
    std::vector<double> commutator_max;    // of psi_t(Xtilde)
    std::vector<double> eth_to_xtilde;     // d(psi_t(Xtilde), Xtilde)
    std::vector<double> spectral_drift;    // d_H(joint spectrum of psi_t(Xtilde), of Xtilde)
    double nu_reported = 0.0;
    bool pass = false;
    std::string failing_check;
};

/// The five interpolant conditions at sampled t: psi_0 = id, psi_1 = Psi on
/// Xtilde, commuting images, the nu-ball and an unchanged joint spectrum.
inline InterpolantCertificate certify_interpolant(const IsospectralInterpolant& itp, const MatrixTuple& x, const Tolerances& tol = {}) {
    InterpolantCertificate c;
    require_same_shape(itp.xtilde, x);
    c.sample_ts = sample_schedule(tol.samples);
    c.nu_reported = itp.budgets.nu;
    const std::size_t count = c.sample_ts.size();
    c.commutator_max.resize(count);
    c.eth_to_xtilde.resize(count);
    c.spectral_drift.resize(count);

    c.psi0_exact = itp.psi(0.0, itp.xtilde).same_entries(itp.xtilde);
    c.psi1_residual = metric_eth(itp.psi(1.0, itp.xtilde), conjugate(itp.w, itp.xtilde));

    JointDiagOptions loose;
    loose.tol = tol.transported;
    const Matrix base = joint_diagonalize(itp.xtilde, loose).points;
    parallel_for(count, [&](std::size_t i) {
        const MatrixTuple p = itp.psi(c.sample_ts[i], itp.xtilde);
        c.commutator_max[i] = max_commutator(p);
        c.eth_to_xtilde[i] = metric_eth(p, itp.xtilde);
        try {
            c.spectral_drift[i] = hausdorff_distance(joint_diagonalize(p, loose).points, base);
        } catch (const Error&) {
            c.spectral_drift[i] = std::numeric_limits<double>::infinity();
        }
    });

    const double max_eth = detail::max_of(c.eth_to_xtilde);
    const std::vector<std::pair<const char*, bool>> checks{
        {"psi0_identity", c.psi0_exact},
        {"psi1_matches_psi", c.psi1_residual <= tol.transported},
        {"commutator", detail::max_of(c.commutator_max) <= tol.transported},
        {"nu_ball", max_eth < c.nu_reported || (max_eth == 0.0 && c.nu_reported == 0.0)},
        {"spectral_invariance", detail::max_of(c.spectral_drift) <= 1e-9},
    };
    c.pass = true;
    for (const auto& [name, ok] : checks)
        if (!ok) {
            c.pass = false;
            c.failing_check = name;
            break;
        }
    return c;
}

namespace detail {

inline nlohmann::json optional_array(const std::vector<std::optional<double>>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : v)
        a.push_back(x ? nlohmann::json(*x) : nlohmann::json(nullptr));
    return a;
}

}  // namespace detail

inline nlohmann::json to_json(const PathCertificate& c) {
    return nlohmann::json{
        {"kind", "path-certificate"},
        {"variety", c.variety},
        {"verdict", c.pass ? "pass" : "fail"},
        {"failing_check", c.pass ? nlohmann::json(nullptr) : nlohmann::json(c.failing_check)},
        {"epsilon_reported", c.epsilon_reported},
        {"budgets", {{"delta", c.budgets.delta}, {"nu", c.budgets.nu}}},
        {"endpoints_exact", c.endpoints_exact},
        {"junction_gap", c.junction_gap},
        {"max_eth_to_base", c.max_eth()},
        {"sample_ts", c.sample_ts},
        {"eth_to_base", c.eth_to_base},
        {"commutator_max", c.commutator_max},
        {"hermiticity_or_normality_max", c.hermiticity_or_normality_max},
        {"norm_excess_max", c.norm_excess_max},
        {"manifold_distance", detail::optional_array(c.manifold_distance)},
        {"defining_eq_residual", detail::optional_array(c.defining_eq_residual)},
    };
}

inline nlohmann::json to_json(const InterpolantCertificate& c) {
    return nlohmann::json{
        {"kind", "interpolant-certificate"},
        {"verdict", c.pass ? "pass" : "fail"},
        {"failing_check", c.pass ? nlohmann::json(nullptr) : nlohmann::json(c.failing_check)},
        {"nu_reported", c.nu_reported},
        {"psi0_exact", c.psi0_exact},
        {"psi1_residual", c.psi1_residual},
        {"sample_ts", c.sample_ts},
        {"commutator_max", c.commutator_max},
        {"eth_to_xtilde", c.eth_to_xtilde},
        {"spectral_drift", c.spectral_drift},
    };
}

}  // namespace commpath
