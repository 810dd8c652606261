#pragma once

#include "commpath/cli/instances.hpp"
#include "commpath/cli/io.hpp"
#include "commpath/cli/trace.hpp"
#include "commpath/paths/connect.hpp"
#include "commpath/verify/certificate.hpp"

namespace commpath {

enum ExitCode : int { exit_pass = 0, exit_fail = 1, exit_usage = 2 };

inline InstanceFile cmd_gen(const std::string& variety, Index n, Index m, std::uint64_t seed) {
    const VarietyTag tag = parse_variety(variety);
    InstanceFile f;
    f.seed = seed;
    f.tuples.push_back(random_instance(tag, n, m, seed));
    f.metadata = Json{{"command", "gen"}, {"n", n}, {"m", f.tuples.front().arity()}};
    const ResidualReport r = variety_residuals(f.tuples.front(), tag, nullptr);
    f.metadata["commutator_max"] = r.commutator_max;
    return f;
}

inline InstanceFile cmd_perturb(const InstanceFile& in, double delta, std::uint64_t seed) {
    if (in.tuples.empty())
        throw SchemaError("perturb: instance holds no tuple");
    const PerturbedPair pr = perturb(in.tuples.front(), delta, seed);
    InstanceFile f;
    f.seed = seed;
    f.tuples = {pr.x, pr.y};
    f.metadata = Json{{"command", "perturb"}, {"delta", delta}, {"eth", pr.eth}, {"source_seed", in.seed}};
    return f;
}

struct ConnectResult {
    std::optional<MatrixPath> path;
    std::optional<PathCertificate> certificate;
    Json report;  // certificate or machine-readable failure reason
    int exit_code = exit_fail;
};

inline ConnectResult cmd_connect(const InstanceFile& in, double epsilon, const Tolerances& tol = {}) {
    if (in.tuples.size() != 2)
        throw SchemaError("connect: instance must hold a pair");
    ConnectResult r;
    try {
        r.path = connect(in.tuples[0], in.tuples[1], epsilon);
    } catch (const BudgetInfeasible& e) {
        r.report = Json{{"verdict", "fail"},
                        {"failing_check", "budget_infeasible"},
                        {"reason", e.what()},
                        {"achieved", {{"delta", e.achieved().delta}, {"nu", e.achieved().nu}}},
                        {"defect", e.defect()},
                        {"defect_limit", e.defect_limit()}};
        return r;
    }
    r.certificate = certify_path(*r.path, tol);
    r.report = to_json(*r.certificate);
    r.exit_code = r.certificate->pass ? exit_pass : exit_fail;
    return r;
}

inline std::string cmd_trace(const MatrixPath& path, int samples, const std::string& format) {
    const LinkTrace tr = trace_path(path, samples);
    if (format == "csv")
        return trace_to_csv(tr);
    if (format == "json")
        return trace_to_json(tr).dump() + "\n";
    throw InvalidArgument("unknown trace format '" + format + "'");
}

inline std::pair<PathCertificate, int> cmd_verify(const MatrixPath& path, const Tolerances& tol = {}) {
    PathCertificate c = certify_path(path, tol);
    const int code = c.pass ? exit_pass : exit_fail;
    return {std::move(c), code};
}

}  // namespace commpath
