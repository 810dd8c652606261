#include "commpath/cli/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace commpath;

namespace {

void add_tolerances(CLI::App* cmd, Tolerances& tol) {
    cmd->add_option("--tol-algebraic", tol.algebraic, "exact identities")->capture_default_str();
    cmd->add_option("--tol-transported", tol.transported, "commutators, hermiticity, norms")->capture_default_str();
    cmd->add_option("--tol-manifold", tol.manifold, "defining equation and manifold distance")->capture_default_str();
    cmd->add_option("--samples", tol.samples, "sample count")->capture_default_str()->check(CLI::Range(2, 100000));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"commpath: local paths between nearby commuting matrix tuples"};
    app.require_subcommand(1);

    std::string variety = "cube", in, out = "-", cert_out, format = "csv";
    Index n = 8, m = 2;
    std::uint64_t seed = 1;
    double delta = 0.01, epsilon = 0.5;
    int samples = 33;
    Tolerances tol;

    auto* gen = app.add_subcommand("gen", "random tuple on a variety");
    gen->add_option("--variety", variety, "cube, disk, torus, sphere, spherical-unitary or manifold:<atlas>")->required();
    gen->add_option("--n", n)->capture_default_str();
    gen->add_option("--m", m)->capture_default_str();
    gen->add_option("--seed", seed)->capture_default_str();
    gen->add_option("--out", out)->capture_default_str();

    auto* pert = app.add_subcommand("perturb", "nearby second tuple");
    pert->add_option("--in", in)->required();
    pert->add_option("--delta", delta)->capture_default_str();
    pert->add_option("--seed", seed)->capture_default_str();
    pert->add_option("--out", out)->capture_default_str();

    auto* conn = app.add_subcommand("connect", "path between the tuples of a pair file");
    conn->add_option("--in", in)->required();
    conn->add_option("--epsilon", epsilon)->capture_default_str();
    conn->add_option("--out", out, "path file")->capture_default_str();
    conn->add_option("--certificate", cert_out, "certificate file (default: stderr)");
    add_tolerances(conn, tol);

    auto* trace = app.add_subcommand("trace", "joint spectra along a path");
    trace->add_option("--in", in)->required();
    trace->add_option("--samples", samples)->capture_default_str()->check(CLI::Range(2, 100000));
    trace->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    trace->add_option("--out", out)->capture_default_str();

    auto* verify = app.add_subcommand("verify", "certify a path file");
    verify->add_option("--in", in)->required();
    verify->add_option("--out", out, "certificate file")->capture_default_str();
    add_tolerances(verify, tol);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_usage;
    }

    try {
        if (*gen) {
            write_json_file(out, instance_to_json(cmd_gen(variety, n, m, seed)));
            return exit_pass;
        }
        if (*pert) {
            write_json_file(out, instance_to_json(cmd_perturb(instance_from_json(read_json_file(in)), delta, seed)));
            return exit_pass;
        }
        if (*conn) {
            const ConnectResult r = cmd_connect(instance_from_json(read_json_file(in)), epsilon, tol);
            if (r.path)
                write_json_file(out, path_to_json(*r.path));
            if (cert_out.empty())
                std::cerr << r.report.dump() << '\n';
            else
                write_json_file(cert_out, r.report);
            return r.exit_code;
        }
        if (*trace) {
            write_text(out, cmd_trace(path_from_json(read_json_file(in)), samples, format));
            return exit_pass;
        }
        if (*verify) {
            const auto [cert, code] = cmd_verify(path_from_json(read_json_file(in)), tol);
            write_json_file(out, to_json(cert));
            return code;
        }
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return exit_usage;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_fail;
    }
    return exit_usage;
}
