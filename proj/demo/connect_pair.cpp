#include "commpath/commpath.hpp"

#include <cstdio>

using namespace commpath;

int main(int argc, char** argv) {
    const std::string variety = argc > 1 ? argv[1] : "cube";
    const Index n = argc > 2 ? std::stol(argv[2]) : 16;

    const MatrixTuple x = random_instance(parse_variety(variety), n, 2, 7);
    const PerturbedPair pr = perturb(x, 0.01, 8);
    const MatrixPath path = connect(pr.x, pr.y, 0.5);
    const PathCertificate cert = certify_path(path);

    std::printf("%s n=%ld: d(X,Y) = %.4g, %zu segments\n", variety.c_str(), static_cast<long>(n), pr.eth, path.segments.size());
    std::printf("reported epsilon %.4g (delta %.4g, nu %.4g), sampled max distance %.4g\n", path.epsilon, path.budgets.delta, path.budgets.nu, cert.max_eth());
    std::printf("certificate: %s%s\n", cert.pass ? "pass" : "fail ", cert.failing_check.c_str());
    return cert.pass ? 0 : 1;
}
