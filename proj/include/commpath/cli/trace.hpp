#pragma once

#include "commpath/cli/io.hpp"
#include "commpath/verify/certificate.hpp"

#include <iomanip>

namespace commpath {

struct TraceRow {
    double t;
    Index j;  // component
    Index k;  // trajectory
    Complex value;
};

/// Joint spectra along a path with trajectories continued by greedy
/// nearest-neighbour matching between consecutive samples.
struct LinkTrace {
    Index n = 0;
    Index m = 0;
    std::string variety;
    std::vector<double> ts;
    std::vector<Matrix> points;  // per sample, m x n, column k is trajectory k

    std::vector<TraceRow> rows() const {
        std::vector<TraceRow> out;
        out.reserve(ts.size() * static_cast<std::size_t>(n * m));
        for (std::size_t s = 0; s < ts.size(); ++s)
            for (Index j = 0; j < m; ++j)
                for (Index k = 0; k < n; ++k)
                    out.push_back({ts[s], j, k, points[s](j, k)});
        return out;
    }
};

/// Column order of `next` following `prev`: each previous point, in index
/// order, takes its nearest unused successor; ties go to the lower index.
inline std::vector<Index> greedy_continuation(const Matrix& prev, const Matrix& next) {
    const Index n = prev.cols();
    std::vector<Index> order(static_cast<std::size_t>(n), -1);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (Index k = 0; k < n; ++k) {
        Index best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (Index c = 0; c < n; ++c) {
            if (used[static_cast<std::size_t>(c)])
                continue;
            const double d = (prev.col(k) - next.col(c)).cwiseAbs().maxCoeff();
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        order[static_cast<std::size_t>(k)] = best;
        used[static_cast<std::size_t>(best)] = true;
    }
    return order;
}

inline LinkTrace trace_path(const MatrixPath& path, int samples, const JointDiagOptions& opt = {}) {
    LinkTrace tr;
    tr.ts = sample_schedule(samples);
    tr.n = path.start.dim();
    tr.m = path.start.arity();
    tr.variety = to_string(path.variety);
    tr.points.resize(tr.ts.size());
    parallel_for(tr.ts.size(), [&](std::size_t i) { tr.points[i] = joint_diagonalize(path.eval(tr.ts[i]), opt).points; });
    for (std::size_t i = 1; i < tr.points.size(); ++i) {
        const std::vector<Index> order = greedy_continuation(tr.points[i - 1], tr.points[i]);
        Matrix sorted(tr.m, tr.n);
        for (Index k = 0; k < tr.n; ++k)
            sorted.col(k) = tr.points[i].col(order[static_cast<std::size_t>(k)]);
        tr.points[i] = std::move(sorted);
    }
    return tr;
}

inline std::string trace_to_csv(const LinkTrace& tr) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "t,j,k,re,im\n";
    for (const auto& r : tr.rows())
        out << r.t << ',' << r.j << ',' << r.k << ',' << r.value.real() << ',' << r.value.imag() << '\n';
    return out.str();
}

inline Json trace_to_json(const LinkTrace& tr) {
    Json rows = Json::array();
    for (const auto& r : tr.rows())
        rows.push_back(Json::array({r.t, r.j, r.k, r.value.real(), r.value.imag()}));
    return Json{
        {"kind", "link-trace"},
        {"variety", tr.variety},
        {"n", tr.n},
        {"m", tr.m},
        {"samples", tr.ts.size()},
        {"columns", {"t", "j", "k", "re", "im"}},
        {"rows", rows},
    };
}

}  // namespace commpath
