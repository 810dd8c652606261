#pragma once

#include "commpath/paths/segment.hpp"

namespace commpath {

/// How stored segments map to the output variety.
enum class Lift { none, juncture, interleaved_juncture };

inline std::string to_string(Lift l) {
    switch (l) {
    case Lift::none:
        return "none";
    case Lift::juncture:
        return "juncture";
    case Lift::interleaved_juncture:
        return "interleaved-juncture";
    }
    return "none";
}

inline Lift parse_lift(std::string_view s) {
    if (s == "none")
        return Lift::none;
    if (s == "juncture")
        return Lift::juncture;
    if (s == "interleaved-juncture")
        return Lift::interleaved_juncture;
    throw InvalidArgument("unknown lift '" + std::string(s) + "'");
}

inline MatrixTuple push_down(const MatrixTuple& h, Lift lift, const VarietyTag& tag) {
    switch (lift) {
    case Lift::none:
        return h.with_variety(tag);
    case Lift::juncture:
        return juncture(h).with_variety(tag);
    case Lift::interleaved_juncture:
        return interleaved_juncture(h).with_variety(tag);
    }
    return h;
}

struct TimedSegment {
    PathSegment segment;
    double t0 = 0.0;
    double t1 = 1.0;
};

/// A piecewise path on [0,1]. Segments live in the lifted space; eval pushes
/// them down and returns the stored endpoints exactly at t = 0 and t = 1.
struct MatrixPath {
    std::vector<TimedSegment> segments;
    Lift lift = Lift::none;
    VarietyTag variety;
    MatrixTuple start;  // also the ball centre
    MatrixTuple end;
    double epsilon = 0.0;
    Budgets budgets;
    std::string atlas_id;

    const MatrixTuple& base() const noexcept { return start; }

    std::size_t locate(double t) const {
        for (std::size_t i = 0; i < segments.size(); ++i)
            if (t <= segments[i].t1)
                return i;
        return segments.size() - 1;
    }

    MatrixTuple eval_lifted(double t) const {
        if (!(t >= 0.0 && t <= 1.0))
            throw InvalidArgument("path parameter outside [0,1]");
        if (segments.empty())
            throw InvalidArgument("path has no segments");
        const TimedSegment& ts = segments[locate(t)];
        const double s = std::clamp((t - ts.t0) / (ts.t1 - ts.t0), 0.0, 1.0);
        return ts.segment.eval(s);
    }

    MatrixTuple eval(double t) const {
        if (!(t >= 0.0 && t <= 1.0))
            throw InvalidArgument("path parameter outside [0,1]");
        if (t == 0.0)
            return start;
        if (t == 1.0)
            return end;
        return push_down(eval_lifted(t), lift, variety);
    }
};

/// Single-segment path.
inline MatrixPath make_path(PathSegment seg, Lift lift, VarietyTag variety, MatrixTuple start, MatrixTuple end) {
    MatrixPath p;
    p.segments.push_back({std::move(seg), 0.0, 1.0});
    p.lift = lift;
    p.variety = std::move(variety);
    p.start = std::move(start);
    p.end = std::move(end);
    return p;
}

inline MatrixPath constant_path(const MatrixTuple& x, VarietyTag variety) {
    const MatrixTuple tagged = x.with_variety(variety);
    return make_path(PathSegment::constant(tagged), Lift::none, std::move(variety), tagged, tagged);
}

/// a ⊛ b: a runs on [0,1/2], b on [1/2,1]. The junction must agree within
/// 1e-10 and b's first segment is snapped onto a's last endpoint.
inline MatrixPath concat(const MatrixPath& a, const MatrixPath& b) {
    if (a.segments.empty() || b.segments.empty())
        throw InvalidArgument("concat: empty path");
    if (a.lift != b.lift)
        throw InvalidArgument("concat: paths use different lifts");
    const MatrixTuple& ja = a.segments.back().segment.end();
    const MatrixTuple& jb = b.segments.front().segment.start();
    require_same_shape(ja, jb);
    if (const double gap = metric_eth(ja, jb); gap > 1e-10)
        throw PreconditionError("concat: endpoint mismatch", gap);
    if (const double gap = metric_eth(a.end, b.start); gap > 1e-10)
        throw PreconditionError("concat: endpoint mismatch", gap);

    MatrixPath out;
    out.lift = a.lift;
    out.variety = a.variety;
    out.start = a.start;
    out.end = b.end;
    out.atlas_id = a.atlas_id.empty() ? b.atlas_id : a.atlas_id;
    for (const auto& s : a.segments)
        out.segments.push_back({s.segment, s.t0 / 2.0, s.t1 / 2.0});
    for (const auto& s : b.segments)
        out.segments.push_back({s.segment, 0.5 + s.t0 / 2.0, 0.5 + s.t1 / 2.0});
    out.segments[a.segments.size()].segment.set_start(ja);
    return out;
}

/// Largest junction mismatch between consecutive segments.
inline double junction_gap(const MatrixPath& p) {
    double g = 0.0;
    for (std::size_t i = 1; i < p.segments.size(); ++i)
        g = std::max(g, metric_eth(p.segments[i - 1].segment.end(), p.segments[i].segment.start()));
    return g;
}

}  // namespace commpath
