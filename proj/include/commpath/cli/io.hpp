#pragma once

#include "commpath/paths/path.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace commpath {

using Json = nlohmann::json;

// Malformed or unreadable JSON input.
class SchemaError : public Error {
  public:
    using Error::Error;
};

namespace detail {

template <class T>
T field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw SchemaError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw SchemaError(std::string("field '") + key + "' has the wrong type");
    }
}

inline const Json& member(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw SchemaError(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline Json complex_entries(const Matrix& a) {
    Json out = Json::array();
    for (Index i = 0; i < a.rows(); ++i)
        for (Index k = 0; k < a.cols(); ++k)
            out.push_back(Json::array({a(i, k).real(), a(i, k).imag()}));
    return out;
}

inline Matrix complex_entries_from(const Json& e, Index rows, Index cols) {
    if (!e.is_array() || e.size() != static_cast<std::size_t>(rows * cols))
        throw SchemaError("matrix entry count does not match its shape");
    Matrix a(rows, cols);
    std::size_t idx = 0;
    for (Index i = 0; i < rows; ++i)
        for (Index k = 0; k < cols; ++k) {
            const Json& z = e[idx++];
            if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
                throw SchemaError("complex entries must be [re, im] number pairs");
            a(i, k) = Complex(z[0].get<double>(), z[1].get<double>());
        }
    return a;
}

}  // namespace detail

inline Json matrix_to_json(const Matrix& a) {
    return Json{{"rows", a.rows()}, {"cols", a.cols()}, {"entries", detail::complex_entries(a)}};
}

inline Matrix matrix_from_json(const Json& j) {
    const auto rows = detail::field<Index>(j, "rows");
    const auto cols = detail::field<Index>(j, "cols");
    if (rows < 0 || cols < 0)
        throw SchemaError("negative matrix shape");
    return detail::complex_entries_from(detail::member(j, "entries"), rows, cols);
}

inline Json real_matrix_to_json(const RealMatrix& a) {
    Json values = Json::array();
    for (Index i = 0; i < a.rows(); ++i)
        for (Index k = 0; k < a.cols(); ++k)
            values.push_back(a(i, k));
    return Json{{"rows", a.rows()}, {"cols", a.cols()}, {"values", values}};
}

inline RealMatrix real_matrix_from_json(const Json& j) {
    const auto rows = detail::field<Index>(j, "rows");
    const auto cols = detail::field<Index>(j, "cols");
    const auto values = detail::field<std::vector<double>>(j, "values");
    if (rows < 0 || cols < 0 || values.size() != static_cast<std::size_t>(rows * cols))
        throw SchemaError("real matrix value count does not match its shape");
    RealMatrix a(rows, cols);
    std::size_t idx = 0;
    for (Index i = 0; i < rows; ++i)
        for (Index k = 0; k < cols; ++k)
            a(i, k) = values[idx++];
    return a;
}

/// {n, m, variety, components: [[ [re, im], ... row-major ], ...]}
inline Json tuple_to_json(const MatrixTuple& x) {
    Json comps = Json::array();
    for (const auto& c : x)
        comps.push_back(detail::complex_entries(c));
    return Json{{"n", x.dim()}, {"m", x.arity()}, {"variety", to_string(x.variety())}, {"components", comps}};
}

inline MatrixTuple tuple_from_json(const Json& j) {
    const auto n = detail::field<Index>(j, "n");
    const auto m = detail::field<Index>(j, "m");
    const Json& comps = detail::member(j, "components");
    if (n < 1 || m < 1 || !comps.is_array() || comps.size() != static_cast<std::size_t>(m))
        throw SchemaError("tuple shape does not match its components");
    VarietyTag tag;
    try {
        tag = parse_variety(detail::field<std::string>(j, "variety"));
    } catch (const InvalidArgument& e) {
        throw SchemaError(e.what());
    }
    std::vector<Matrix> out;
    for (const auto& c : comps)
        out.push_back(detail::complex_entries_from(c, n, n));
    try {
        return MatrixTuple(std::move(out), tag);
    } catch (const Error& e) {
        throw SchemaError(e.what());
    }
}

inline Json segment_to_json(const TimedSegment& ts) {
    const PathSegment& s = ts.segment;
    Json j{{"kind", to_string(s.kind())}, {"t0", ts.t0}, {"t1", ts.t1}, {"start", tuple_to_json(s.start())}};
    if (s.kind() != SegmentKind::constant)
        j["end"] = tuple_to_json(s.end());
    if (s.kind() == SegmentKind::rotation)
        j["generator"] = Json{{"basis", matrix_to_json(s.generator().basis)}, {"values", std::vector<double>(s.generator().values.begin(), s.generator().values.end())}};
    if (s.kind() == SegmentKind::chart_linear) {
        j["atlas"] = s.atlas()->id;
        j["basis"] = matrix_to_json(s.basis());
        j["charts"] = s.charts();
        j["params_start"] = real_matrix_to_json(s.params_start());
        j["params_end"] = real_matrix_to_json(s.params_end());
    }
    return j;
}

inline TimedSegment segment_from_json(const Json& j) {
    SegmentKind kind;
    try {
        kind = parse_segment_kind(detail::field<std::string>(j, "kind"));
    } catch (const InvalidArgument& e) {
        throw SchemaError(e.what());
    }
    const double t0 = detail::field<double>(j, "t0");
    const double t1 = detail::field<double>(j, "t1");
    if (!(0.0 <= t0 && t0 < t1 && t1 <= 1.0))
        throw SchemaError("segment times must satisfy 0 <= t0 < t1 <= 1");
    MatrixTuple start = tuple_from_json(detail::member(j, "start"));
    try {
        switch (kind) {
        case SegmentKind::constant:
            return {PathSegment::constant(std::move(start)), t0, t1};
        case SegmentKind::hermitian_linear:
            return {PathSegment::hermitian_linear(std::move(start), tuple_from_json(detail::member(j, "end"))), t0, t1};
        case SegmentKind::rotation: {
            const Json& g = detail::member(j, "generator");
            const auto values = detail::field<std::vector<double>>(g, "values");
            RealVector v(static_cast<Index>(values.size()));
            for (std::size_t i = 0; i < values.size(); ++i)
                v(static_cast<Index>(i)) = values[i];
            const Matrix basis = matrix_from_json(detail::member(g, "basis"));
            if (basis.cols() != v.size() || basis.rows() != basis.cols())
                throw SchemaError("rotation generator shape mismatch");
            return {PathSegment::rotation(std::move(start), generator_from_spectrum(basis, v), tuple_from_json(detail::member(j, "end"))), t0, t1};
        }
        case SegmentKind::chart_linear: {
            auto atlas = std::make_shared<const ChartAtlas>(builtin_atlas(detail::field<std::string>(j, "atlas")));
            const auto charts = detail::field<std::vector<Index>>(j, "charts");
            return {PathSegment::chart_linear(std::move(atlas), matrix_from_json(detail::member(j, "basis")), charts, real_matrix_from_json(detail::member(j, "params_start")), real_matrix_from_json(detail::member(j, "params_end")), std::move(start), tuple_from_json(detail::member(j, "end"))),
                    t0, t1};
        }
        }
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        throw SchemaError(e.what());
    }
    throw SchemaError("unreachable segment kind");
}

inline Json path_to_json(const MatrixPath& p) {
    Json segs = Json::array();
    for (const auto& s : p.segments)
        segs.push_back(segment_to_json(s));
    return Json{
        {"kind", "path"},
        {"variety", to_string(p.variety)},
        {"lift", to_string(p.lift)},
        {"epsilon", p.epsilon},
        {"budgets", {{"delta", p.budgets.delta}, {"nu", p.budgets.nu}}},
        {"atlas_id", p.atlas_id},
        {"start", tuple_to_json(p.start)},
        {"end", tuple_to_json(p.end)},
        {"segments", segs},
    };
}

inline MatrixPath path_from_json(const Json& j) {
    if (detail::field<std::string>(j, "kind") != "path")
        throw SchemaError("document is not a path");
    MatrixPath p;
    try {
        p.variety = parse_variety(detail::field<std::string>(j, "variety"));
        p.lift = parse_lift(detail::field<std::string>(j, "lift"));
    } catch (const InvalidArgument& e) {
        throw SchemaError(e.what());
    }
    p.epsilon = detail::field<double>(j, "epsilon");
    const Json& b = detail::member(j, "budgets");
    p.budgets = {detail::field<double>(b, "delta"), detail::field<double>(b, "nu")};
    p.atlas_id = detail::field<std::string>(j, "atlas_id");
    p.start = tuple_from_json(detail::member(j, "start"));
    p.end = tuple_from_json(detail::member(j, "end"));
    const Json& segs = detail::member(j, "segments");
    if (!segs.is_array() || segs.empty())
        throw SchemaError("path needs at least one segment");
    for (const auto& s : segs)
        p.segments.push_back(segment_from_json(s));
    if (p.segments.front().t0 != 0.0 || p.segments.back().t1 != 1.0)
        throw SchemaError("segments must cover [0,1]");
    for (std::size_t i = 1; i < p.segments.size(); ++i)
        if (p.segments[i].t0 != p.segments[i - 1].t1)
            throw SchemaError("segment times must be contiguous");
    for (const auto& s : p.segments)
        if (s.segment.start().arity() != p.segments.front().segment.start().arity() || s.segment.start().dim() != p.start.dim())
            throw SchemaError("segments disagree in shape");
    return p;
}

/// An instance file: one tuple from gen, or a pair from perturb.
struct InstanceFile {
    std::vector<MatrixTuple> tuples;
    std::uint64_t seed = 0;
    Json metadata = Json::object();
};

inline Json instance_to_json(const InstanceFile& f) {
    Json tuples = Json::array();
    for (const auto& t : f.tuples)
        tuples.push_back(tuple_to_json(t));
    return Json{
        {"kind", "instance"},
        {"variety", f.tuples.empty() ? std::string("none") : to_string(f.tuples.front().variety())},
        {"seed", f.seed},
        {"metadata", f.metadata},
        {"tuples", tuples},
    };
}

inline InstanceFile instance_from_json(const Json& j) {
    if (detail::field<std::string>(j, "kind") != "instance")
        throw SchemaError("document is not an instance");
    InstanceFile f;
    f.seed = detail::field<std::uint64_t>(j, "seed");
    if (j.contains("metadata"))
        f.metadata = j.at("metadata");
    const Json& tuples = detail::member(j, "tuples");
    if (!tuples.is_array() || tuples.empty() || tuples.size() > 2)
        throw SchemaError("an instance holds one or two tuples");
    for (const auto& t : tuples)
        f.tuples.push_back(tuple_from_json(t));
    if (f.tuples.size() == 2 && (f.tuples[0].variety() != f.tuples[1].variety() || f.tuples[0].arity() != f.tuples[1].arity() || f.tuples[0].dim() != f.tuples[1].dim()))
        throw SchemaError("instance tuples differ in variety or shape");
    return f;
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SchemaError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("'" + path + "' is not valid JSON: " + e.what());
    }
}

/// Compact dump with a trailing newline; "-" writes to stdout.
inline void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InvalidArgument("cannot write '" + path + "'");
    out << text;
}

inline void write_json_file(const std::string& path, const Json& j) { write_text(path, j.dump() + "\n"); }

}  // namespace commpath
