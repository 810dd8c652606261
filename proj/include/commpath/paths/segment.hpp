#pragma once

#include "commpath/core/joint_diag.hpp"
#include "commpath/interpolant/log_generator.hpp"
#include "commpath/manifold/atlas.hpp"

#include <memory>

namespace commpath {

enum class SegmentKind { constant, hermitian_linear, rotation, chart_linear };

inline std::string to_string(SegmentKind k) {
    switch (k) {
    case SegmentKind::constant:
        return "constant";
    case SegmentKind::hermitian_linear:
        return "hermitian-linear";
    case SegmentKind::rotation:
        return "rotation";
    case SegmentKind::chart_linear:
        return "chart-linear";
    }
    return "constant";
}

inline SegmentKind parse_segment_kind(std::string_view s) {
    if (s == "constant")
        return SegmentKind::constant;
    if (s == "hermitian-linear")
        return SegmentKind::hermitian_linear;
    if (s == "rotation")
        return SegmentKind::rotation;
    if (s == "chart-linear")
        return SegmentKind::chart_linear;
    throw InvalidArgument("unknown segment kind '" + std::string(s) + "'");
}

/// One piece of a path on [0,1]. The stored endpoints are returned exactly
/// at s = 0 and s = 1. Curved kinds evaluate their formula in between, plus
/// the linear blend of the (tiny) gaps between formula and stored endpoints.
class PathSegment {
  public:
    static PathSegment constant(MatrixTuple x) {
        PathSegment s(SegmentKind::constant);
        s.end_ = x;
        s.start_ = std::move(x);
        return s;
    }

    static PathSegment hermitian_linear(MatrixTuple h, MatrixTuple k) {
        require_same_shape(h, k);
        PathSegment s(SegmentKind::hermitian_linear);
        s.start_ = std::move(h);
        s.end_ = std::move(k);
        return s;
    }

    /// Ad[exp(i pi s H / 2)](xtilde), ending at the stored `end`.
    static PathSegment rotation(MatrixTuple xtilde, LogGenerator generator, MatrixTuple end) {
        require_same_shape(xtilde, end);
        if (generator.basis.rows() != xtilde.dim())
            throw DimensionError("rotation segment: generator has the wrong dimension");
        PathSegment s(SegmentKind::rotation);
        s.start_ = std::move(xtilde);
        s.end_ = std::move(end);
        s.generator_ = std::move(generator);
        s.refresh();
        return s;
    }

    /// Column k of `basis` carries the point phi_c((1-s) p0_k + s p1_k) with
    /// c = charts[k].
    static PathSegment chart_linear(std::shared_ptr<const ChartAtlas> atlas, Matrix basis, std::vector<Index> charts, RealMatrix p0, RealMatrix p1, MatrixTuple start, MatrixTuple end) {
        if (!atlas)
            throw InvalidArgument("chart-linear segment: missing atlas");
        const Index n = basis.rows();
        if (basis.cols() != n || p0.cols() != n || p1.cols() != n || static_cast<Index>(charts.size()) != n || p0.rows() != atlas->d || p1.rows() != atlas->d)
            throw DimensionError("chart-linear segment: inconsistent shapes");
        for (Index c : charts)
            if (c < 0 || c >= static_cast<Index>(atlas->charts.size()))
                throw InvalidArgument("chart-linear segment: chart index out of range");
        require_same_shape(start, end);
        if (start.arity() != atlas->m || start.dim() != n)
            throw DimensionError("chart-linear segment: endpoints do not match the atlas");
        PathSegment s(SegmentKind::chart_linear);
        s.atlas_ = std::move(atlas);
        s.basis_ = std::move(basis);
        s.charts_ = std::move(charts);
        s.p0_ = std::move(p0);
        s.p1_ = std::move(p1);
        s.start_ = std::move(start);
        s.end_ = std::move(end);
        s.refresh();
        return s;
    }

    SegmentKind kind() const noexcept { return kind_; }
    const MatrixTuple& start() const noexcept { return start_; }
    const MatrixTuple& end() const noexcept { return end_; }
    const LogGenerator& generator() const noexcept { return generator_; }
    const std::shared_ptr<const ChartAtlas>& atlas() const noexcept { return atlas_; }
    const Matrix& basis() const noexcept { return basis_; }
    const std::vector<Index>& charts() const noexcept { return charts_; }
    const RealMatrix& params_start() const noexcept { return p0_; }
    const RealMatrix& params_end() const noexcept { return p1_; }

    void set_start(MatrixTuple x) {
        require_same_shape(x, start_);
        start_ = std::move(x);
        if (kind_ == SegmentKind::constant)
            end_ = start_;
        refresh();
    }

    void set_end(MatrixTuple x) {
        require_same_shape(x, end_);
        end_ = std::move(x);
        if (kind_ == SegmentKind::constant)
            start_ = end_;
        refresh();
    }

    MatrixTuple eval(double s) const {
        if (!(s >= 0.0 && s <= 1.0))
            throw InvalidArgument("segment parameter outside [0,1]");
        if (s == 0.0)
            return start_;
        if (s == 1.0)
            return end_;
        switch (kind_) {
        case SegmentKind::constant:
            return start_;
        case SegmentKind::hermitian_linear:
            return blend(start_, end_, s);
        case SegmentKind::rotation:
        case SegmentKind::chart_linear: {
            MatrixTuple r = raw(s);
            std::vector<Matrix> out;
            out.reserve(static_cast<std::size_t>(r.arity()));
            for (Index j = 0; j < r.arity(); ++j)
                out.push_back(r[j] + (1.0 - s) * gap0_[static_cast<std::size_t>(j)] + s * gap1_[static_cast<std::size_t>(j)]);
            return MatrixTuple(std::move(out), start_.variety());
        }
        }
        return start_;
    }

    /// The formula part alone, without endpoint blending.
    MatrixTuple raw(double s) const {
        switch (kind_) {
        case SegmentKind::constant:
            return start_;
        case SegmentKind::hermitian_linear:
            return blend(start_, end_, s);
        case SegmentKind::rotation:
            return conjugate(generator_.rotation(s), start_);
        case SegmentKind::chart_linear: {
            const Index n = basis_.rows();
            Matrix pts(atlas_->m, n);
            for (Index k = 0; k < n; ++k) {
                const RealVector p = (1.0 - s) * p0_.col(k) + s * p1_.col(k);
                pts.col(k) = atlas_->charts[static_cast<std::size_t>(charts_[static_cast<std::size_t>(k)])].forward(p).cast<Complex>();
            }
            return assemble_tuple(basis_, pts, start_.variety());
        }
        }
        return start_;
    }

    /// Largest gap between the formula and the stored endpoints.
    double endpoint_gap() const {
        double g = 0.0;
        for (const auto& m : gap0_)
            g = std::max(g, spectral_norm(m));
        for (const auto& m : gap1_)
            g = std::max(g, spectral_norm(m));
        return g;
    }

    /// Bound on the ambient sup-norm move of every joint spectral point of
    /// the formula part, from the chart geometry.
    double chart_deviation() const {
        if (kind_ != SegmentKind::chart_linear)
            throw InvalidArgument("chart_deviation: not a chart-linear segment");
        double d = 0.0;
        for (Index k = 0; k < p0_.cols(); ++k)
            d = std::max(d, atlas_->segment_deviation(p0_.col(k), p1_.col(k)));
        return d;
    }

  private:
    explicit PathSegment(SegmentKind k) : kind_(k) {}

    static MatrixTuple blend(const MatrixTuple& a, const MatrixTuple& b, double s) {
        std::vector<Matrix> out;
        out.reserve(static_cast<std::size_t>(a.arity()));
        for (Index j = 0; j < a.arity(); ++j)
            out.push_back((1.0 - s) * a[j] + s * b[j]);
        return MatrixTuple(std::move(out), a.variety());
    }

    void refresh() {
        gap0_.clear();
        gap1_.clear();
        if (kind_ != SegmentKind::rotation && kind_ != SegmentKind::chart_linear)
            return;
        const MatrixTuple r0 = raw(0.0), r1 = raw(1.0);
        for (Index j = 0; j < start_.arity(); ++j) {
            gap0_.push_back(start_[j] - r0[j]);
            gap1_.push_back(end_[j] - r1[j]);
        }
    }

    SegmentKind kind_;
    MatrixTuple start_, end_;
    LogGenerator generator_;
    std::shared_ptr<const ChartAtlas> atlas_;
    Matrix basis_;
    std::vector<Index> charts_;
    RealMatrix p0_, p1_;
    std::vector<Matrix> gap0_, gap1_;
};

}  // namespace commpath
