#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace commpath {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Error hierarchy. Every failure raised by the library derives from Error so
// callers (the CLI in particular) can map them onto exit codes.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
  public:
    using Error::Error;
};

class InvalidArgument : public Error {
  public:
    using Error::Error;
};

// An input violates an operation's precondition by a measurable amount.
class PreconditionError : public Error {
  public:
    PreconditionError(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string& what, double achieved)
        : Error(what + " (achieved residual " + std::to_string(achieved) + ")"), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

  private:
    double achieved_;
};

// Achieved (delta, nu) constants of a construction.
struct Budgets {
    double delta = 0.0;
    double nu = 0.0;
};

// The requested accuracy cannot be reached for this pair; carries the
// constants measured on the last attempt.
class BudgetInfeasible : public Error {
  public:
    BudgetInfeasible(const std::string& what, Budgets achieved, double defect = 0.0, double defect_limit = 0.0)
        : Error(what), achieved_(achieved), defect_(defect), defect_limit_(defect_limit) {}
    const Budgets& achieved() const noexcept { return achieved_; }
    double defect() const noexcept { return defect_; }
    double defect_limit() const noexcept { return defect_limit_; }

  private:
    Budgets achieved_;
    double defect_;
    double defect_limit_;
};

enum class VarietyKind { none, cube, disk, manifold, torus, sphere, spherical_unitary };

struct VarietyTag {
    VarietyKind kind = VarietyKind::none;
    std::string atlas_id;  // only meaningful for VarietyKind::manifold

    friend bool operator==(const VarietyTag&, const VarietyTag&) = default;
};

inline std::string to_string(const VarietyTag& tag) {
    switch (tag.kind) {
    case VarietyKind::none:
        return "none";
    case VarietyKind::cube:
        return "cube";
    case VarietyKind::disk:
        return "disk";
    case VarietyKind::manifold:
        return "manifold:" + tag.atlas_id;
    case VarietyKind::torus:
        return "torus";
    case VarietyKind::sphere:
        return "sphere";
    case VarietyKind::spherical_unitary:
        return "spherical-unitary";
    }
    return "none";
}

inline VarietyTag parse_variety(std::string_view text) {
    if (text == "none")
        return {VarietyKind::none, {}};
    if (text == "cube")
        return {VarietyKind::cube, {}};
    if (text == "disk")
        return {VarietyKind::disk, {}};
    if (text == "torus")
        return {VarietyKind::torus, {}};
    if (text == "sphere")
        return {VarietyKind::sphere, {}};
    if (text == "spherical-unitary")
        return {VarietyKind::spherical_unitary, {}};
    constexpr std::string_view prefix = "manifold:";
    if (text.starts_with(prefix) && text.size() > prefix.size())
        return {VarietyKind::manifold, std::string(text.substr(prefix.size()))};
    throw InvalidArgument("unknown variety '" + std::string(text) + "'");
}

// Ordered m-tuple of n x n complex matrices with a variety tag.
class MatrixTuple {
  public:
    MatrixTuple() = default;

    explicit MatrixTuple(std::vector<Matrix> components, VarietyTag variety = {})
        : components_(std::move(components)), variety_(std::move(variety)) {
        validate();
    }

    Index arity() const noexcept { return static_cast<Index>(components_.size()); }
    Index dim() const noexcept { return components_.empty() ? 0 : components_.front().rows(); }
    bool empty() const noexcept { return components_.empty(); }

    const Matrix& operator[](Index j) const { return components_[static_cast<std::size_t>(j)]; }
    Matrix& operator[](Index j) { return components_[static_cast<std::size_t>(j)]; }

    const std::vector<Matrix>& components() const noexcept { return components_; }
    auto begin() const noexcept { return components_.begin(); }
    auto end() const noexcept { return components_.end(); }

    const VarietyTag& variety() const noexcept { return variety_; }
    void set_variety(VarietyTag v) { variety_ = std::move(v); }
    MatrixTuple with_variety(VarietyTag v) const {
        MatrixTuple copy = *this;
        copy.variety_ = std::move(v);
        return copy;
    }

    // Bitwise equality of all entries (variety tags ignored).
    bool same_entries(const MatrixTuple& other) const {
        if (arity() != other.arity() || dim() != other.dim())
            return false;
        for (Index j = 0; j < arity(); ++j)
            if (!((*this)[j].array() == other[j].array()).all())
                return false;
        return true;
    }

  private:
    void validate() const {
        if (components_.empty())
            throw DimensionError("matrix tuple must have at least one component");
        const Index n = components_.front().rows();
        if (n <= 0)
            throw DimensionError("matrix dimension must be positive");
        for (const auto& c : components_) {
            if (c.rows() != n || c.cols() != n)
                throw DimensionError("tuple components must be square and share one dimension");
            if (!c.allFinite())
                throw InvalidArgument("matrix entries must be finite");
        }
    }

    std::vector<Matrix> components_;
    VarietyTag variety_;
};

inline void require_same_shape(const MatrixTuple& a, const MatrixTuple& b) {
    if (a.arity() != b.arity() || a.dim() != b.dim())
        throw DimensionError("tuples differ in arity or dimension");
}

}  // namespace commpath
