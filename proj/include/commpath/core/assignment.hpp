#pragma once

#include "commpath/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace commpath {

// perm[k] is the index of the A-point matched to B-point k.
using Permutation = std::vector<Index>;

namespace detail {

// Kuhn's augmenting-path matching restricted to edges with cost <= threshold.
inline bool has_perfect_matching(const RealMatrix& cost, double threshold) {
    const Index n = cost.rows();
    std::vector<Index> match_col(static_cast<std::size_t>(n), -1);
    std::vector<char> seen;
    auto augment = [&](auto&& self, Index row) -> bool {
        for (Index c = 0; c < n; ++c) {
            if (cost(row, c) > threshold || seen[static_cast<std::size_t>(c)])
                continue;
            seen[static_cast<std::size_t>(c)] = 1;
            const Index owner = match_col[static_cast<std::size_t>(c)];
            if (owner < 0 || self(self, owner)) {
                match_col[static_cast<std::size_t>(c)] = row;
                return true;
            }
        }
        return false;
    };
    for (Index r = 0; r < n; ++r) {
        seen.assign(static_cast<std::size_t>(n), 0);
        if (!augment(augment, r))
            return false;
    }
    return true;
}

// Minimum-sum assignment (shortest augmenting path with potentials).
// Returns row_for_col: row_for_col[c] = row assigned to column c.
inline std::vector<Index> hungarian(const RealMatrix& cost) {
    const Index n = cost.rows();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(n + 1), 0.0);
    std::vector<Index> p(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
    for (Index i = 1; i <= n; ++i) {
        p[0] = i;
        Index j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
        std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const Index i0 = p[static_cast<std::size_t>(j0)];
            double delta = inf;
            Index j1 = 0;
            for (Index j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)])
                    continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (Index j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const Index j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<Index> row_for_col(static_cast<std::size_t>(n));
    for (Index j = 1; j <= n; ++j)
        row_for_col[static_cast<std::size_t>(j - 1)] = p[static_cast<std::size_t>(j)] - 1;
    return row_for_col;
}

inline Permutation greedy_assignment(const RealMatrix& cost) {
    const Index n = cost.rows();
    std::vector<std::pair<Index, Index>> pairs;
    pairs.reserve(static_cast<std::size_t>(n * n));
    for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < n; ++k)
            pairs.emplace_back(i, k);
    std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
        return cost(a.first, a.second) < cost(b.first, b.second);
    });
    Permutation perm(static_cast<std::size_t>(n), -1);
    std::vector<char> row_used(static_cast<std::size_t>(n), 0);
    for (const auto& [i, k] : pairs) {
        if (row_used[static_cast<std::size_t>(i)] || perm[static_cast<std::size_t>(k)] >= 0)
            continue;
        row_used[static_cast<std::size_t>(i)] = 1;
        perm[static_cast<std::size_t>(k)] = i;
    }
    return perm;
}

}  // namespace detail

/// Entrywise max distance between points: cost(i, k) = ||a_i - b_k||_inf.
inline RealMatrix assignment_costs(const Matrix& a_points, const Matrix& b_points) {
    if (a_points.rows() != b_points.rows() || a_points.cols() != b_points.cols())
        throw DimensionError("eigenvalue_assignment: point clouds differ in shape");
    const Index n = a_points.cols();
    RealMatrix cost(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < n; ++k)
            cost(i, k) = (a_points.col(i) - b_points.col(k)).cwiseAbs().maxCoeff();
    return cost;
}

inline double bottleneck_cost(const RealMatrix& cost, const Permutation& perm) {
    double worst = 0.0;
    for (std::size_t k = 0; k < perm.size(); ++k)
        worst = std::max(worst, cost(perm[k], static_cast<Index>(k)));
    return worst;
}

/// Matches the points of A (columns) to those of B. Minimises the bottleneck
/// cost max_k ||A_perm[k] - B_k||_inf; among bottleneck-optimal matchings the
/// sum of squared costs is minimised. Above `exact_limit` points a greedy
/// nearest-pair matching is used instead.
inline Permutation eigenvalue_assignment(const Matrix& a_points, const Matrix& b_points, Index exact_limit = 256) {
    const RealMatrix cost = assignment_costs(a_points, b_points);
    const Index n = cost.rows();
    Permutation ident(static_cast<std::size_t>(n));
    std::iota(ident.begin(), ident.end(), Index{0});
    if (n <= 1)
        return ident;
    if (n > exact_limit)
        return detail::greedy_assignment(cost);

    std::vector<double> values(cost.data(), cost.data() + cost.size());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::size_t lo = 0, hi = values.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (detail::has_perfect_matching(cost, values[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    const double bottleneck = values[lo];

    const double forbidden = 4.0 * (1.0 + values.back() * values.back()) * static_cast<double>(n);
    RealMatrix weighted(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < n; ++k)
            weighted(i, k) = cost(i, k) <= bottleneck ? cost(i, k) * cost(i, k) : forbidden;
    const Permutation perm = detail::hungarian(weighted);

    auto total = [&](const Permutation& p) {
        double s = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k)
            s += weighted(p[k], static_cast<Index>(k));
        return s;
    };
    if (bottleneck_cost(cost, ident) <= bottleneck && total(ident) <= total(perm))
        return ident;
    return perm;
}

}  // namespace commpath
