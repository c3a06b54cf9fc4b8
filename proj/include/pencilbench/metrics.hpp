// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>
#include <vector>

#include "pencilbench/errors.hpp"
#include "pencilbench/tensor.hpp"

namespace pencilbench {

inline constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2;

enum class MatchMethod { HeuristicLsq, BruteForce };

struct MatchResult {
    std::vector<Index> permutation;  // reference term i <-> computed term permutation[i]
    double forward_error = 0.0;
    MatchMethod method = MatchMethod::HeuristicLsq;
};

namespace detail {

/// D(i, j) = ||M_i - M'_j||^2, evaluated on explicit differences so that tiny
/// errors do not vanish in cancellation.
inline Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& M, const Eigen::MatrixXd& Mc) {
    Eigen::MatrixXd D(M.cols(), Mc.cols());
    for (Index i = 0; i < M.cols(); ++i)
        for (Index j = 0; j < Mc.cols(); ++j) D(i, j) = (M.col(i) - Mc.col(j)).squaredNorm();
    return D;
}

inline double matched_error(const Eigen::MatrixXd& D, const std::vector<Index>& perm) {
    double s = 0.0;
    for (Index i = 0; i < D.rows(); ++i) s += D(i, perm[static_cast<std::size_t>(i)]);
    return std::sqrt(s);
}

/// Greedy assignment on descending weight; ties go to the lower (row, col).
inline std::vector<Index> greedy_assignment(const Eigen::MatrixXd& W) {
    const Index r = W.rows();
    std::vector<std::tuple<double, Index, Index>> entries;
    entries.reserve(static_cast<std::size_t>(r * r));
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < r; ++j) entries.emplace_back(W(i, j), i, j);
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& x, const auto& y) { return std::get<0>(x) > std::get<0>(y); });
    std::vector<Index> row_to_col(static_cast<std::size_t>(r), -1);
    std::vector<bool> col_used(static_cast<std::size_t>(r), false);
    Index assigned = 0;
    for (const auto& [w, i, j] : entries) {
        if (row_to_col[static_cast<std::size_t>(i)] >= 0 || col_used[static_cast<std::size_t>(j)]) continue;
        row_to_col[static_cast<std::size_t>(i)] = j;
        col_used[static_cast<std::size_t>(j)] = true;
        if (++assigned == r) break;
    }
    return row_to_col;
}

}  // namespace detail

/// Matching distance between two sets of vectorized rank-1 terms (columns).
[[nodiscard]] inline MatchResult match_terms(const Eigen::MatrixXd& M, const Eigen::MatrixXd& Mc,
                                             MatchMethod method) {
    if (M.cols() != Mc.cols()) throw DimensionMismatch("forward_error: rank mismatch");
    if (M.rows() != Mc.rows()) throw DimensionMismatch("forward_error: dimension mismatch");
    const Index r = M.cols();
    MatchResult res;
    res.method = method;
    const Eigen::MatrixXd D = detail::squared_distances(M, Mc);

    if (method == MatchMethod::BruteForce) {
        if (r > 8) throw CombinatorialBudgetExceeded("forward_error: BruteForce allowed only for r <= 8");
        std::vector<Index> perm(static_cast<std::size_t>(r));
        std::iota(perm.begin(), perm.end(), Index{0});
        res.permutation = perm;
        res.forward_error = detail::matched_error(D, perm);
        while (std::next_permutation(perm.begin(), perm.end())) {
            const double e = detail::matched_error(D, perm);
            if (e < res.forward_error) {
                res.forward_error = e;
                res.permutation = perm;
            }
        }
        return res;
    }

    // min_X ||M - M' X||: row j of X says which reference term computed term j explains.
    const Eigen::MatrixXd X = Mc.colPivHouseholderQr().solve(M);
    const Eigen::MatrixXd W = X.cwiseAbs();
    std::vector<Index> perm(static_cast<std::size_t>(r), -1);
    bool bijective = true;
    for (Index j = 0; j < r && bijective; ++j) {
        Index i = 0;
        W.row(j).maxCoeff(&i);
        if (perm[static_cast<std::size_t>(i)] >= 0) bijective = false;
        perm[static_cast<std::size_t>(i)] = j;
    }
    if (!bijective) {
        // Greedy on |X| transposed so rows are reference terms.
        perm = detail::greedy_assignment(W.transpose());
    }
    res.permutation = std::move(perm);
    res.forward_error = detail::matched_error(D, res.permutation);
    return res;
}

/// min over permutations of || A⊙B⊙C - (A'⊙B'⊙C') P ||_F.
[[nodiscard]] inline MatchResult forward_error(const Cpd& reference, const Cpd& computed,
                                               MatchMethod method = MatchMethod::HeuristicLsq) {
    if (reference.rank() != computed.rank()) throw DimensionMismatch("forward_error: rank mismatch");
    if (reference.dims() != computed.dims()) throw DimensionMismatch("forward_error: dimension mismatch");
    return match_terms(vectorized_terms(reference), vectorized_terms(computed), method);
}

/// eps_u * ||t||_F, the modelled size of the representation error of t.
[[nodiscard]] inline double representation_backward_norm(const Tensor3& t, double unit_roundoff = kUnitRoundoff) {
    const double n = t.norm();
    if (n == 0.0) throw ZeroInput("representation_backward_norm: zero tensor");
    return unit_roundoff * n;
}

[[nodiscard]] inline double excess_factor(double forward_err, double kappa, double backward_norm) {
    if (!std::isfinite(kappa) || !(kappa > 0.0)) throw InvalidArgument("excess_factor: kappa must be finite and > 0");
    if (!(backward_norm > 0.0)) throw ZeroInput("excess_factor: backward_norm must be > 0");
    return forward_err / (kappa * backward_norm);
}

[[nodiscard]] inline double excess_factor(const Cpd& reference, const Cpd& computed, double kappa,
                                          double backward_norm) {
    const double fe = forward_error(reference, computed).forward_error;
    return excess_factor(fe, kappa, backward_norm);
}

}  // namespace pencilbench
