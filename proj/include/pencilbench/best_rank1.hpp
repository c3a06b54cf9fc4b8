// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "pencilbench/linalg.hpp"
#include "pencilbench/tensor.hpp"

namespace pencilbench {

struct Rank1Fit {
    Rank1Term term;  // a, b unit and sign-canonical; magnitude on c
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline Eigen::VectorXd kron(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    Eigen::VectorXd out(x.size() * y.size());
    for (Index i = 0; i < x.size(); ++i) out.segment(i * y.size(), y.size()) = x(i) * y;
    return out;
}

}  // namespace detail

/// Higher-order power iteration initialized from the leading left singular vectors
/// of the three unfoldings. Stops when the change of the normalized iterate drops
/// below `tol`, or when it settles at the roundoff floor.
[[nodiscard]] inline Rank1Fit best_rank1(const Tensor3& t, int max_iters = 500, double tol = 1e-14) {
    const double tn = t.norm();
    if (tn == 0.0) throw ZeroInput("best_rank1: zero tensor");

    const Eigen::MatrixXd F1 = flatten(t, 1), F2 = flatten(t, 2), F3 = flatten(t, 3);
    Eigen::VectorXd a = leading_left_singular_vectors(F1, 1).col(0);
    Eigen::VectorXd b = leading_left_singular_vectors(F2, 1).col(0);
    Eigen::VectorXd c = F3 * detail::kron(a, b);

    Rank1Fit fit;
    double prev_change = std::numeric_limits<double>::infinity();
    int flat_steps = 0;
    for (int it = 1; it <= max_iters; ++it) {
        Eigen::VectorXd a_new = F1 * detail::kron(b, c);
        const double na = a_new.norm();
        if (na == 0.0) break;
        a_new /= na;
        Eigen::VectorXd b_new = F2 * detail::kron(a_new, c);
        const double nb = b_new.norm();
        if (nb == 0.0) break;
        b_new /= nb;
        Eigen::VectorXd c_new = F3 * detail::kron(a_new, b_new);

        const double cn = std::max(c_new.norm(), std::numeric_limits<double>::min());
        const double change = (a_new - a).norm() + (b_new - b).norm() + (c_new - c).norm() / cn;
        a = std::move(a_new);
        b = std::move(b_new);
        c = std::move(c_new);
        fit.iterations = it;
        if (change <= tol) {
            fit.converged = true;
            break;
        }
        // Roundoff floor: tiny and no longer decreasing.
        flat_steps = (change <= 1e-10 && change >= 0.5 * prev_change) ? flat_steps + 1 : 0;
        if (flat_steps >= 3) {
            fit.converged = true;
            break;
        }
        prev_change = change;
    }

    const double s = canonical_sign(a) * canonical_sign(b);
    fit.term = Rank1Term{a, b, s * c};
    return fit;
}

}  // namespace pencilbench
