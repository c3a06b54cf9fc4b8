// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "pencilbench/best_rank1.hpp"
#include "pencilbench/errors.hpp"
#include "pencilbench/metrics.hpp"
#include "pencilbench/tensor.hpp"

namespace pencilbench {

struct AlsConfig {
    int max_iters = 500;
    double residual_tol = 2.0 * std::sqrt(10.0) * kUnitRoundoff;  // relative to ||t||
    double stagnation_tol = 1e-14;                                 // relative decrease per cycle
};

struct AlsResult {
    Cpd cpd;
    int iterations = 0;
    double final_residual = 0.0;  // absolute ||t - reconstruct(cpd)||
    bool converged = false;       // residual_tol reached
    bool singular = false;        // some least-squares system lost rank along the way
    int repairs = 0;              // degenerate term pairs merged and refilled
};

namespace detail {

/// argmin_X ||F - X K^T|| by QR of K; false if K is numerically rank deficient.
inline bool ls_factor(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Ft, Eigen::MatrixXd& out) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(K);
    qr.setThreshold(1e-13);
    if (qr.rank() < K.cols()) return false;
    out = qr.solve(Ft).transpose();
    return out.allFinite();
}

}  // namespace detail

/// Cyclic least-squares updates of A, B, C starting from `init`. Keeps the best
/// iterate, so the reported residual never exceeds the initial one.
[[nodiscard]] inline AlsResult als_refine(const Tensor3& t, const Cpd& init, const AlsConfig& cfg = {}) {
    if (init.dims() != t.dims()) throw DimensionMismatch("als_refine: init dims differ from tensor dims");
    if (cfg.max_iters < 0 || !(cfg.residual_tol > 0.0) || !(cfg.stagnation_tol > 0.0))
        throw InvalidArgument("als_refine: invalid configuration");
    init.validate();

    const double tn = t.norm();
    const double target = cfg.residual_tol * tn;
    const Eigen::MatrixXd F1t = flatten(t, 1).transpose();
    const Eigen::MatrixXd F2t = flatten(t, 2).transpose();
    const Eigen::MatrixXd F3 = flatten(t, 3);
    const Eigen::MatrixXd F3t = F3.transpose();

    auto residual = [&](const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C) {
        return (F3 - C * khatri_rao(A, B).transpose()).norm();
    };

    Eigen::MatrixXd A = init.A(), B = init.B(), C = init.C();
    AlsResult res;
    double best = residual(A, B, C);
    Eigen::MatrixXd bestA = A, bestB = B, bestC = C;

    // Least-squares update of factor m. Two terms that agree in the other two modes
    // make the system singular and trap ALS on a saddle: they are merged into one
    // term and the freed slot is refilled with the best rank-1 fit of the residual.
    Eigen::MatrixXd F[3];
    const Eigen::MatrixXd* Ft[3] = {&F1t, &F2t, &F3t};
    auto others = [&](int m) {
        return m == 0 ? khatri_rao(F[1], F[2]) : m == 1 ? khatri_rao(F[0], F[2]) : khatri_rao(F[0], F[1]);
    };
    auto update = [&](int m) {
        const Index r = F[0].cols();
        for (Index attempt = 0; attempt <= r; ++attempt) {
            const Eigen::MatrixXd K = others(m);
            Eigen::MatrixXd X;
            if (detail::ls_factor(K, *Ft[m], X)) {
                F[m] = std::move(X);
                return true;
            }
            Index bi = -1, bj = -1;
            double best_cos = 0.0;
            for (Index i = 0; i < r; ++i)
                for (Index j = i + 1; j < r; ++j) {
                    const double den = K.col(i).norm() * K.col(j).norm();
                    const double c = den > 0.0 ? std::abs(K.col(i).dot(K.col(j))) / den : 1.0;
                    if (c > best_cos) {
                        best_cos = c;
                        bi = i;
                        bj = j;
                    }
                }
            if (bi < 0 || best_cos < 1.0 - 1e-8) return false;
            const double ni = K.col(bi).squaredNorm();
            if (ni > 0.0) F[m].col(bi) += (K.col(bi).dot(K.col(bj)) / ni) * F[m].col(bj);
            Eigen::MatrixXd Cz = F[2];
            Cz.col(bj).setZero();
            const RowMajorMatrix Rt = (F3 - Cz * khatri_rao(F[0], F[1]).transpose()).transpose();
            const Tensor3 R(t.dims(), Eigen::Map<const Eigen::VectorXd>(Rt.data(), Rt.size()));
            if (R.norm() == 0.0) return false;
            const Rank1Fit fit = best_rank1(R);
            F[0].col(bj) = fit.term.a;
            F[1].col(bj) = fit.term.b;
            F[2].col(bj) = fit.term.c;
            ++res.repairs;
        }
        return false;
    };

    if (best <= target) {
        res.converged = true;
    } else {
        double prev = best;
        for (int it = 1; it <= cfg.max_iters; ++it) {
            F[0] = A;
            F[1] = B;
            F[2] = C;
            int skipped = 0;
            for (int m = 0; m < 3; ++m)
                if (!update(m)) ++skipped;
            if (skipped > 0) res.singular = true;
            if (skipped == 3) break;
            A = F[0];
            B = F[1];
            C = F[2];
            // Move scale onto C so that A and B stay unit-norm columns.
            for (Index i = 0; i < A.cols(); ++i) {
                const double na = A.col(i).norm(), nb = B.col(i).norm();
                if (na == 0.0 || nb == 0.0) continue;
                A.col(i) /= na;
                B.col(i) /= nb;
                C.col(i) *= na * nb;
            }
            const double cur = residual(A, B, C);
            res.iterations = it;
            if (cur < best) {
                best = cur;
                bestA = A;
                bestB = B;
                bestC = C;
            }
            if (cur <= target) {
                res.converged = true;
                break;
            }
            if (prev - cur <= cfg.stagnation_tol * prev) break;
            prev = cur;
        }
    }
    res.cpd = Cpd::from_factors(bestA, bestB, bestC).canonical();
    res.final_residual = best;
    return res;
}

}  // namespace pencilbench
