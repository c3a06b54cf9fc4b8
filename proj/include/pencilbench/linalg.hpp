// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "pencilbench/errors.hpp"
#include "pencilbench/tensor.hpp"

namespace pencilbench {

struct SvdResult {
    Eigen::MatrixXd U;      // m x k, k = min(m, n)
    Eigen::VectorXd sigma;  // descending, nonnegative
    Eigen::MatrixXd V;      // n x k
};

namespace detail {

// Eigen 3.4's divide-and-conquer SVD can return wrong singular values and NaN
// vectors when many singular values coincide, while still reporting success.
// Its output is checked and the one-sided Jacobi SVD used instead on failure.
inline bool bdc_plausible(const Eigen::MatrixXd& M, const Eigen::VectorXd& sigma, const Eigen::MatrixXd* U,
                          const Eigen::MatrixXd* V = nullptr) {
    if (!sigma.allFinite() || (U && !U->allFinite()) || (V && !V->allFinite())) return false;
    const double fn = M.norm();
    if (std::abs(sigma.norm() - fn) > 1e-10 * fn) return false;
    if (U && (U->transpose() * *U - Eigen::MatrixXd::Identity(U->cols(), U->cols())).norm() > 1e-10) return false;
    // Orthonormal U and V can still be mispaired inside a cluster of equal singular values.
    if (U && V && (M - *U * sigma.asDiagonal() * V->transpose()).norm() > 1e-10 * fn) return false;
    return true;
}

}  // namespace detail

/// Thin SVD with deterministic signs: each left singular vector has its first
/// significant entry positive.
[[nodiscard]] inline SvdResult svd(const Eigen::MatrixXd& M) {
    if (!M.allFinite()) throw NonFiniteInput("svd: non-finite input");
    if (M.size() == 0) return {Eigen::MatrixXd(M.rows(), 0), Eigen::VectorXd(0), Eigen::MatrixXd(M.cols(), 0)};
    SvdResult r;
    Eigen::BDCSVD<Eigen::MatrixXd> s(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    r.U = s.matrixU();
    r.sigma = s.singularValues();
    r.V = s.matrixV();
    if (s.info() != Eigen::Success || !detail::bdc_plausible(M, r.sigma, &r.U, &r.V)) {
        Eigen::JacobiSVD<Eigen::MatrixXd> j(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
        r = {j.matrixU(), j.singularValues(), j.matrixV()};
    }
    for (Index j = 0; j < r.U.cols(); ++j) {
        if (canonical_sign(r.U.col(j)) < 0) r.V.col(j) = -r.V.col(j);
    }
    return r;
}

/// Singular values only, descending.
[[nodiscard]] inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& M) {
    if (!M.allFinite()) throw NonFiniteInput("singular_values: non-finite input");
    if (M.size() == 0) return Eigen::VectorXd(0);
    Eigen::BDCSVD<Eigen::MatrixXd> s(M);
    if (s.info() == Eigen::Success && detail::bdc_plausible(M, s.singularValues(), nullptr)) return s.singularValues();
    return Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues();
}

/// Leading k left singular vectors (sign-canonical).
[[nodiscard]] inline Eigen::MatrixXd leading_left_singular_vectors(const Eigen::MatrixXd& M, Index k) {
    if (k > std::min(M.rows(), M.cols()))
        throw InvalidArgument("leading_left_singular_vectors: k exceeds matrix dimensions");
    return svd(M).U.leftCols(k);
}

/// Orthonormal basis of the column span of M (m x r, r <= m), Gram-Schmidt order,
/// each column sign-canonical.
[[nodiscard]] inline Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& M) {
    const Index m = M.rows(), r = M.cols();
    if (r > m) throw InvalidArgument("orthonormalize: more columns than rows");
    if (!M.allFinite()) throw NonFiniteInput("orthonormalize: non-finite input");
    if (r == 0) return Eigen::MatrixXd(m, 0);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    Eigen::MatrixXd R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(R).singularValues();
    if (sv(0) == 0.0 || sv(r - 1) <= 1e-12 * sv(0)) throw RankDeficient("orthonormalize: input is rank deficient");
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(m, r);
    for (Index j = 0; j < r; ++j) canonical_sign(Q.col(j));
    return Q;
}

/// Moore-Penrose pseudoinverse with relative rank cutoff rcond.
[[nodiscard]] inline Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& M, double rcond = 1e-12) {
    if (M.size() == 0) return Eigen::MatrixXd::Zero(M.cols(), M.rows());
    const SvdResult s = svd(M);
    const double cutoff = rcond * (s.sigma.size() ? s.sigma(0) : 0.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.sigma.size());
    for (Index i = 0; i < s.sigma.size(); ++i)
        if (s.sigma(i) > cutoff && s.sigma(i) > 0.0) inv(i) = 1.0 / s.sigma(i);
    return s.V * inv.asDiagonal() * s.U.transpose();
}

/// Householder reflector H with H u = ±|u| e1. Columns 2..n are an orthonormal basis
/// of u^⊥; returned as an n x (n-1) matrix.
[[nodiscard]] inline Eigen::MatrixXd orthogonal_complement(const Eigen::VectorXd& u) {
    const Index n = u.size();
    const double nu = u.norm();
    if (nu == 0.0) throw ZeroInput("orthogonal_complement: zero vector");
    Eigen::VectorXd v = u / nu;
    v(0) += v(0) >= 0 ? 1.0 : -1.0;
    const double vv = v.squaredNorm();
    Eigen::MatrixXd Qc(n, n - 1);
    for (Index j = 1; j < n; ++j) {
        Qc.col(j - 1) = (-2.0 * v(j) / vv) * v;
        Qc(j, j - 1) += 1.0;
    }
    return Qc;
}

/// Eigendecomposition of the pencil (S1, S2) realized as the spectrum of S1 S2^{-1}.
struct PencilEig {
    Eigen::VectorXd eigenvalues;   // descending
    Eigen::MatrixXd eigenvectors;  // unit-norm columns, sign-canonical
    bool ill_conditioned_flag = false;
    double min_separation = std::numeric_limits<double>::infinity();
    double spectral_radius = 0.0;
};

[[nodiscard]] inline PencilEig solve_pencil(const Eigen::MatrixXd& S1, const Eigen::MatrixXd& S2, double tol) {
    const Index r = S1.rows();
    if (S1.cols() != r || S2.rows() != r || S2.cols() != r)
        throw DimensionMismatch("solve_pencil: S1 and S2 must be square of equal size");
    if (!S1.allFinite() || !S2.allFinite()) throw NonFiniteInput("solve_pencil: non-finite input");

    const Eigen::VectorXd sv2 = Eigen::JacobiSVD<Eigen::MatrixXd>(S2).singularValues();
    if (sv2(0) == 0.0 || sv2(r - 1) <= tol * sv2(0)) throw SingularPencil("solve_pencil: S2 is numerically singular");

    // M = S1 S2^{-1}  <=>  S2^T M^T = S1^T.
    const Eigen::MatrixXd M = Eigen::PartialPivLU<Eigen::MatrixXd>(S2.transpose()).solve(S1.transpose()).transpose();
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, true);
    if (es.info() != Eigen::Success) throw ConvergenceFailure("solve_pencil: eigensolver did not converge");
    const Eigen::VectorXcd lam = es.eigenvalues();
    const Eigen::MatrixXcd vec = es.eigenvectors();

    PencilEig out;
    out.spectral_radius = lam.cwiseAbs().maxCoeff();
    const double imag_cut = tol * out.spectral_radius;

    Eigen::VectorXd vals(r);
    Eigen::MatrixXd vecs(r, r);
    for (Index i = 0; i < r; ++i) {
        const double im = lam(i).imag();
        if (std::abs(im) > imag_cut)
            throw ComplexEigenvalues("solve_pencil: eigenvalue with imaginary part " + std::to_string(im));
        vals(i) = lam(i).real();
        if (im != 0.0 && i + 1 < r && lam(i + 1) == std::conj(lam(i))) {
            // Truncated conjugate pair: span the real invariant subspace.
            vals(i + 1) = lam(i).real();
            vecs.col(i) = vec.col(i).real();
            vecs.col(i + 1) = vec.col(i).imag();
            ++i;
        } else {
            vecs.col(i) = vec.col(i).real();
        }
    }
    for (Index j = 0; j < r; ++j) {
        const double n = vecs.col(j).norm();
        if (n > 0.0) vecs.col(j) /= n;
        canonical_sign(vecs.col(j));
    }

    std::vector<Index> order(static_cast<std::size_t>(r));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return vals(a) > vals(b); });
    out.eigenvalues.resize(r);
    out.eigenvectors.resize(r, r);
    for (Index j = 0; j < r; ++j) {
        out.eigenvalues(j) = vals(order[static_cast<std::size_t>(j)]);
        out.eigenvectors.col(j) = vecs.col(order[static_cast<std::size_t>(j)]);
    }
    for (Index j = 0; j + 1 < r; ++j)
        out.min_separation = std::min(out.min_separation, out.eigenvalues(j) - out.eigenvalues(j + 1));
    out.ill_conditioned_flag = r > 1 && out.min_separation < tol * out.spectral_radius;
    return out;
}

}  // namespace pencilbench
