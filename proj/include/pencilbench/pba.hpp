// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>

#include "pencilbench/errors.hpp"
#include "pencilbench/linalg.hpp"
#include "pencilbench/random.hpp"
#include "pencilbench/tensor.hpp"

namespace pencilbench {

enum class ProjectionStrategy { RandomOrthonormal, HosvdLeadingTwo, Fixed };

struct PbaConfig {
    Index rank = 1;
    ProjectionStrategy projection_strategy = ProjectionStrategy::HosvdLeadingTwo;
    Eigen::MatrixXd fixed_q;  // n3 x 2, used with ProjectionStrategy::Fixed
    int max_projection_retries = 5;
    double pencil_tol = 1e-10;
    std::uint64_t seed = 0;
};

struct PbaReport {
    Cpd cpd;
    Eigen::MatrixXd projection_used;
    int retries_used = 0;
    double backward_residual = 0.0;  // ||t - reconstruct(cpd)|| / ||t||
    double pencil_separation = 0.0;
};

/// n3 x 2 matrix with orthonormal columns for the contraction step.
[[nodiscard]] inline Eigen::MatrixXd choose_projection(const Tensor3& t, ProjectionStrategy strategy, Rng& rng,
                                                       const Eigen::MatrixXd& fixed_q = {}) {
    const Index n3 = t.dim(2);
    if (n3 < 2) throw InvalidArgument("choose_projection: n3 must be >= 2");
    switch (strategy) {
        case ProjectionStrategy::RandomOrthonormal:
            return orthonormalize(rng.gaussian(n3, 2));
        case ProjectionStrategy::HosvdLeadingTwo:
            return leading_left_singular_vectors(flatten(t, 3), 2);
        case ProjectionStrategy::Fixed:
            if (fixed_q.rows() != n3 || fixed_q.cols() != 2)
                throw DimensionMismatch("choose_projection: fixed Q must be n3 x 2");
            if ((fixed_q.transpose() * fixed_q - Eigen::Matrix2d::Identity()).norm() > 1e-10)
                throw InvalidArgument("choose_projection: fixed Q does not have orthonormal columns");
            return fixed_q;
    }
    throw InvalidArgument("choose_projection: unknown strategy");
}

struct Compression {
    Eigen::MatrixXd Q1;  // n1 x r
    Eigen::MatrixXd Q2;  // n2 x r
    Tensor3 core;        // r x r x 2
};

namespace detail {

inline Eigen::MatrixXd truncated_basis(const Eigen::MatrixXd& F, Index r, const char* what) {
    const SvdResult s = svd(F);
    if (s.sigma.size() < r || s.sigma(0) == 0.0 || s.sigma(r - 1) <= 1e-8 * s.sigma(0))
        throw DegenerateCompression(std::string("st_hosvd_compress: ") + what + " has numerical rank < " +
                                    std::to_string(r));
    return s.U.leftCols(r);
}

}  // namespace detail

/// Sequentially truncated HOSVD to multilinear rank (r, r, 2): mode 1 first, then mode 2.
[[nodiscard]] inline Compression st_hosvd_compress(const Tensor3& b, Index r) {
    const Index n1 = b.dim(0), n2 = b.dim(1), n3 = b.dim(2);
    if (r < 1 || r > std::min(n1, n2)) throw RankTooLarge("st_hosvd_compress: r exceeds dims " + to_string(b.dims()));
    Compression c;
    c.Q1 = detail::truncated_basis(flatten(b, 1), r, "mode-1 flattening");
    const Eigen::MatrixXd I2 = Eigen::MatrixXd::Identity(n2, n2), I3 = Eigen::MatrixXd::Identity(n3, n3);
    const Tensor3 b1 = multilinear_multiply(c.Q1.transpose(), I2, I3, b);
    c.Q2 = detail::truncated_basis(flatten(b1, 2), r, "mode-2 flattening");
    c.core = multilinear_multiply(Eigen::MatrixXd::Identity(r, r), c.Q2.transpose(), I3, b1);
    return c;
}

/// Best rank-1 split of a length n2*n3 vector viewed as an n2 x n3 matrix:
/// b unit and sign-canonical, magnitude on c.
[[nodiscard]] inline std::pair<Eigen::VectorXd, Eigen::VectorXd> split_rank1_column(const Eigen::VectorXd& w, Index n2,
                                                                                   Index n3) {
    if (w.size() != n2 * n3) throw DimensionMismatch("split_rank1_column: length is not n2*n3");
    if (w.squaredNorm() == 0.0) throw ZeroInput("split_rank1_column: zero column");
    const Eigen::MatrixXd W = Eigen::Map<const RowMajorMatrix>(w.data(), n2, n3);
    const SvdResult s = svd(W);
    return {s.U.col(0), s.sigma(0) * s.V.col(0)};
}

namespace detail {

inline PbaReport pba_attempt(const Tensor3& t, Index r, const Eigen::MatrixXd& Q, double tol) {
    const Index n1 = t.dim(0), n2 = t.dim(1), n3 = t.dim(2);
    // S1: contract the third mode.
    const Tensor3 B = multilinear_multiply(Eigen::MatrixXd::Identity(n1, n1), Eigen::MatrixXd::Identity(n2, n2),
                                           Q.transpose(), t);
    const Compression comp = st_hosvd_compress(B, r);
    const Eigen::MatrixXd S = flatten(comp.core, 3);  // row k is vec of slice k, row-major r x r
    const Eigen::MatrixXd S1 = Eigen::Map<const RowMajorMatrix>(S.row(0).eval().data(), r, r);
    const Eigen::MatrixXd S2 = Eigen::Map<const RowMajorMatrix>(S.row(1).eval().data(), r, r);

    // S2: eigenvectors of the pencil give the first factor.
    const PencilEig eig = solve_pencil(S1, S2, tol);
    Eigen::MatrixXd A = comp.Q1 * eig.eigenvectors;
    for (Index i = 0; i < r; ++i) {
        const double n = A.col(i).norm();
        if (n == 0.0) throw SingularPencil("pba: zero recovered factor column");
        A.col(i) /= n;
        canonical_sign(A.col(i));
    }

    // S3: the remaining factors from A^+ t_(1).
    const Eigen::MatrixXd W = pseudoinverse(A) * flatten(t, 1);  // r x (n2 n3)
    std::vector<Rank1Term> terms;
    terms.reserve(static_cast<std::size_t>(r));
    for (Index i = 0; i < r; ++i) {
        auto [b, c] = split_rank1_column(W.row(i).transpose(), n2, n3);
        terms.push_back(Rank1Term{A.col(i), std::move(b), std::move(c)});
    }

    // S4: assemble.
    PbaReport rep;
    rep.cpd = Cpd(std::move(terms));
    rep.projection_used = Q;
    rep.pencil_separation = eig.min_separation;
    Tensor3 res = t;
    res -= reconstruct(rep.cpd);
    rep.backward_residual = res.norm() / t.norm();
    return rep;
}

}  // namespace detail

[[nodiscard]] inline PbaReport pba_decompose(const Tensor3& t, const PbaConfig& cfg) {
    const Index n1 = t.dim(0), n2 = t.dim(1), n3 = t.dim(2), r = cfg.rank;
    if (r < 1) throw InvalidArgument("pba_decompose: rank must be >= 1");
    if (r > n2) throw RankTooLarge("pba_decompose: rank " + std::to_string(r) + " exceeds n2 = " + std::to_string(n2));
    if (n2 > n1) throw DimensionMismatch("pba_decompose: requires n2 <= n1");
    if (n3 < 2) throw DimensionMismatch("pba_decompose: requires n3 >= 2");
    if (cfg.max_projection_retries < 0) throw InvalidArgument("pba_decompose: negative retry count");
    if (t.norm() == 0.0) throw ZeroInput("pba_decompose: zero tensor");

    Rng rng(cfg.seed);
    Eigen::MatrixXd Q = choose_projection(t, cfg.projection_strategy, rng, cfg.fixed_q);
    for (int attempt = 0;; ++attempt) {
        try {
            PbaReport rep = detail::pba_attempt(t, r, Q, cfg.pencil_tol);
            rep.retries_used = attempt;
            return rep;
        } catch (const SingularPencil& e) {
            if (attempt >= cfg.max_projection_retries)
                throw RetriesExhausted(std::string("pba_decompose: ") + e.what());
        } catch (const ComplexEigenvalues& e) {
            if (attempt >= cfg.max_projection_retries)
                throw RetriesExhausted(std::string("pba_decompose: ") + e.what());
        }
        Q = choose_projection(t, ProjectionStrategy::RandomOrthonormal, rng);
    }
}

}  // namespace pencilbench
