// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pencilbench/best_rank1.hpp"
#include "pencilbench/conditioning.hpp"
#include "pencilbench/errors.hpp"
#include "pencilbench/linalg.hpp"
#include "pencilbench/metrics.hpp"
#include "pencilbench/parallel.hpp"
#include "pencilbench/pba.hpp"
#include "pencilbench/random.hpp"
#include "pencilbench/refine.hpp"
#include "pencilbench/tensor.hpp"

namespace pencilbench {

/// An odeco tensor built to be adversarial for the projection Q.
struct OdecoSpec {
    Dims dims{};
    Index rank = 0;
    std::uint64_t seed = 0;
    Eigen::MatrixXd Q;  // n3 x 2, orthonormal columns

    void validate() const {
        const auto [n1, n2, n3] = dims;
        if (!(n1 >= n2 && n2 >= n3)) throw InvalidArgument("OdecoSpec: requires n1 >= n2 >= n3, got " + to_string(dims));
        // n3 = r + 1 (the 89x29x11, r = 10 experiment) still leaves terms 1..r-1 with
        // parallel projected third factors, which is enough once r >= 3.
        const bool strict = rank >= 1 && n3 > rank + 1;
        const bool boundary = rank >= 3 && n3 == rank + 1;
        if (!strict && !boundary) throw InvalidArgument("OdecoSpec: requires n3 > r + 1 >= 2, or n3 = r + 1 with r >= 3");
        if (Q.rows() != n3 || Q.cols() != 2) throw DimensionMismatch("OdecoSpec: Q must be n3 x 2");
        if ((Q.transpose() * Q - Eigen::Matrix2d::Identity()).norm() > 1e-10)
            throw InvalidArgument("OdecoSpec: Q does not have orthonormal columns");
    }

    /// Spec whose Q is drawn from its own stream of `seed`.
    static OdecoSpec with_random_q(const Dims& dims, Index rank, std::uint64_t seed) {
        if (dims[2] < 2) throw InvalidArgument("OdecoSpec: n3 must be >= 2");
        Rng rng(mix_seed(seed, 0x51ULL));
        return OdecoSpec{dims, rank, seed, orthonormalize(rng.gaussian(dims[2], 2))};
    }
};

[[nodiscard]] inline Cpd make_bad_odeco(const OdecoSpec& spec) {
    spec.validate();
    const auto [n1, n2, n3] = spec.dims;
    const Index r = spec.rank;
    Rng rng(spec.seed);
    const Eigen::MatrixXd A = orthonormalize(rng.gaussian(n1, r));
    const Eigen::MatrixXd B = orthonormalize(rng.gaussian(n2, r));

    // Completion of Q: trailing columns of a Householder QR of [Q | G].
    Eigen::MatrixXd QG(n3, n3);
    QG << spec.Q, rng.gaussian(n3, n3 - 2);
    const Eigen::MatrixXd H = Eigen::HouseholderQR<Eigen::MatrixXd>(QG).householderQ();
    Eigen::MatrixXd U(n3, n3);
    U << H.rightCols(n3 - 2), spec.Q;

    Eigen::MatrixXd D = Eigen::MatrixXd::Identity(n3, r);
    D.array() -= 2.0 / static_cast<double>(n3);
    for (Index i = 1; i < r; ++i) D.col(i) = -D.col(i);
    const Eigen::MatrixXd C = U * D;
    if ((C.transpose() * C - Eigen::MatrixXd::Identity(r, r)).norm() > 1e-12)
        throw Error("make_bad_odeco: third factor lost orthonormality");
    return Cpd::from_factors(A, B, C);
}

struct PerturbedCpd {
    Cpd cpd;
    double epsilon = 0.0;  // max_i ||A_i - O_i||_F
};

struct Rank1Options {
    int max_iters = 500;
    double tol = 1e-14;
};

/// Each term gets a Gaussian perturbation of norm 2^-k and is projected back to rank 1.
[[nodiscard]] inline PerturbedCpd perturb_decomposition(const Cpd& odeco, int k, Rng& rng,
                                                        const Rank1Options& opts = {}) {
    if (k < 1) throw InvalidArgument("perturb_decomposition: k must be >= 1");
    const double scale = std::ldexp(1.0, -k);
    PerturbedCpd out;
    std::vector<Rank1Term> terms;
    for (Index i = 0; i < odeco.rank(); ++i) {
        const Tensor3 O = dense(odeco.term(i));
        Eigen::VectorXd X = rng.gaussian(O.size());
        Tensor3 P(O.dims(), O.data() + (scale / X.norm()) * X);
        const Rank1Fit fit = best_rank1(P, opts.max_iters, opts.tol);
        if (!fit.converged)
            throw ConvergenceFailure("perturb_decomposition: best_rank1 did not converge at k=" + std::to_string(k) +
                                     ", term " + std::to_string(i));
        Tensor3 diff = dense(fit.term);
        diff -= O;
        out.epsilon = std::max(out.epsilon, diff.norm());
        terms.push_back(fit.term);
    }
    out.cpd = Cpd(std::move(terms));
    return out;
}

struct SweepRow {
    int k = 0;
    double epsilon_k = 0.0;
    double pba_forward_error = 0.0;
    double refined_forward_error = 0.0;  // NaN without refinement
    double omega = 0.0;
};

struct SweepOptions {
    bool refine = true;
    unsigned threads = 0;
    Rank1Options rank1{};
    AlsConfig als{};
};

[[nodiscard]] inline std::vector<SweepRow> adversarial_sweep(const OdecoSpec& spec, int kmin, int kmax,
                                                             const SweepOptions& opts = {}) {
    if (kmin < 1 || kmax < kmin) throw InvalidArgument("adversarial_sweep: invalid k range");
    const Cpd odeco = make_bad_odeco(spec);
    const auto n = static_cast<std::size_t>(kmax - kmin + 1);
    return parallel_map<SweepRow>(n, opts.threads, [&](std::size_t idx) {
        const int k = kmin + static_cast<int>(idx);
        Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(k)));
        const PerturbedCpd ref = perturb_decomposition(odeco, k, rng, opts.rank1);
        const Tensor3 t = reconstruct(ref.cpd);

        PbaConfig cfg;
        cfg.rank = spec.rank;
        cfg.projection_strategy = ProjectionStrategy::Fixed;
        cfg.fixed_q = spec.Q;
        cfg.max_projection_retries = 0;  // the projection is the object under test
        cfg.seed = mix_seed(spec.seed, 0x5EEDULL + static_cast<std::uint64_t>(k));
        const PbaReport pba = pba_decompose(t, cfg);

        SweepRow row;
        row.k = k;
        row.epsilon_k = ref.epsilon;
        row.pba_forward_error = forward_error(ref.cpd, pba.cpd).forward_error;
        row.refined_forward_error = std::nan("");
        if (opts.refine)
            row.refined_forward_error = forward_error(ref.cpd, als_refine(t, pba.cpd, opts.als).cpd).forward_error;
        const double kappa = condition_number(ref.cpd, kKappaOnly).kappa;
        row.omega = std::isfinite(kappa) ? excess_factor(row.pba_forward_error, kappa, representation_backward_norm(t))
                                         : std::nan("");
        return row;
    });
}

struct PowerLaw {
    double coefficient = 0.0;
    double exponent = 0.0;
};

/// Least squares on (log x, log y): y ~ coefficient * x^exponent.
[[nodiscard]] inline PowerLaw fit_powerlaw(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw InvalidArgument("fit_powerlaw: need at least 2 points");
    Eigen::MatrixXd X(static_cast<Index>(points.size()), 2);
    Eigen::VectorXd y(static_cast<Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto [px, py] = points[i];
        if (!(px > 0.0) || !(py > 0.0) || !std::isfinite(px) || !std::isfinite(py))
            throw InvalidArgument("fit_powerlaw: data must be positive and finite");
        X(static_cast<Index>(i), 0) = 1.0;
        X(static_cast<Index>(i), 1) = std::log(px);
        y(static_cast<Index>(i)) = std::log(py);
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < 2) throw InvalidArgument("fit_powerlaw: degenerate abscissae");
    const Eigen::Vector2d beta = qr.solve(y);
    return {std::exp(beta(0)), beta(1)};
}

}  // namespace pencilbench
