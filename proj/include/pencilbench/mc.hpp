// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

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

enum class Sampling { GaussianAll, OrthonormalAB_GaussianC };

struct McConfig {
    Dims dims{};
    Index rank = 1;
    Index trials = 1;
    Sampling sampling = Sampling::GaussianAll;
    std::uint64_t master_seed = 0;
    std::vector<double> alpha_grid{2.0, 4.0, 8.0};
    unsigned threads = 0;

    void validate() const {
        if (trials < 1) throw InvalidArgument("McConfig: trials must be >= 1");
        if (rank < 1 || rank > dims[1]) throw RankTooLarge("McConfig: requires 1 <= r <= n2");
        if (dims[0] < 1 || dims[1] < 1 || dims[2] < 2) throw InvalidArgument("McConfig: invalid dims " + to_string(dims));
    }
};

/// Factors drawn in the order A, B, C, column-major.
[[nodiscard]] inline Cpd sample_cpd(const Dims& dims, Index r, Sampling sampling, Rng& rng) {
    Eigen::MatrixXd A = rng.gaussian(dims[0], r);
    Eigen::MatrixXd B = rng.gaussian(dims[1], r);
    const Eigen::MatrixXd C = rng.gaussian(dims[2], r);
    if (sampling == Sampling::OrthonormalAB_GaussianC) {
        if (r > std::min(dims[0], dims[1])) throw RankTooLarge("sample_cpd: r exceeds min(n1, n2)");
        A = orthonormalize(A);
        B = orthonormalize(B);
    }
    return Cpd::from_factors(A, B, C);
}

/// Empirical ccdf of a sample; +inf samples exceed every threshold.
struct CcdfSeries {
    std::vector<double> samples;  // ascending
    Index censored = 0;           // trials excluded from the sample

    [[nodiscard]] Index count() const noexcept { return static_cast<Index>(samples.size()); }

    /// #(samples > x) / count
    [[nodiscard]] double ccdf(double x) const {
        if (samples.empty()) return 0.0;
        const auto it = std::upper_bound(samples.begin(), samples.end(), x);
        return static_cast<double>(samples.end() - it) / static_cast<double>(samples.size());
    }

    /// #(samples >= x) / count
    [[nodiscard]] double tail_at_least(double x) const {
        if (samples.empty()) return 0.0;
        const auto it = std::lower_bound(samples.begin(), samples.end(), x);
        return static_cast<double>(samples.end() - it) / static_cast<double>(samples.size());
    }

    static CcdfSeries from(std::vector<double> values, Index censored = 0) {
        CcdfSeries s;
        s.samples = std::move(values);
        std::sort(s.samples.begin(), s.samples.end());
        s.censored = censored;
        return s;
    }
};

/// Abscissa of the limiting bound: x = alpha * r^{2/(m3-1)}.
[[nodiscard]] inline double bound_abscissa(double alpha, Index r, Index m3) {
    return alpha * std::pow(static_cast<double>(r), 2.0 / static_cast<double>(m3 - 1));
}

struct BoundPoint {
    double alpha = 0.0;
    double x = 0.0;
    double bound = 0.0;
    double empirical = 0.0;  // P[kappa >= x]
};

struct KappaCcdf {
    std::vector<double> kappa;  // by trial index
    CcdfSeries series;
    std::vector<BoundPoint> bound;
};

[[nodiscard]] inline KappaCcdf run_kappa_ccdf(const McConfig& cfg) {
    cfg.validate();
    KappaCcdf out;
    out.kappa = parallel_map<double>(static_cast<std::size_t>(cfg.trials), cfg.threads, [&](std::size_t i) {
        Rng rng(mix_seed(cfg.master_seed, i));
        const Cpd cpd = sample_cpd(cfg.dims, cfg.rank, cfg.sampling, rng);
        return condition_number(cpd, kKappaOnly).kappa;
    });
    out.series = CcdfSeries::from(out.kappa);
    for (double a : cfg.alpha_grid) {
        const double x = bound_abscissa(a, cfg.rank, cfg.dims[2]);
        out.bound.push_back({a, x, limiting_ccdf(static_cast<int>(cfg.dims[2]), a), out.series.tail_at_least(x)});
    }
    return out;
}

enum class FeSolver { PbaRandom, PbaHosvd, PbaPlusAls };

struct FeTrial {
    bool ok = false;
    double forward_error = std::numeric_limits<double>::quiet_NaN();
    double omega = std::numeric_limits<double>::quiet_NaN();
    double kappa = std::numeric_limits<double>::quiet_NaN();
    double tensor_norm = std::numeric_limits<double>::quiet_NaN();
};

struct ForwardErrorCcdf {
    std::vector<FeTrial> trials;  // by trial index
    CcdfSeries forward_error;     // failed trials censored
    CcdfSeries omega;             // failed or infinite-kappa trials censored
};

[[nodiscard]] inline ForwardErrorCcdf run_forward_error_ccdf(const McConfig& cfg, FeSolver solver) {
    cfg.validate();
    ForwardErrorCcdf out;
    out.trials = parallel_map<FeTrial>(static_cast<std::size_t>(cfg.trials), cfg.threads, [&](std::size_t i) {
        const std::uint64_t seed = mix_seed(cfg.master_seed, i);
        Rng rng(seed);
        const Cpd ref = sample_cpd(cfg.dims, cfg.rank, cfg.sampling, rng);
        const Tensor3 t = reconstruct(ref);
        FeTrial tr;
        tr.tensor_norm = t.norm();
        tr.kappa = condition_number(ref, kKappaOnly).kappa;
        PbaConfig pc;
        pc.rank = cfg.rank;
        pc.projection_strategy =
            solver == FeSolver::PbaRandom ? ProjectionStrategy::RandomOrthonormal : ProjectionStrategy::HosvdLeadingTwo;
        pc.seed = splitmix64(seed);
        try {
            Cpd computed = pba_decompose(t, pc).cpd;
            if (solver == FeSolver::PbaPlusAls) computed = als_refine(t, computed).cpd;
            tr.forward_error = forward_error(ref, computed).forward_error;
            tr.ok = std::isfinite(tr.forward_error);
            if (tr.ok && std::isfinite(tr.kappa))
                tr.omega = excess_factor(tr.forward_error, tr.kappa, representation_backward_norm(t));
        } catch (const Error&) {
            tr.ok = false;
        }
        return tr;
    });
    std::vector<double> fe, om;
    for (const auto& tr : out.trials) {
        if (tr.ok) fe.push_back(tr.forward_error);
        if (tr.ok && std::isfinite(tr.omega)) om.push_back(tr.omega);
    }
    const Index fe_censored = cfg.trials - static_cast<Index>(fe.size());
    const Index om_censored = cfg.trials - static_cast<Index>(om.size());
    out.forward_error = CcdfSeries::from(std::move(fe), fe_censored);
    out.omega = CcdfSeries::from(std::move(om), om_censored);
    return out;
}

}  // namespace pencilbench
