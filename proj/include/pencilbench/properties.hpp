// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "pencilbench/conditioning.hpp"
#include "pencilbench/errors.hpp"
#include "pencilbench/linalg.hpp"
#include "pencilbench/mc.hpp"
#include "pencilbench/metrics.hpp"
#include "pencilbench/parallel.hpp"
#include "pencilbench/pba.hpp"
#include "pencilbench/random.hpp"
#include "pencilbench/refine.hpp"

namespace pencilbench {

struct CheckReport {
    std::string name;
    Index trials = 0;
    Index failures = 0;
    Index errors = 0;  // solver failures; not counted as violations
    double worst_margin = std::numeric_limits<double>::infinity();
};

namespace detail {

struct TrialOutcome {
    bool error = false;
    double margin = 0.0;
};

inline CheckReport summarize(std::string name, const std::vector<TrialOutcome>& out) {
    CheckReport rep;
    rep.name = std::move(name);
    rep.trials = static_cast<Index>(out.size());
    for (const auto& o : out) {
        if (o.error) {
            ++rep.errors;
            continue;
        }
        if (o.margin < 0.0) ++rep.failures;
        rep.worst_margin = std::min(rep.worst_margin, o.margin);
    }
    return rep;
}

inline Eigen::MatrixXd unit_columns(Eigen::MatrixXd M) {
    for (Index i = 0; i < M.cols(); ++i) M.col(i).normalize();
    return M;
}

/// min over permutations of ||A - At P||_F (brute force).
inline double permuted_distance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& At) {
    return match_terms(A, At, MatchMethod::BruteForce).forward_error;
}

}  // namespace detail

struct NodecreaseParams {
    Dims dims{6, 5, 4};
    Index rank = 3;
    double nu = 0.01;
    Index trials = 1000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

/// The decomposition of A⊙B⊙C cannot be approached by any Ã⊙B̃⊙C̃ closer than
/// sqrt(3/4)(1-nu) delta, delta being the matching distance between A and Ã.
/// Even trials use the best competitor for B̃, C̃; odd trials use Gaussian ones.
/// Margin = lhs - bound, with 1e-9 slack.
[[nodiscard]] inline CheckReport check_nodecrease(const NodecreaseParams& p) {
    if (p.rank > 7) throw InvalidArgument("check_nodecrease: BruteForce matching needs r <= 7");
    if (!(p.nu > 0.0 && p.nu <= 0.05)) throw InvalidArgument("check_nodecrease: nu must lie in (0, 0.05]");
    const auto [n1, n2, n3] = p.dims;
    const Index r = p.rank;
    auto out = parallel_map<detail::TrialOutcome>(static_cast<std::size_t>(p.trials), p.threads, [&](std::size_t i) {
        Rng rng(mix_seed(p.seed, i));
        const Eigen::MatrixXd Ap = orthonormalize(rng.gaussian(n1, r));
        // Perturb, then renormalize; the normalization at most doubles the perturbation.
        Eigen::MatrixXd E = rng.gaussian(n1, r);
        E *= 0.25 * p.nu * rng.uniform() / E.norm();
        const Eigen::MatrixXd A = detail::unit_columns(Ap + E);

        Eigen::MatrixXd B = detail::unit_columns(rng.gaussian(n2, r));
        Eigen::MatrixXd C = detail::unit_columns(rng.gaussian(n3, r));
        for (Index j = 0; j < r; ++j) C.col(j) *= rng.uniform(1.0 - p.nu, 2.0);

        // Ã: permuted A plus a perturbation of random size, unit columns.
        std::vector<Index> sigma(static_cast<std::size_t>(r));
        std::iota(sigma.begin(), sigma.end(), Index{0});
        std::shuffle(sigma.begin(), sigma.end(), rng.engine());
        Eigen::MatrixXd At(n1, r);
        for (Index j = 0; j < r; ++j) At.col(j) = A.col(sigma[static_cast<std::size_t>(j)]);
        Eigen::MatrixXd F = rng.gaussian(n1, r);
        At = detail::unit_columns(At + (rng.uniform(0.0, 0.6) / F.norm()) * F);
        const double delta = detail::permuted_distance(A, At);

        // Hypotheses of the inequality.
        if ((A - Ap).norm() > p.nu || !(delta < 1.0)) throw Error("check_nodecrease: construction failure");
        for (Index j = 0; j < r; ++j)
            if (B.col(j).norm() * C.col(j).norm() < 1.0 - p.nu) throw Error("check_nodecrease: construction failure");

        Eigen::MatrixXd Bt(n2, r), Ct(n3, r);
        if (i % 2 == 0) {
            const MatchResult m = match_terms(A, At, MatchMethod::BruteForce);
            for (Index j = 0; j < r; ++j) {
                const Index q = m.permutation[static_cast<std::size_t>(j)];
                Bt.col(q) = B.col(j);
                Ct.col(q) = At.col(q).dot(A.col(j)) * C.col(j);
            }
        } else {
            Bt = rng.gaussian(n2, r);
            Ct = rng.gaussian(n3, r);
        }
        const double lhs = match_terms(khatri_rao(khatri_rao(A, B), C), khatri_rao(khatri_rao(At, Bt), Ct),
                                       MatchMethod::BruteForce)
                               .forward_error;
        return detail::TrialOutcome{false, lhs - (std::sqrt(0.75) * (1.0 - p.nu) * delta - 1e-9)};
    });
    return detail::summarize("nodecrease", out);
}

struct PairBoundParams {
    std::vector<Dims> dims{{4, 3, 2}, {5, 4, 3}, {6, 5, 4}, {7, 6, 5}, {8, 6, 3}};
    Index rank = 5;
    Index trials = 1000;  // split round-robin over dims
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

/// kappa >= pair_lower_bound - 1e-9 on random CPDs.
[[nodiscard]] inline CheckReport check_pair_bound(const PairBoundParams& p) {
    auto out = parallel_map<detail::TrialOutcome>(static_cast<std::size_t>(p.trials), p.threads, [&](std::size_t i) {
        Rng rng(mix_seed(p.seed, i));
        const Dims& d = p.dims[i % p.dims.size()];
        const Index r = std::min<Index>(p.rank, d[1]);
        const Cpd cpd = sample_cpd(d, r, Sampling::GaussianAll, rng);
        const ConditionReport c = condition_number(cpd, kKappaOnly);
        if (std::isinf(c.kappa)) return detail::TrialOutcome{false, std::numeric_limits<double>::infinity()};
        return detail::TrialOutcome{false, c.kappa - c.pair_lower_bound + 1e-9};
    });
    return detail::summarize("pair_lower_bound", out);
}

struct KruskalParams {
    Dims dims{5, 4, 3};
    Index rank = 3;
    Index trials = 100;
    int restarts = 5;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

/// CPDs satisfying Kruskal's criterion are recovered identically from several
/// random starts of PBA + ALS. Margin = 1e-6 - max relative forward error.
[[nodiscard]] inline CheckReport check_kruskal_implies_identifiable_numerically(const KruskalParams& p) {
    if (p.rank > 5) throw InvalidArgument("check_kruskal: intended for r <= 5");
    auto out = parallel_map<detail::TrialOutcome>(static_cast<std::size_t>(p.trials), p.threads, [&](std::size_t i) {
        Rng rng(mix_seed(p.seed, i));
        Cpd ref;
        for (int tries = 0;; ++tries) {
            if (tries == 100) throw Error("check_kruskal: no instance satisfying Kruskal's criterion");
            ref = sample_cpd(p.dims, p.rank, Sampling::GaussianAll, rng);
            const Index ka = kruskal_rank(ref.A()), kb = kruskal_rank(ref.B()), kc = kruskal_rank(ref.C());
            // Rank one is unique without the criterion, which it never meets.
            if (p.rank == 1 || 2 * p.rank + 2 <= ka + kb + kc) break;
        }
        const Tensor3 t = reconstruct(ref);
        const MatchMethod method = p.rank <= 8 ? MatchMethod::BruteForce : MatchMethod::HeuristicLsq;
        double worst = 0.0;
        try {
            for (int s = 0; s < p.restarts; ++s) {
                PbaConfig cfg;
                cfg.rank = p.rank;
                cfg.projection_strategy = ProjectionStrategy::RandomOrthonormal;
                cfg.seed = mix_seed(rng.next_u64(), static_cast<std::uint64_t>(s));
                const Cpd rec = als_refine(t, pba_decompose(t, cfg).cpd).cpd;
                worst = std::max(worst, forward_error(ref, rec, method).forward_error / t.norm());
            }
        } catch (const Error&) {
            return detail::TrialOutcome{true, 0.0};
        }
        return detail::TrialOutcome{false, 1e-6 - worst};
    });
    return detail::summarize("kruskal_identifiable", out);
}

}  // namespace pencilbench
