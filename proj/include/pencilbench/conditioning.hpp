// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "pencilbench/errors.hpp"
#include "pencilbench/linalg.hpp"
#include "pencilbench/random.hpp"
#include "pencilbench/tensor.hpp"

namespace pencilbench {

/// A family of tangent vectors x ⊗ y ⊗ z in which one mode runs over the columns
/// of `basis` and the other two modes are fixed vectors.
struct TangentFamily {
    int mode = 0;                          // varying mode (0, 1 or 2)
    Eigen::MatrixXd basis;                 // n_mode x p
    std::array<Eigen::VectorXd, 3> fixed;  // fixed[mode] is unused

    [[nodiscard]] Index cols() const noexcept { return basis.cols(); }

    /// Dense column j.
    [[nodiscard]] Eigen::VectorXd column(Index j) const {
        std::array<Eigen::VectorXd, 3> v = fixed;
        v[static_cast<std::size_t>(mode)] = basis.col(j);
        return dense(Rank1Term{v[0], v[1], v[2]}).data();
    }
};

/// Orthonormal basis [I⊗b⊗c, a⊗Q_b⊗c, a⊗b⊗Q_c] of the tangent space to the Segre
/// manifold at a rank-1 term, kept in factored form. a, b, c are normalized and
/// Q_b, Q_c are Householder complements of b and c.
struct TangentFrame {
    std::array<TangentFamily, 3> families;

    explicit TangentFrame(const Rank1Term& term) {
        term.validate();
        const Eigen::VectorXd a = term.a.normalized(), b = term.b.normalized(), c = term.c.normalized();
        families[0] = {0, Eigen::MatrixXd::Identity(a.size(), a.size()), {Eigen::VectorXd(), b, c}};
        families[1] = {1, orthogonal_complement(b), {a, Eigen::VectorXd(), c}};
        families[2] = {2, orthogonal_complement(c), {a, b, Eigen::VectorXd()}};
    }

    [[nodiscard]] Index cols() const noexcept {
        return families[0].cols() + families[1].cols() + families[2].cols();
    }

    [[nodiscard]] Eigen::MatrixXd dense() const {
        const Dims d{families[1].fixed[0].size(), families[0].fixed[1].size(), families[0].fixed[2].size()};
        Eigen::MatrixXd U(d[0] * d[1] * d[2], cols());
        Index j = 0;
        for (const auto& f : families)
            for (Index k = 0; k < f.cols(); ++k) U.col(j++) = f.column(k);
        return U;
    }
};

/// Orthonormal basis of the tangent space at `term`, (n1 n2 n3) x (n1+n2+n3-2).
[[nodiscard]] inline Eigen::MatrixXd tangent_basis(const Rank1Term& term) { return TangentFrame(term).dense(); }

namespace detail {

/// Gram block <F_j, G_k> of two families, using <x⊗y⊗z, x'⊗y'⊗z'> = <x,x'><y,y'><z,z'>.
inline Eigen::MatrixXd family_gram(const TangentFamily& F, const TangentFamily& G) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Ones(F.cols(), G.cols());
    for (int k = 0; k < 3; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        const bool fv = F.mode == k, gv = G.mode == k;
        if (fv && gv) {
            M.array() *= (F.basis.transpose() * G.basis).array();
        } else if (fv) {
            const Eigen::VectorXd w = F.basis.transpose() * G.fixed[ks];
            M.array().colwise() *= w.array();
        } else if (gv) {
            const Eigen::RowVectorXd w = F.fixed[ks].transpose() * G.basis;
            M.array().rowwise() *= w.array();
        } else {
            M *= F.fixed[ks].dot(G.fixed[ks]);
        }
    }
    return M;
}

/// out += x ⊗ y ⊗ z.
inline void accumulate_rank1(Eigen::Ref<Eigen::VectorXd> out, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& z) {
    const Index n2 = y.size(), n3 = z.size();
    for (Index i1 = 0; i1 < x.size(); ++i1) {
        if (x(i1) == 0.0) continue;
        for (Index i2 = 0; i2 < n2; ++i2) out.segment((i1 * n2 + i2) * n3, n3) += (x(i1) * y(i2)) * z;
    }
}

/// Smallest singular value of an upper triangular R by inverse subspace iteration
/// on R^T R with a Rayleigh-Ritz estimate from R X.
inline double inverse_subspace_sigma_min(const Eigen::MatrixXd& R, Index block = 8, int max_iters = 300) {
    const Index n = R.cols();
    const Index p = std::min(n, block);
    Rng rng(0x7E77AC1ULL);
    Eigen::MatrixXd X = orthonormalize(rng.gaussian(n, p));
    const auto U = R.triangularView<Eigen::Upper>();
    double prev = std::numeric_limits<double>::infinity(), s = prev;
    for (int it = 0; it < max_iters; ++it) {
        Eigen::MatrixXd Y = U.transpose().solve(X);
        U.solveInPlace(Y);
        if (!Y.allFinite()) return 0.0;  // exactly singular factor
        // No rank check: the columns are meant to collapse onto the lowest singular directions.
        X = Eigen::HouseholderQR<Eigen::MatrixXd>(Y).householderQ() * Eigen::MatrixXd::Identity(n, p);
        const Eigen::MatrixXd RX = U * X;
        s = Eigen::JacobiSVD<Eigen::MatrixXd>(RX).singularValues()(p - 1);
        if (std::abs(prev - s) <= 1e-13 * s) break;
        prev = s;
    }
    return s;
}

}  // namespace detail

/// The block matrix [U_1 ... U_r] of orthonormal tangent bases.
class TerraciniMatrix {
public:
    explicit TerraciniMatrix(const Cpd& cpd) : dims_(cpd.dims()) {
        frames_.reserve(static_cast<std::size_t>(cpd.rank()));
        for (const auto& t : cpd.terms()) frames_.emplace_back(t);
    }

    [[nodiscard]] Index rows() const noexcept { return dims_[0] * dims_[1] * dims_[2]; }
    [[nodiscard]] Index cols() const noexcept {
        return static_cast<Index>(frames_.size()) * (dims_[0] + dims_[1] + dims_[2] - 2);
    }
    [[nodiscard]] Index rank() const noexcept { return static_cast<Index>(frames_.size()); }

    [[nodiscard]] Eigen::MatrixXd block(Index i) const { return frames_.at(static_cast<std::size_t>(i)).dense(); }

    [[nodiscard]] Eigen::MatrixXd assembled() const {
        Eigen::MatrixXd T(rows(), cols());
        const Index w = dims_[0] + dims_[1] + dims_[2] - 2;
        for (Index i = 0; i < rank(); ++i) T.middleCols(i * w, w) = block(i);
        return T;
    }

    /// T^T T assembled from factored inner products.
    [[nodiscard]] Eigen::MatrixXd gram() const {
        const auto fams = families();
        std::vector<Index> off(fams.size() + 1, 0);
        for (std::size_t f = 0; f < fams.size(); ++f) off[f + 1] = off[f] + fams[f]->cols();
        Eigen::MatrixXd G(cols(), cols());
        for (std::size_t f = 0; f < fams.size(); ++f) {
            for (std::size_t g = f; g < fams.size(); ++g) {
                Eigen::MatrixXd blk = detail::family_gram(*fams[f], *fams[g]);
                G.block(off[f], off[g], blk.rows(), blk.cols()) = blk;
                if (g != f) G.block(off[g], off[f], blk.cols(), blk.rows()) = blk.transpose();
            }
        }
        return G;
    }

    /// T x without assembling T.
    [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
        if (x.size() != cols()) throw DimensionMismatch("TerraciniMatrix::apply: wrong vector length");
        Eigen::VectorXd out = Eigen::VectorXd::Zero(rows());
        Index off = 0;
        for (const auto* f : families()) {
            std::array<Eigen::VectorXd, 3> v = f->fixed;
            v[static_cast<std::size_t>(f->mode)] = f->basis * x.segment(off, f->cols());
            detail::accumulate_rank1(out, v[0], v[1], v[2]);
            off += f->cols();
        }
        return out;
    }

    struct Extremes {
        double sigma_min = 0.0;
        double sigma_max = 0.0;
    };

    /// Smallest singular value. A Cholesky factor of the Gram is used when that is
    /// safely conditioned, otherwise the triangular factor of a QR of T itself, which
    /// keeps sigma_min accurate down to roundoff level.
    [[nodiscard]] double sigma_min() const {
        const Index n = cols();
        if (n == 0) return 0.0;
        if (n > rows()) return 0.0;
        const Eigen::MatrixXd G = gram();
        const Eigen::LLT<Eigen::MatrixXd> llt(G);
        if (llt.info() == Eigen::Success) {
            const Eigen::MatrixXd R = llt.matrixU();
            const double s = detail::inverse_subspace_sigma_min(R);
            // Gram rounding perturbs sigma_min^2 by about eps * ||G||, and ||G|| <= r since
            // every block has orthonormal columns: this cut leaves ~1e-10 relative error.
            if (s * s >= 1e-6 * static_cast<double>(rank())) return s;
        }
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(assembled());
        const Eigen::MatrixXd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
        return detail::inverse_subspace_sigma_min(R);
    }

    [[nodiscard]] double sigma_max() const {
        const Index n = cols();
        if (n == 0) return 0.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram(), Eigen::EigenvaluesOnly);
        return std::sqrt(std::max(es.eigenvalues()(n - 1), 0.0));
    }

    [[nodiscard]] Extremes extreme_singular_values() const { return {sigma_min(), sigma_max()}; }

private:
    [[nodiscard]] std::vector<const TangentFamily*> families() const {
        std::vector<const TangentFamily*> out;
        for (const auto& fr : frames_)
            for (const auto& f : fr.families) out.push_back(&f);
        return out;
    }

    Dims dims_;
    std::vector<TangentFrame> frames_;
};

/// Calls fn(indices) for each k-subset of {0..r-1} in lexicographic order until fn
/// returns false. Returns false iff stopped early.
template <typename Fn>
bool for_each_combination(Index r, Index k, Fn&& fn) {
    if (k < 0 || k > r) return true;
    std::vector<Index> idx(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        if (!fn(static_cast<const std::vector<Index>&>(idx))) return false;
        Index i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == r - k + i) --i;
        if (i < 0) return true;
        ++idx[static_cast<std::size_t>(i)];
        for (Index j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

/// C(n, k) saturated at `cap`.
[[nodiscard]] inline double binomial(Index n, Index k, double cap = 1e18) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double b = 1.0;
    for (Index i = 1; i <= k; ++i) {
        b = b * static_cast<double>(n - k + i) / static_cast<double>(i);
        if (b > cap) return cap;
    }
    return std::round(b);
}

inline constexpr double kSubsetBudget = 1e6;

namespace detail {

/// True iff every k-subset of columns has smallest singular value > tol * sigma_max(M).
inline bool all_subsets_independent(const Eigen::MatrixXd& M, Index k, double tol, double sigma_max) {
    if (k == 0) return true;
    if (k > M.rows()) return false;
    if (binomial(M.cols(), k) > kSubsetBudget)
        throw CombinatorialBudgetExceeded("subset enumeration C(" + std::to_string(M.cols()) + "," +
                                          std::to_string(k) + ") exceeds budget");
    const double cut = tol * sigma_max;
    Eigen::MatrixXd S(M.rows(), k);
    return for_each_combination(M.cols(), k, [&](const std::vector<Index>& idx) {
        for (Index j = 0; j < k; ++j) S.col(j) = M.col(idx[static_cast<std::size_t>(j)]);
        const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(S).singularValues();
        return sv(k - 1) > cut;
    });
}

}  // namespace detail

/// Largest k such that every k columns of M are numerically independent.
[[nodiscard]] inline Index kruskal_rank(const Eigen::MatrixXd& M, double tol = 1e-10) {
    if (M.cols() == 0 || M.rows() == 0) return 0;
    const double smax = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
    if (smax == 0.0) return 0;
    // Independence of all k-subsets implies it for all smaller subsets: search downward.
    for (Index k = std::min(M.rows(), M.cols()); k >= 1; --k)
        if (detail::all_subsets_independent(M, k, tol, smax)) return k;
    return 0;
}

/// Every min(r, n)-subset of the columns is linearly independent.
[[nodiscard]] inline bool general_linear_position(const Eigen::MatrixXd& P, double tol = 1e-10) {
    if (P.cols() == 0) return true;
    const double smax = Eigen::JacobiSVD<Eigen::MatrixXd>(P).singularValues()(0);
    if (smax == 0.0) return false;
    return detail::all_subsets_independent(P, std::min(P.rows(), P.cols()), tol, smax);
}

/// max_{i != j} 1 / sqrt(1 - |<c_i, c_j>|) over normalized third factors; 1 when r < 2.
[[nodiscard]] inline double pair_lower_bound(const Cpd& cpd) {
    if (cpd.rank() < 2) return 1.0;
    Eigen::MatrixXd C = cpd.C();
    for (Index i = 0; i < C.cols(); ++i) {
        const double n = C.col(i).norm();
        if (n == 0.0) throw ZeroInput("pair_lower_bound: zero c-vector");
        C.col(i) /= n;
    }
    double best = 1.0;
    for (Index i = 0; i < C.cols(); ++i)
        for (Index j = i + 1; j < C.cols(); ++j) {
            const double gap = 1.0 - std::min(1.0, std::abs(C.col(i).dot(C.col(j))));
            if (gap <= 1e-14) return std::numeric_limits<double>::infinity();
            best = std::max(best, 1.0 / std::sqrt(gap));
        }
    return best;
}

struct RNiceReport {
    bool sglp_ok = false;
    bool kruskal_identifiable = false;
    bool entry_nonzero_ok = false;
    bool kappa_finite = false;
    static constexpr const char* smooth_point = "untested";
};

struct ConditionReport {
    double kappa = std::numeric_limits<double>::infinity();
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    double pair_lower_bound = 1.0;
    std::array<Index, 3> kruskal_ranks{0, 0, 0};
    bool kruskal_identifiable = false;
    bool sglp_ok = false;
    bool entry_nonzero_ok = false;
    bool diagnostics = false;  // false when only kappa/sigma/pair bound were computed
};

struct ConditionOptions {
    double inf_threshold = 1e12;
    /// sigma_max needs a full Gram spectrum; NaN in the report when off.
    bool sigma_max = true;
    /// Kruskal ranks, SGLP and leading-entry checks; these enumerate column subsets.
    bool diagnostics = true;
};

/// Just kappa and sigma_min, for experiments that evaluate many decompositions.
inline constexpr ConditionOptions kKappaOnly{.inf_threshold = 1e12, .sigma_max = false, .diagnostics = false};

namespace detail {

inline Eigen::MatrixXd khatri_rao3(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C) {
    return khatri_rao(khatri_rao(A, B), C);
}

inline bool sglp(const Cpd& cpd) {
    const Eigen::MatrixXd A = cpd.A(), B = cpd.B(), C = cpd.C();
    for (const Eigen::MatrixXd* P : {&A, &B, &C})
        if (!general_linear_position(*P)) return false;
    return general_linear_position(khatri_rao(A, B)) && general_linear_position(khatri_rao(A, C)) &&
           general_linear_position(khatri_rao(B, C)) && general_linear_position(khatri_rao3(A, B, C));
}

inline bool entries_nonzero(const Cpd& cpd) {
    return std::all_of(cpd.terms().begin(), cpd.terms().end(),
                       [](const Rank1Term& t) { return t.a(0) * t.b(0) * t.c(0) != 0.0; });
}

}  // namespace detail

/// kappa = 1 / sigma_min([U_1 ... U_r]); reported as +inf above opts.inf_threshold.
[[nodiscard]] inline ConditionReport condition_number(const Cpd& cpd, const ConditionOptions& opts = {}) {
    cpd.validate();
    ConditionReport rep;
    const TerraciniMatrix T(cpd);
    rep.sigma_min = T.sigma_min();
    rep.sigma_max = opts.sigma_max ? T.sigma_max() : std::nan("");
    rep.kappa = (rep.sigma_min > 0.0 && 1.0 / rep.sigma_min <= opts.inf_threshold)
                    ? 1.0 / rep.sigma_min
                    : std::numeric_limits<double>::infinity();
    rep.pair_lower_bound = pair_lower_bound(cpd);
    if (opts.diagnostics) {
        rep.diagnostics = true;
        rep.kruskal_ranks = {kruskal_rank(cpd.A()), kruskal_rank(cpd.B()), kruskal_rank(cpd.C())};
        const auto& k = rep.kruskal_ranks;
        rep.kruskal_identifiable = k[0] > 1 && k[1] > 1 && k[2] > 1 && 2 * cpd.rank() <= k[0] + k[1] + k[2] - 2;
        rep.sglp_ok = detail::sglp(cpd);
        rep.entry_nonzero_ok = detail::entries_nonzero(cpd);
    }
    return rep;
}

[[nodiscard]] inline double condition_number(const Cpd& cpd, double inf_threshold) {
    ConditionOptions o = kKappaOnly;
    o.inf_threshold = inf_threshold;
    return condition_number(cpd, o).kappa;
}

/// Checkable conditions of r-niceness; the smooth-point condition is not decided.
[[nodiscard]] inline RNiceReport check_r_nice(const Cpd& cpd, double inf_threshold = 1e12) {
    const ConditionReport c = condition_number(cpd, ConditionOptions{.inf_threshold = inf_threshold, .sigma_max = false});
    RNiceReport r;
    r.sglp_ok = c.sglp_ok;
    r.kruskal_identifiable = c.kruskal_identifiable;
    r.entry_nonzero_ok = c.entry_nonzero_ok;
    r.kappa_finite = c.sigma_min > 1.0 / inf_threshold;
    return r;
}

/// Limit as r -> inf of the lower bound on P[kappa >= alpha r^{2/(m3-1)}]:
/// 1 - exp(-K alpha^{1-m3}), K = 2^{(m3-5)/2} / sqrt(pi) * Gamma(m3/2) / Gamma((m3+1)/2).
[[nodiscard]] inline double limiting_ccdf_constant(int m3) {
    if (m3 < 2) throw InvalidArgument("limiting_ccdf: m3 must be >= 2");
    const double half = 0.5 * m3;
    return std::pow(2.0, 0.5 * (m3 - 5)) / std::sqrt(std::numbers::pi) *
           std::exp(std::lgamma(half) - std::lgamma(half + 0.5));
}

[[nodiscard]] inline double limiting_ccdf(int m3, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("limiting_ccdf: alpha must be positive");
    const double K = limiting_ccdf_constant(m3);
    return -std::expm1(-K * std::pow(alpha, 1.0 - m3));
}

}  // namespace pencilbench
