// Independent reference implementations used by the tests. They deliberately
// avoid the library's kernels: plain loops, dense matrices, textbook SVDs.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "pencilbench/tensor.hpp"

namespace oracle {

using pencilbench::Cpd;
using pencilbench::Index;
using pencilbench::Rank1Term;
using pencilbench::Tensor3;

inline Tensor3 reconstruct(const Cpd& cpd) {
    const auto d = cpd.dims();
    Tensor3 t(d);
    for (const auto& term : cpd.terms())
        for (Index i = 0; i < d[0]; ++i)
            for (Index j = 0; j < d[1]; ++j)
                for (Index k = 0; k < d[2]; ++k) t(i, j, k) += term.a(i) * term.b(j) * term.c(k);
    return t;
}

// (M1, M2, M3) . t by six nested loops.
inline Tensor3 multilinear(const Eigen::MatrixXd& M1, const Eigen::MatrixXd& M2, const Eigen::MatrixXd& M3,
                           const Tensor3& t) {
    Tensor3 out({M1.rows(), M2.rows(), M3.rows()});
    for (Index p = 0; p < M1.rows(); ++p)
        for (Index q = 0; q < M2.rows(); ++q)
            for (Index s = 0; s < M3.rows(); ++s) {
                double acc = 0.0;
                for (Index i = 0; i < t.dim(0); ++i)
                    for (Index j = 0; j < t.dim(1); ++j)
                        for (Index k = 0; k < t.dim(2); ++k) acc += M1(p, i) * M2(q, j) * M3(s, k) * t(i, j, k);
                out(p, q, s) = acc;
            }
    return out;
}

inline double dense_inner(const Rank1Term& s, const Rank1Term& t) {
    Cpd cs({s}), ct({t});
    return oracle::reconstruct(cs).data().dot(oracle::reconstruct(ct).data());
}

inline Eigen::VectorXd outer(const Eigen::VectorXd& m, const Eigen::VectorXd& n) {
    Eigen::VectorXd v(m.size() * n.size());
    for (Index i = 0; i < m.size(); ++i)
        for (Index j = 0; j < n.size(); ++j) v(i * n.size() + j) = m(i) * n(j);
    return v;
}

// Jacobian of (a, b, c) -> a ⊗ b ⊗ c, columns ordered d/da, d/db, d/dc.
inline Eigen::MatrixXd term_jacobian(const Rank1Term& t) {
    const Index n1 = t.a.size(), n2 = t.b.size(), n3 = t.c.size();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n1 * n2 * n3, n1 + n2 + n3);
    for (Index i = 0; i < n1; ++i)
        for (Index j = 0; j < n2; ++j)
            for (Index k = 0; k < n3; ++k) {
                const Index row = (i * n2 + j) * n3 + k;
                J(row, i) = t.b(j) * t.c(k);
                J(row, n1 + j) = t.a(i) * t.c(k);
                J(row, n1 + n2 + k) = t.a(i) * t.b(j);
            }
    return J;
}

// kappa from the Jacobian of the full parametrization: an orthonormal basis of the
// range of each term's Jacobian (its n1+n2+n3-2 dominant left singular vectors),
// concatenated, then the smallest singular value of the dense result.
inline double kappa_from_jacobian(const Cpd& cpd) {
    const auto d = cpd.dims();
    const Index w = d[0] + d[1] + d[2] - 2;
    Eigen::MatrixXd T(d[0] * d[1] * d[2], cpd.rank() * w);
    for (Index i = 0; i < cpd.rank(); ++i) {
        Eigen::JacobiSVD<Eigen::MatrixXd> s(term_jacobian(cpd.term(i)), Eigen::ComputeThinU);
        T.middleCols(i * w, w) = s.matrixU().leftCols(w);
    }
    if (T.cols() > T.rows()) return std::numeric_limits<double>::infinity();
    Eigen::JacobiSVD<Eigen::MatrixXd> s(T);
    return 1.0 / s.singularValues()(T.cols() - 1);
}

// Gamma at integers and half-integers from the recursion and Gamma(1/2) = sqrt(pi).
inline double gamma_half_integer(int twice_x) {
    double g = (twice_x % 2 == 0) ? 1.0 : std::sqrt(std::numbers::pi);
    for (int k = (twice_x % 2 == 0) ? 2 : 1; k + 2 <= twice_x; k += 2) g *= 0.5 * k;
    return g;
}

inline double limiting_constant(int m3) {
    return std::pow(2.0, 0.5 * (m3 - 5)) / std::sqrt(std::numbers::pi) * gamma_half_integer(m3) /
           gamma_half_integer(m3 + 1);
}

// Forward error by enumerating every permutation with plain vectors.
inline double brute_force_error(const Cpd& ref, const Cpd& comp, std::vector<Index>* best_perm = nullptr) {
    const Index r = ref.rank();
    std::vector<Eigen::VectorXd> m, mc;
    for (Index i = 0; i < r; ++i) {
        m.push_back(oracle::reconstruct(Cpd({ref.term(i)})).data());
        mc.push_back(oracle::reconstruct(Cpd({comp.term(i)})).data());
    }
    std::vector<Index> p(static_cast<std::size_t>(r));
    for (Index i = 0; i < r; ++i) p[static_cast<std::size_t>(i)] = i;
    double best = std::numeric_limits<double>::infinity();
    do {
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) s += (m[i] - mc[static_cast<std::size_t>(p[i])]).squaredNorm();
        if (s < best) {
            best = s;
            if (best_perm) *best_perm = p;
        }
    } while (std::next_permutation(p.begin(), p.end()));
    return std::sqrt(best);
}

}  // namespace oracle
