// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pencilbench/errors.hpp"

namespace pencilbench {

using Index = Eigen::Index;
using Dims = std::array<Index, 3>;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

[[nodiscard]] inline std::string to_string(const Dims& d) {
    return std::to_string(d[0]) + "x" + std::to_string(d[1]) + "x" + std::to_string(d[2]);
}

/// Dense real n1 x n2 x n3 array. Entry (i1,i2,i3) lives at (i1*n2 + i2)*n3 + i3.
class Tensor3 {
public:
    Tensor3() = default;

    /// Zero tensor of the given shape.
    explicit Tensor3(const Dims& dims) : dims_(dims) {
        check_dims(dims);
        data_ = Eigen::VectorXd::Zero(dims[0] * dims[1] * dims[2]);
    }

    Tensor3(const Dims& dims, Eigen::VectorXd data) : dims_(dims), data_(std::move(data)) {
        check_dims(dims);
        if (data_.size() != dims[0] * dims[1] * dims[2])
            throw DimensionMismatch("Tensor3: data length " + std::to_string(data_.size()) +
                                    " does not match dims " + to_string(dims));
        if (!data_.allFinite()) throw NonFiniteInput("Tensor3: non-finite entry");
    }

    [[nodiscard]] const Dims& dims() const noexcept { return dims_; }
    [[nodiscard]] Index dim(int k) const noexcept { return dims_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] Index size() const noexcept { return data_.size(); }

    [[nodiscard]] const Eigen::VectorXd& data() const noexcept { return data_; }
    [[nodiscard]] Eigen::VectorXd& data() noexcept { return data_; }

    [[nodiscard]] Index offset(Index i1, Index i2, Index i3) const noexcept {
        return (i1 * dims_[1] + i2) * dims_[2] + i3;
    }
    [[nodiscard]] double operator()(Index i1, Index i2, Index i3) const noexcept {
        return data_(offset(i1, i2, i3));
    }
    [[nodiscard]] double& operator()(Index i1, Index i2, Index i3) noexcept {
        return data_(offset(i1, i2, i3));
    }

    [[nodiscard]] double norm() const { return data_.norm(); }

    Tensor3& operator+=(const Tensor3& o) {
        require_same_dims(o);
        data_ += o.data_;
        return *this;
    }
    Tensor3& operator-=(const Tensor3& o) {
        require_same_dims(o);
        data_ -= o.data_;
        return *this;
    }
    Tensor3& operator*=(double s) {
        data_ *= s;
        return *this;
    }
    friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
    friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
    friend Tensor3 operator*(double s, Tensor3 a) { return a *= s; }

private:
    static void check_dims(const Dims& d) {
        for (Index n : d)
            if (n <= 0) throw InvalidArgument("Tensor3: dimensions must be positive, got " + to_string(d));
    }
    void require_same_dims(const Tensor3& o) const {
        if (o.dims_ != dims_)
            throw DimensionMismatch("Tensor3: " + to_string(dims_) + " vs " + to_string(o.dims_));
    }

    Dims dims_{1, 1, 1};
    Eigen::VectorXd data_ = Eigen::VectorXd::Zero(1);
};

/// a ⊗ b ⊗ c.
struct Rank1Term {
    Eigen::VectorXd a;
    Eigen::VectorXd b;
    Eigen::VectorXd c;

    [[nodiscard]] Dims dims() const noexcept { return {a.size(), b.size(), c.size()}; }
    /// Frobenius norm of the dense term.
    [[nodiscard]] double norm() const { return a.norm() * b.norm() * c.norm(); }

    void validate() const {
        for (const Eigen::VectorXd* v : {&a, &b, &c}) {
            if (v->size() == 0) throw InvalidArgument("Rank1Term: empty factor");
            if (!v->allFinite()) throw NonFiniteInput("Rank1Term: non-finite factor");
            if (v->squaredNorm() == 0.0) throw ZeroInput("Rank1Term: zero factor");
        }
    }
};

/// Flip sign so that the first entry exceeding 1e-12 * max|v| is positive.
/// Returns the sign applied (+1 or -1).
inline double canonical_sign(Eigen::Ref<Eigen::VectorXd> v) {
    const double m = v.cwiseAbs().maxCoeff();
    if (m == 0.0) return 1.0;
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-12 * m) {
            if (v(i) < 0) {
                v = -v;
                return -1.0;
            }
            return 1.0;
        }
    }
    return 1.0;
}

/// Ordered list of r rank-1 terms sharing one shape.
class Cpd {
public:
    Cpd() = default;

    explicit Cpd(std::vector<Rank1Term> terms) : terms_(std::move(terms)) {
        if (terms_.empty()) throw InvalidArgument("Cpd: rank must be at least 1");
        const Dims d = terms_.front().dims();
        for (const auto& t : terms_) {
            if (t.dims() != d)
                throw DimensionMismatch("Cpd: term dims " + to_string(t.dims()) + " vs " + to_string(d));
            if (!t.a.allFinite() || !t.b.allFinite() || !t.c.allFinite())
                throw NonFiniteInput("Cpd: non-finite factor");
        }
    }

    /// Columns of A, B, C become the factors of the terms.
    static Cpd from_factors(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C) {
        if (A.cols() != B.cols() || A.cols() != C.cols())
            throw DimensionMismatch("Cpd::from_factors: column counts differ");
        std::vector<Rank1Term> terms;
        terms.reserve(static_cast<std::size_t>(A.cols()));
        for (Index i = 0; i < A.cols(); ++i) terms.push_back({A.col(i), B.col(i), C.col(i)});
        return Cpd(std::move(terms));
    }

    [[nodiscard]] Index rank() const noexcept { return static_cast<Index>(terms_.size()); }
    [[nodiscard]] Dims dims() const { return terms_.front().dims(); }
    [[nodiscard]] const std::vector<Rank1Term>& terms() const noexcept { return terms_; }
    [[nodiscard]] const Rank1Term& term(Index i) const { return terms_.at(static_cast<std::size_t>(i)); }

    [[nodiscard]] Eigen::MatrixXd A() const { return factor(0); }
    [[nodiscard]] Eigen::MatrixXd B() const { return factor(1); }
    [[nodiscard]] Eigen::MatrixXd C() const { return factor(2); }

    /// Factor matrix of mode k (0-based).
    [[nodiscard]] Eigen::MatrixXd factor(int k) const {
        const Index n = dims()[static_cast<std::size_t>(k)];
        Eigen::MatrixXd M(n, rank());
        for (Index i = 0; i < rank(); ++i) {
            const auto& t = terms_[static_cast<std::size_t>(i)];
            M.col(i) = k == 0 ? t.a : (k == 1 ? t.b : t.c);
        }
        return M;
    }

    void validate() const {
        for (const auto& t : terms_) t.validate();
    }

    /// a, b unit norm with first significant entry positive; magnitude and sign carried by c.
    [[nodiscard]] Cpd canonical() const {
        std::vector<Rank1Term> out = terms_;
        for (auto& t : out) {
            const double na = t.a.norm(), nb = t.b.norm();
            if (na == 0.0 || nb == 0.0) throw ZeroInput("Cpd::canonical: zero factor");
            t.a /= na;
            t.b /= nb;
            const double s = canonical_sign(t.a) * canonical_sign(t.b);
            t.c *= s * na * nb;
        }
        return Cpd(std::move(out));
    }

private:
    std::vector<Rank1Term> terms_;
};

/// Dense a ⊗ b ⊗ c.
[[nodiscard]] inline Tensor3 dense(const Rank1Term& t) {
    Tensor3 out(t.dims());
    const Index n2 = t.b.size(), n3 = t.c.size();
    for (Index i1 = 0; i1 < t.a.size(); ++i1)
        for (Index i2 = 0; i2 < n2; ++i2)
            out.data().segment((i1 * n2 + i2) * n3, n3) = (t.a(i1) * t.b(i2)) * t.c;
    return out;
}

/// Sum of the terms of `cpd` as a dense tensor.
[[nodiscard]] inline Tensor3 reconstruct(const Cpd& cpd) {
    if (cpd.rank() == 0) throw InvalidArgument("reconstruct: empty CPD");
    const Dims d = cpd.dims();
    Tensor3 out(d);
    const Index n2 = d[1], n3 = d[2];
    for (const auto& t : cpd.terms()) {
        if (t.dims() != d) throw DimensionMismatch("reconstruct: inconsistent term dims");
        for (Index i1 = 0; i1 < d[0]; ++i1)
            for (Index i2 = 0; i2 < n2; ++i2)
                out.data().segment((i1 * n2 + i2) * n3, n3) += (t.a(i1) * t.b(i2)) * t.c;
    }
    return out;
}

/// Mode-k unfolding (k in {1,2,3}). Columns are ordered so that for a CPD
/// flatten(.,1) = A (B⊙C)^T, flatten(.,2) = B (A⊙C)^T, flatten(.,3) = C (A⊙B)^T.
[[nodiscard]] inline Eigen::MatrixXd flatten(const Tensor3& t, int mode) {
    const Index n1 = t.dim(0), n2 = t.dim(1), n3 = t.dim(2);
    const double* p = t.data().data();
    switch (mode) {
        case 1:
            return Eigen::Map<const RowMajorMatrix>(p, n1, n2 * n3);
        case 2: {
            Eigen::MatrixXd M(n2, n1 * n3);
            for (Index i1 = 0; i1 < n1; ++i1)
                M.middleCols(i1 * n3, n3) = Eigen::Map<const RowMajorMatrix>(p + i1 * n2 * n3, n2, n3);
            return M;
        }
        case 3:
            return Eigen::Map<const RowMajorMatrix>(p, n1 * n2, n3).transpose();
        default:
            throw InvalidArgument("flatten: mode must be 1, 2 or 3, got " + std::to_string(mode));
    }
}

/// Column i is m_i ⊗ n_i, with the n-index fastest.
[[nodiscard]] inline Eigen::MatrixXd khatri_rao(const Eigen::MatrixXd& M, const Eigen::MatrixXd& N) {
    if (M.cols() != N.cols())
        throw DimensionMismatch("khatri_rao: column counts " + std::to_string(M.cols()) + " and " +
                                std::to_string(N.cols()));
    Eigen::MatrixXd K(M.rows() * N.rows(), M.cols());
    for (Index i = 0; i < M.cols(); ++i)
        for (Index p = 0; p < M.rows(); ++p) K.col(i).segment(p * N.rows(), N.rows()) = M(p, i) * N.col(i);
    return K;
}

/// (M1, M2, M3) · t.
[[nodiscard]] inline Tensor3 multilinear_multiply(const Eigen::MatrixXd& M1, const Eigen::MatrixXd& M2,
                                                  const Eigen::MatrixXd& M3, const Tensor3& t) {
    const Index n1 = t.dim(0), n2 = t.dim(1), n3 = t.dim(2);
    if (M1.cols() != n1 || M2.cols() != n2 || M3.cols() != n3)
        throw DimensionMismatch("multilinear_multiply: matrices do not match tensor dims " + to_string(t.dims()));
    const Index p1 = M1.rows(), p2 = M2.rows(), p3 = M3.rows();

    // Mode 3: (n1 n2 x n3) * M3^T.
    RowMajorMatrix s3 = Eigen::Map<const RowMajorMatrix>(t.data().data(), n1 * n2, n3) * M3.transpose();
    // Mode 2: each i1-slice is an n2 x p3 row-major block.
    RowMajorMatrix s2(n1 * p2, p3);
    for (Index i1 = 0; i1 < n1; ++i1) s2.middleRows(i1 * p2, p2) = M2 * s3.middleRows(i1 * n2, n2);
    // Mode 1: M1 * (n1 x p2 p3).
    RowMajorMatrix s1 = M1 * Eigen::Map<const RowMajorMatrix>(s2.data(), n1, p2 * p3);

    Eigen::VectorXd data = Eigen::Map<const Eigen::VectorXd>(s1.data(), p1 * p2 * p3);
    return Tensor3({p1, p2, p3}, std::move(data));
}

/// <s, t> = <a_s,a_t><b_s,b_t><c_s,c_t>.
[[nodiscard]] inline double rank1_inner(const Rank1Term& s, const Rank1Term& t) {
    if (s.dims() != t.dims())
        throw DimensionMismatch("rank1_inner: " + to_string(s.dims()) + " vs " + to_string(t.dims()));
    return s.a.dot(t.a) * s.b.dot(t.b) * s.c.dot(t.c);
}

/// Vectorized terms a_i ⊗ b_i ⊗ c_i as columns (A ⊙ B ⊙ C).
[[nodiscard]] inline Eigen::MatrixXd vectorized_terms(const Cpd& cpd) {
    const Dims d = cpd.dims();
    Eigen::MatrixXd M(d[0] * d[1] * d[2], cpd.rank());
    for (Index i = 0; i < cpd.rank(); ++i) M.col(i) = dense(cpd.term(i)).data();
    return M;
}

}  // namespace pencilbench
