#include <gtest/gtest.h>

#include <algorithm>

#include "pencilbench/linalg.hpp"
#include "pencilbench/random.hpp"

using namespace pencilbench;

TEST(Svd, DiagonalInputs) {
    EXPECT_LT((svd(Eigen::MatrixXd::Identity(3, 3)).sigma - Eigen::Vector3d::Ones()).norm(), 1e-15);
    const SvdResult s = svd(Eigen::Vector3d(3, 2, 1).asDiagonal().toDenseMatrix());
    EXPECT_LT((s.sigma - Eigen::Vector3d(3, 2, 1)).norm(), 1e-15);
}

TEST(Svd, ReconstructsRandomMatrix) {
    Rng rng(1);
    const Eigen::MatrixXd M = rng.gaussian(5, 3);
    const SvdResult s = svd(M);
    EXPECT_LT((M - s.U * s.sigma.asDiagonal() * s.V.transpose()).norm(), 1e-13 * M.norm());
    EXPECT_TRUE(std::is_sorted(s.sigma.data(), s.sigma.data() + s.sigma.size(), std::greater<>()));
}

TEST(Svd, RejectsNonFinite) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(2, 2);
    M(0, 1) = std::numeric_limits<double>::infinity();
    EXPECT_THROW((void)svd(M), NonFiniteInput);
}

TEST(Svd, InvariantUnderRowAndColumnPermutation) {
    Rng rng(2);
    const Eigen::MatrixXd M = rng.gaussian(6, 4);
    Eigen::PermutationMatrix<Eigen::Dynamic> P(6), R(4);
    P.setIdentity();
    R.setIdentity();
    std::swap(P.indices()(0), P.indices()(5));
    std::swap(R.indices()(1), R.indices()(3));
    EXPECT_LT((svd(P * M * R).sigma - svd(M).sigma).norm(), 1e-13);
}

// A matrix with a large cluster of equal singular values, the shape that appears
// when an odeco tensor is projected. The result must stay finite and accurate.
TEST(Svd, ClusteredSingularValues) {
    Rng rng(3);
    for (Index n : {20, 40, 80}) {
        const Eigen::MatrixXd U = orthonormalize(rng.gaussian(2 * n, n));
        const Eigen::MatrixXd V = orthonormalize(rng.gaussian(n, n));
        Eigen::VectorXd s = Eigen::VectorXd::Constant(n, 0.25);
        s(0) = 0.8;
        for (Index i = n / 2; i < n; ++i) s(i) = 1e-17 * static_cast<double>(i);
        const Eigen::MatrixXd M = U * s.asDiagonal() * V.transpose();
        const SvdResult r = svd(M);
        ASSERT_TRUE(r.U.allFinite());
        EXPECT_LT((M - r.U * r.sigma.asDiagonal() * r.V.transpose()).norm(), 1e-13);
        EXPECT_NEAR(r.sigma(n / 2 - 1), 0.25, 1e-14);
    }
}

TEST(Orthonormalize, Examples) {
    Rng rng(4);
    const Eigen::MatrixXd Q0 = orthonormalize(rng.gaussian(6, 3));
    const Eigen::MatrixXd Q1 = orthonormalize(Q0);
    EXPECT_LT((Q1.transpose() * Q1 - Eigen::Matrix3d::Identity()).norm(), 1e-14);
    EXPECT_LT((Q1 * Q1.transpose() - Q0 * Q0.transpose()).norm(), 1e-12);

    const Eigen::MatrixXd e = orthonormalize(Eigen::Vector3d(2, 0, 0));
    EXPECT_LT((e - Eigen::Vector3d(1, 0, 0)).norm(), 1e-15);

    const Eigen::MatrixXd G = rng.gaussian(10, 4);
    const Eigen::MatrixXd Q = orthonormalize(G);
    EXPECT_LT((Q.transpose() * Q - Eigen::Matrix4d::Identity()).norm(), 1e-13);
    EXPECT_LT((Q * Q.transpose() * G - G).norm(), 1e-12 * G.norm());
}

TEST(Orthonormalize, RejectsRankDeficient) {
    Eigen::MatrixXd M(3, 2);
    M << 1, 2, 1, 2, 1, 2;
    EXPECT_THROW((void)orthonormalize(M), RankDeficient);
    EXPECT_THROW((void)orthonormalize(Eigen::MatrixXd::Ones(2, 3)), InvalidArgument);
}

TEST(Pseudoinverse, Examples) {
    EXPECT_LT((pseudoinverse(Eigen::Matrix3d::Identity()) - Eigen::Matrix3d::Identity()).norm(), 1e-15);
    const Eigen::MatrixXd D = Eigen::Vector2d(2, 0).asDiagonal();
    EXPECT_LT((pseudoinverse(D) - Eigen::MatrixXd(Eigen::Vector2d(0.5, 0).asDiagonal())).norm(), 1e-15);
    Rng rng(5);
    const Eigen::MatrixXd M = rng.gaussian(6, 4);
    EXPECT_LT((pseudoinverse(M) * M - Eigen::Matrix4d::Identity()).norm(), 1e-11);
}

TEST(Pseudoinverse, PenroseIdentitiesAndTranspose) {
    Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        // Rank 3 in a 7 x 5 matrix.
        const Eigen::MatrixXd M = rng.gaussian(7, 3) * rng.gaussian(3, 5);
        const Eigen::MatrixXd P = pseudoinverse(M);
        const double nm = M.norm(), np = P.norm();
        EXPECT_LT((M * P * M - M).norm(), 1e-11 * nm);
        EXPECT_LT((P * M * P - P).norm(), 1e-11 * np);
        EXPECT_LT((M * P - (M * P).transpose()).norm(), 1e-11 * nm * np);
        EXPECT_LT((P * M - (P * M).transpose()).norm(), 1e-11 * nm * np);
        EXPECT_LT((pseudoinverse(M.transpose()) - P.transpose()).norm(), 1e-11 * np);
    }
}

TEST(OrthogonalComplement, IsOrthonormalAndOrthogonal) {
    Rng rng(7);
    for (Index n : {2, 3, 7}) {
        const Eigen::VectorXd u = rng.gaussian(n);
        const Eigen::MatrixXd Q = orthogonal_complement(u);
        ASSERT_EQ(Q.cols(), n - 1);
        EXPECT_LT((Q.transpose() * Q - Eigen::MatrixXd::Identity(n - 1, n - 1)).norm(), 1e-14);
        EXPECT_LT((Q.transpose() * u).norm(), 1e-14 * u.norm());
    }
    EXPECT_THROW((void)orthogonal_complement(Eigen::VectorXd::Zero(3)), ZeroInput);
}

TEST(SolvePencil, DiagonalPencil) {
    const PencilEig p = solve_pencil(Eigen::Vector2d(2, 3).asDiagonal(), Eigen::Matrix2d::Identity(), 1e-10);
    EXPECT_NEAR(p.eigenvalues(0), 3.0, 1e-14);
    EXPECT_NEAR(p.eigenvalues(1), 2.0, 1e-14);
    EXPECT_NEAR(std::abs(p.eigenvectors(1, 0)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(p.eigenvectors(0, 1)), 1.0, 1e-14);
}

TEST(SolvePencil, ConstructedSpectrumRoundtrip) {
    Rng rng(8);
    const Eigen::MatrixXd X = rng.gaussian(2, 2), S2 = rng.gaussian(2, 2);
    const Eigen::MatrixXd S1 = X * Eigen::Vector2d(1, 4).asDiagonal() * X.inverse() * S2;
    const PencilEig p = solve_pencil(S1, S2, 1e-10);
    EXPECT_NEAR(p.eigenvalues(0), 4.0, 1e-10);
    EXPECT_NEAR(p.eigenvalues(1), 1.0, 1e-10);
    for (Index j = 0; j < 2; ++j) {
        const Eigen::Vector2d x = X.col(1 - j).normalized();
        EXPECT_NEAR(std::abs(x.dot(p.eigenvectors.col(j))), 1.0, 1e-10);
    }
}

TEST(SolvePencil, SingularSecondSlice) {
    EXPECT_THROW((void)solve_pencil(Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Zero(), 1e-10), SingularPencil);
}

TEST(SolvePencil, ComplexSpectrumIsRejected) {
    Eigen::Matrix2d R;
    R << 0, -1, 1, 0;
    EXPECT_THROW((void)solve_pencil(R, Eigen::Matrix2d::Identity(), 1e-10), ComplexEigenvalues);
}

TEST(SolvePencil, RecoversKnownSpectra) {
    Rng rng(9);
    for (int trial = 0; trial < 500; ++trial) {
        const Index r = 1 + static_cast<Index>(trial % 12);
        const Eigen::MatrixXd X = rng.gaussian(r, r), S2 = rng.gaussian(r, r);
        Eigen::VectorXd lam(r);
        for (Index i = 0; i < r; ++i) lam(i) = static_cast<double>(i + 1) + 0.5 * rng.uniform();
        const Eigen::MatrixXd S1 = X * lam.asDiagonal() * X.inverse() * S2;
        // Ill-conditioned eigenvector bases are legitimately inaccurate; skip them.
        if (Eigen::JacobiSVD<Eigen::MatrixXd>(X).singularValues()(r - 1) < 1e-2 * X.norm()) continue;
        const PencilEig p = solve_pencil(S1, S2, 1e-10);
        std::vector<double> want(lam.data(), lam.data() + r);
        std::sort(want.rbegin(), want.rend());
        for (Index i = 0; i < r; ++i) EXPECT_NEAR(p.eigenvalues(i), want[static_cast<std::size_t>(i)], 1e-10 * want[0]);
        // Columns are eigenvectors of S1 S2^{-1}: S1 y = lambda S2 y with y = S2^{-1} x.
        const Eigen::MatrixXd Y = S2.partialPivLu().solve(p.eigenvectors);
        for (Index i = 0; i < r; ++i) {
            const double lhs = (S1 * Y.col(i) - p.eigenvalues(i) * S2 * Y.col(i)).norm();
            EXPECT_LE(lhs, 1e-8 * (S1.norm() + std::abs(p.eigenvalues(i)) * S2.norm()) * Y.col(i).norm());
            EXPECT_NEAR(p.eigenvectors.col(i).norm(), 1.0, 1e-14);
        }
    }
}
