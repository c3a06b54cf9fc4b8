#include <gtest/gtest.h>

#include "pencilbench/properties.hpp"

using namespace pencilbench;

TEST(Nodecrease, HoldsOnConstructedInstances) {
    NodecreaseParams p;
    p.trials = 300;
    p.seed = 1;
    const CheckReport rep = check_nodecrease(p);
    EXPECT_EQ(rep.trials, 300);
    EXPECT_EQ(rep.failures, 0);
    EXPECT_EQ(rep.errors, 0);
    EXPECT_GE(rep.worst_margin, 0.0);
}

TEST(Nodecrease, DegenerateCompetitors) {
    // At At = A the bound is 0. With B~ = C~ = 0 the left side is ||A⊙B⊙C||.
    Rng rng(2);
    const Eigen::MatrixXd A = orthonormalize(rng.gaussian(6, 3));
    const Eigen::MatrixXd B = rng.gaussian(5, 3), C = rng.gaussian(4, 3);
    const Eigen::MatrixXd M = khatri_rao(khatri_rao(A, B), C);
    EXPECT_EQ(detail::permuted_distance(A, A), 0.0);
    const double lhs = match_terms(M, Eigen::MatrixXd::Zero(M.rows(), 3), MatchMethod::BruteForce).forward_error;
    EXPECT_NEAR(lhs, M.norm(), 1e-14 * M.norm());
    const Eigen::MatrixXd At = detail::unit_columns(A + 0.1 * rng.gaussian(6, 3));
    EXPECT_GE(lhs, std::sqrt(0.75) * 0.99 * detail::permuted_distance(A, At));
}

TEST(Nodecrease, Preconditions) {
    NodecreaseParams p;
    p.rank = 8;
    EXPECT_THROW((void)check_nodecrease(p), InvalidArgument);
    p.rank = 3;
    p.nu = 0.1;
    EXPECT_THROW((void)check_nodecrease(p), InvalidArgument);
}

TEST(PairBound, NoViolations) {
    PairBoundParams p;
    p.trials = 500;
    p.seed = 3;
    const CheckReport rep = check_pair_bound(p);
    EXPECT_EQ(rep.failures, 0);
    EXPECT_EQ(rep.trials, 500);
}

TEST(Kruskal, RecoveredIdenticallyFromEveryStart) {
    KruskalParams p;
    p.trials = 30;
    p.seed = 4;
    const CheckReport rep = check_kruskal_implies_identifiable_numerically(p);
    EXPECT_LE(rep.failures + rep.errors, 1);
}

TEST(Kruskal, RankOneIsAlwaysUnique) {
    KruskalParams p;
    p.rank = 1;
    p.trials = 10;
    const CheckReport rep = check_kruskal_implies_identifiable_numerically(p);
    EXPECT_EQ(rep.failures, 0);
    EXPECT_EQ(rep.errors, 0);
}

TEST(Reports, ThreadCountDoesNotMatter) {
    NodecreaseParams a;
    a.trials = 60;
    a.threads = 1;
    NodecreaseParams b = a;
    b.threads = 3;
    const CheckReport ra = check_nodecrease(a), rb = check_nodecrease(b);
    EXPECT_EQ(ra.worst_margin, rb.worst_margin);
    EXPECT_EQ(ra.failures, rb.failures);
}
