#include <gtest/gtest.h>

#include "pencilbench/adversarial.hpp"
#include "pencilbench/conditioning.hpp"
#include "pencilbench/mc.hpp"
#include "pencilbench/metrics.hpp"
#include "pencilbench/pba.hpp"

using namespace pencilbench;

namespace {

Tensor3 random_tensor(const Dims& d, Rng& rng) { return Tensor3(d, rng.gaussian(d[0] * d[1] * d[2])); }

}  // namespace

TEST(ChooseProjection, EveryStrategyGivesOrthonormalColumns) {
    Rng rng(1);
    const Tensor3 t = random_tensor({4, 3, 2}, rng);
    for (auto s : {ProjectionStrategy::RandomOrthonormal, ProjectionStrategy::HosvdLeadingTwo}) {
        const Eigen::MatrixXd Q = choose_projection(t, s, rng);
        ASSERT_EQ(Q.rows(), 2);
        EXPECT_LT((Q.transpose() * Q - Eigen::Matrix2d::Identity()).norm(), 1e-14);
    }
    const Eigen::MatrixXd F = Eigen::Matrix2d::Identity();
    EXPECT_EQ(choose_projection(t, ProjectionStrategy::Fixed, rng, F), F);
}

TEST(ChooseProjection, HosvdFindsTheOnlyThirdModeDirection) {
    Rng rng(2);
    const Tensor3 t = dense(Rank1Term{rng.gaussian(4), rng.gaussian(3), Eigen::Vector4d(1, 0, 0, 0)});
    const Eigen::MatrixXd Q = choose_projection(t, ProjectionStrategy::HosvdLeadingTwo, rng);
    EXPECT_NEAR(std::abs(Q(0, 0)), 1.0, 1e-14);
}

TEST(ChooseProjection, SeededRandomIsReproducible) {
    const Tensor3 t({3, 3, 5});
    Rng r1(42), r2(42);
    EXPECT_EQ(choose_projection(t, ProjectionStrategy::RandomOrthonormal, r1),
              choose_projection(t, ProjectionStrategy::RandomOrthonormal, r2));
}

TEST(ChooseProjection, Errors) {
    Rng rng(3);
    const Tensor3 t({3, 3, 4});
    EXPECT_THROW((void)choose_projection(t, ProjectionStrategy::Fixed, rng, Eigen::MatrixXd::Ones(4, 2)),
                 InvalidArgument);
    EXPECT_THROW((void)choose_projection(t, ProjectionStrategy::Fixed, rng, Eigen::MatrixXd::Identity(3, 2)),
                 DimensionMismatch);
    EXPECT_THROW((void)choose_projection(Tensor3({3, 3, 1}), ProjectionStrategy::RandomOrthonormal, rng),
                 InvalidArgument);
}

TEST(Compression, ExactForMultilinearRankRR2) {
    Rng rng(4);
    const Index r = 3;
    const Tensor3 core(Dims{r, r, 2}, rng.gaussian(r * r * 2));
    const Eigen::MatrixXd U1 = rng.gaussian(7, r), U2 = rng.gaussian(5, r);
    const Tensor3 b = multilinear_multiply(U1, U2, Eigen::Matrix2d::Identity(), core);
    const Compression c = st_hosvd_compress(b, r);
    Tensor3 back = multilinear_multiply(c.Q1, c.Q2, Eigen::Matrix2d::Identity(), c.core);
    back -= b;
    EXPECT_LE(back.norm(), 1e-12 * b.norm());
    EXPECT_LT((c.Q1.transpose() * c.Q1 - Eigen::Matrix3d::Identity()).norm(), 1e-13);
}

TEST(Compression, RankOneCore) {
    Rng rng(5);
    const Eigen::VectorXd a = rng.gaussian(4), bv = rng.gaussian(3), z = rng.gaussian(2);
    const Compression c = st_hosvd_compress(dense(Rank1Term{a, bv, z}), 1);
    const Eigen::Vector2d held(c.core(0, 0, 0), c.core(0, 0, 1));
    EXPECT_LT((held.cwiseAbs() - a.norm() * bv.norm() * z.cwiseAbs()).norm(), 1e-13 * held.norm());
    EXPECT_NEAR(std::abs(held.normalized().dot(z.normalized())), 1.0, 1e-14);
}

TEST(Compression, SlicesFormARealPencil) {
    Rng rng(6);
    const Cpd cpd = sample_cpd({8, 6, 2}, 3, Sampling::GaussianAll, rng);
    const Compression c = st_hosvd_compress(reconstruct(cpd), 3);
    const Eigen::MatrixXd S = flatten(c.core, 3);
    const Eigen::MatrixXd S1 = Eigen::Map<const RowMajorMatrix>(S.row(0).eval().data(), 3, 3);
    const Eigen::MatrixXd S2 = Eigen::Map<const RowMajorMatrix>(S.row(1).eval().data(), 3, 3);
    const PencilEig e = solve_pencil(S1, S2, 1e-10);
    const Eigen::MatrixXd M = S1 * S2.inverse();
    for (Index i = 0; i < 3; ++i)
        EXPECT_LE((M * e.eigenvectors.col(i) - e.eigenvalues(i) * e.eigenvectors.col(i)).norm(), 1e-10 * M.norm());
}

TEST(Compression, Errors) {
    Rng rng(7);
    EXPECT_THROW((void)st_hosvd_compress(random_tensor({3, 3, 2}, rng), 4), RankTooLarge);
    EXPECT_THROW((void)st_hosvd_compress(dense(Rank1Term{rng.gaussian(4), rng.gaussian(4), rng.gaussian(2)}), 2),
                 DegenerateCompression);
}

TEST(SplitRank1Column, Examples) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(4);
    w(0) = 1.0;
    auto [b, c] = split_rank1_column(w, 2, 2);
    EXPECT_LT((b - Eigen::Vector2d(1, 0)).norm(), 1e-15);
    EXPECT_LT((c - Eigen::Vector2d(1, 0)).norm(), 1e-15);

    Rng rng(8);
    const Eigen::VectorXd b0 = rng.gaussian(3).normalized(), c0 = rng.gaussian(4).normalized();
    const Eigen::MatrixXd W = 2.0 * b0 * c0.transpose();
    const RowMajorMatrix Wr = W;
    auto [b1, c1] = split_rank1_column(Eigen::Map<const Eigen::VectorXd>(Wr.data(), 12), 3, 4);
    const double s = b1.dot(b0) > 0 ? 1.0 : -1.0;
    EXPECT_LT((s * b1 - b0).norm(), 1e-13);
    EXPECT_LT((s * c1 - 2.0 * c0).norm(), 1e-13);
}

TEST(SplitRank1Column, ResidualIsSecondSingularValue) {
    Rng rng(9);
    const RowMajorMatrix W = rng.gaussian(3, 2) * rng.gaussian(2, 5);
    auto [b, c] = split_rank1_column(Eigen::Map<const Eigen::VectorXd>(W.data(), 15), 3, 5);
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(Eigen::MatrixXd(W)).singularValues();
    EXPECT_NEAR((Eigen::MatrixXd(W) - b * c.transpose()).norm(), sv(1), 1e-13 * sv(0));
    EXPECT_THROW((void)split_rank1_column(Eigen::VectorXd::Zero(6), 2, 3), ZeroInput);
    EXPECT_THROW((void)split_rank1_column(Eigen::VectorXd::Ones(5), 2, 3), DimensionMismatch);
}

TEST(PbaDecompose, ExactRankOne) {
    Rng rng(10);
    const Tensor3 t = dense(Rank1Term{rng.gaussian(4), rng.gaussian(3), rng.gaussian(3)});
    PbaConfig cfg;
    const PbaReport rep = pba_decompose(t, cfg);
    EXPECT_LE(rep.backward_residual, 1e-12);
    EXPECT_EQ(rep.retries_used, 0);
}

TEST(PbaDecompose, RecoversWellConditionedCpd) {
    Rng rng(11);
    int tested = 0;
    while (tested < 20) {
        const Cpd ref = sample_cpd({10, 8, 6}, 5, Sampling::GaussianAll, rng);
        if (condition_number(ref, kKappaOnly).kappa >= 100.0) continue;
        ++tested;
        const Tensor3 t = reconstruct(ref);
        for (auto s : {ProjectionStrategy::HosvdLeadingTwo, ProjectionStrategy::RandomOrthonormal}) {
            PbaConfig cfg;
            cfg.rank = 5;
            cfg.projection_strategy = s;
            cfg.seed = static_cast<std::uint64_t>(tested);
            const PbaReport rep = pba_decompose(t, cfg);
            EXPECT_LE(forward_error(ref, rep.cpd).forward_error, 1e-8 * t.norm());
            EXPECT_LE(rep.backward_residual, 1e-10);
            // A factor columns are unit and sign-canonical.
            for (const auto& term : rep.cpd.terms()) {
                EXPECT_NEAR(term.a.norm(), 1.0, 1e-14);
                Eigen::VectorXd a = term.a;
                EXPECT_EQ(canonical_sign(a), 1.0);
            }
        }
    }
}

TEST(PbaDecompose, SameSeedSameResult) {
    Rng rng(12);
    const Tensor3 t = reconstruct(sample_cpd({6, 5, 4}, 3, Sampling::GaussianAll, rng));
    PbaConfig cfg;
    cfg.rank = 3;
    cfg.projection_strategy = ProjectionStrategy::RandomOrthonormal;
    cfg.seed = 99;
    const PbaReport a = pba_decompose(t, cfg), b = pba_decompose(t, cfg);
    EXPECT_EQ(a.projection_used, b.projection_used);
    EXPECT_EQ(vectorized_terms(a.cpd), vectorized_terms(b.cpd));
}

TEST(PbaDecompose, AdversarialProjectionAmplifiesError) {
    const OdecoSpec spec = OdecoSpec::with_random_q({8, 7, 6}, 4, 13);
    const Cpd o = make_bad_odeco(spec);
    Rng rng(14);
    const PerturbedCpd p = perturb_decomposition(o, 20, rng);  // epsilon ~ 1e-6
    const Tensor3 t = reconstruct(p.cpd);
    PbaConfig cfg;
    cfg.rank = 4;
    cfg.projection_strategy = ProjectionStrategy::Fixed;
    cfg.fixed_q = spec.Q;
    cfg.max_projection_retries = 0;
    const double fe = forward_error(p.cpd, pba_decompose(t, cfg).cpd).forward_error;
    EXPECT_GE(fe, 1e-10);
    // Far above what kappa = O(1) would allow, and on the order of eps_u / epsilon.
    EXPECT_GT(fe / (kUnitRoundoff / p.epsilon), 1e-3);
    EXPECT_LT(fe / (kUnitRoundoff / p.epsilon), 1e3);
}

TEST(PbaDecompose, Preconditions) {
    Rng rng(15);
    PbaConfig cfg;
    cfg.rank = 4;
    EXPECT_THROW((void)pba_decompose(random_tensor({5, 3, 3}, rng), cfg), RankTooLarge);
    cfg.rank = 2;
    EXPECT_THROW((void)pba_decompose(random_tensor({3, 4, 3}, rng), cfg), DimensionMismatch);
    EXPECT_THROW((void)pba_decompose(random_tensor({4, 3, 1}, rng), cfg), DimensionMismatch);
    EXPECT_THROW((void)pba_decompose(Tensor3({4, 3, 2}), cfg), ZeroInput);
    cfg.rank = 0;
    EXPECT_THROW((void)pba_decompose(random_tensor({4, 3, 2}, rng), cfg), InvalidArgument);
}

TEST(PbaDecompose, ComplexPencilExhaustsRetries) {
    // A real rank-2 tensor whose pencil has complex eigenvalues for every projection:
    // the slices [[1,0],[0,1]] and [[0,-1],[1,0]] (generic rank 2 over C only).
    Tensor3 t({2, 2, 2});
    t(0, 0, 0) = 1.0;
    t(1, 1, 0) = 1.0;
    t(0, 1, 1) = -1.0;
    t(1, 0, 1) = 1.0;
    PbaConfig cfg;
    cfg.rank = 2;
    cfg.max_projection_retries = 3;
    EXPECT_THROW((void)pba_decompose(t, cfg), RetriesExhausted);
}
