#include <gtest/gtest.h>

#include "helpers.hpp"
#include "lnucb/linear.hpp"

using namespace lnucb;
using testutil::vec;

namespace {

// Independent normal-equations solve via full-pivot LU.
Context oracle_mu(const std::vector<Context>& xs, const std::vector<double>& ys, double lambda, std::size_t d)
{
    Matrix a = Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) * lambda;
    Context b = Context::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        a += xs[i] * xs[i].transpose();
        b += ys[i] * xs[i];
    }
    return a.fullPivLu().solve(b);
}

} // namespace

TEST(Ridge, Initialization)
{
    const auto s = ridge_init(2, 1.0);
    EXPECT_TRUE(s.sigma().isApprox(Matrix::Identity(2, 2)));
    EXPECT_EQ(s.mu_hat(), Context::Zero(2));
    EXPECT_NEAR(ridge_init(3, 2.0).det_sigma(), 8.0, 1e-12);
}

TEST(Ridge, RejectsBadArguments)
{
    EXPECT_THROW(ridge_init(0, 1.0), BanditError);
    EXPECT_THROW(ridge_init(2, 0.0), BanditError);
    EXPECT_THROW(ridge_init(2, 1.0, -1.0), BanditError);
    auto s = ridge_init(2, 1.0);
    EXPECT_THROW(s.predict(vec({1, 0, 0})), BanditError);
    EXPECT_THROW(s.update(vec({1, 0}), std::nan("")), BanditError);
}

TEST(Ridge, PredictExamples)
{
    auto s = ridge_init(2, 1.0);
    EXPECT_EQ(ridge_predict(s, vec({0.3, -2})), 0.0);
    s = ridge_update(s, vec({1, 0}), 1.0);
    EXPECT_DOUBLE_EQ(ridge_predict(s, vec({1, 0})), 0.5);
    EXPECT_EQ(ridge_predict(s, vec({0, 0})), 0.0);
}

TEST(Ridge, WidthExamples)
{
    EXPECT_DOUBLE_EQ(ridge_width(ridge_init(3, 1.0), vec({0, 0.6, 0.8})), 1.0);
    EXPECT_DOUBLE_EQ(ridge_width(ridge_init(3, 4.0), vec({0, 0.6, 0.8})), 0.5);
    EXPECT_EQ(ridge_width(ridge_init(3, 4.0), vec({0, 0, 0})), 0.0);
}

TEST(Ridge, SingleUpdateByHand)
{
    const auto s = ridge_update(ridge_init(2, 1.0), vec({1, 0}), 1.0, 0.0);
    Matrix expected(2, 2);
    expected << 2, 0, 0, 1;
    EXPECT_TRUE(s.sigma().isApprox(expected));
    EXPECT_NEAR(s.mu_hat()[0], 0.5, 1e-15);
    EXPECT_NEAR(s.mu_hat()[1], 0.0, 1e-15);
}

TEST(Ridge, ZeroResidualInflatesSigmaOnly)
{
    auto s = ridge_update(ridge_init(2, 1.0), vec({1, 0}), 1.0);
    const Context before = s.mu_hat();
    const double det = s.det_sigma();
    s = ridge_update(s, vec({0, 1}), 0.0);
    EXPECT_TRUE(s.mu_hat().isApprox(before));
    EXPECT_GT(s.det_sigma(), det);
}

TEST(Ridge, InflationAddsToDiagonal)
{
    auto s = ridge_update(ridge_init(2, 1.0, 0.5), vec({1, 0}), 0.0, 2.0);
    Matrix expected(2, 2);
    expected << 3, 0, 0, 2;
    EXPECT_TRUE(s.sigma().isApprox(expected));
    EXPECT_LT(s.inverse_drift(), 1e-12);
}

TEST(Ridge, DeterminantExpansionWithoutInflation)
{
    Rng rng(4);
    auto s = ridge_init(4, 1.0);
    for (int t = 0; t < 200; ++t) {
        const Context x = testutil::random_unit(rng, 4) * rng.uniform();
        const double w = ridge_width(s, x);
        const double before = s.log_det_sigma();
        s = ridge_update(s, x, rng.normal());
        EXPECT_NEAR(s.log_det_sigma() - before, std::log1p(w * w), 1e-10);
    }
}

TEST(Ridge, CorrectIdentityWithInflation)
{
    // det(S + cI + xx^T) = det(S + cI) (1 + x^T (S + cI)^-1 x)
    Rng rng(8);
    auto s = ridge_init(3, 1.0, 0.3);
    for (int t = 0; t < 100; ++t) {
        const Context x = testutil::random_unit(rng, 3);
        const double e = rng.uniform();
        const Matrix shifted = s.sigma() + 0.3 * e * Matrix::Identity(3, 3);
        const double expected = std::log(shifted.determinant()) + std::log1p(x.dot(shifted.inverse() * x));
        s = ridge_update(s, x, rng.normal(), e);
        EXPECT_NEAR(s.log_det_sigma(), expected, 1e-9);
    }
}

TEST(Ridge, BatchSolveExamples)
{
    const std::vector<Context> none;
    const std::vector<double> no_y;
    EXPECT_EQ(ridge_solve_batch(none, no_y, 1.0, 2), Context::Zero(2));
    const std::vector<Context> one{vec({1, 0})};
    const std::vector<double> y{1.0};
    const auto mu = ridge_solve_batch(one, y, 1.0, 2);
    EXPECT_NEAR(mu[0], 0.5, 1e-15);
    EXPECT_NEAR(mu[1], 0.0, 1e-15);
}

TEST(Ridge, IncrementalMatchesOracle)
{
    Rng rng(21);
    const std::size_t d = 5;
    auto s = ridge_init(d, 1.0);
    std::vector<Context> xs;
    std::vector<double> ys;
    for (int t = 0; t < 200; ++t) {
        xs.push_back(testutil::random_unit(rng, d));
        ys.push_back(rng.normal());
        s.update(xs.back(), ys.back());
    }
    const Context oracle = oracle_mu(xs, ys, 1.0, d);
    EXPECT_LE((s.mu_hat() - oracle).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((ridge_solve_batch(xs, ys, 1.0, d) - oracle).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Ridge, DriftStaysSmallOverLongRuns)
{
    Rng rng(2);
    auto s = ridge_init(8, 0.5);
    for (int t = 0; t < 5000; ++t) s.update(testutil::random_unit(rng, 8) * 3.0, rng.normal());
    EXPECT_LT(s.inverse_drift(), RidgeState::kDriftTolerance);
}

TEST(ConfidenceBall, ContainsCenterNotFarPoint)
{
    auto s = ridge_update(ridge_init(2, 1.0), vec({1, 0}), 1.0);
    const auto ball = ConfidenceBall::of(s, 1.0);
    EXPECT_TRUE(ball.contains(s.mu_hat()));
    EXPECT_FALSE(ball.contains(s.mu_hat() + vec({10, 0})));
}
