#include <gtest/gtest.h>

#include <algorithm>

#include "helpers.hpp"
#include "lnucb/metrics.hpp"

using namespace lnucb;

namespace {

RunResult fake_run(const std::string& policy, const std::string& params, std::uint64_t seed, std::vector<double> rewards)
{
    RunResult r;
    r.policy = policy;
    r.params = params;
    r.seed = seed;
    r.rewards = std::move(rewards);
    cumulative_and_mean(r.rewards, r.cumulative_reward, r.mean_reward);
    return r;
}

} // namespace

TEST(Regret, Examples)
{
    const std::vector<double> r{1, 0}, o{1, 1};
    EXPECT_EQ(regret_series(r, o), (std::vector<double>{0, 1}));
    EXPECT_EQ(regret_series(o, o), (std::vector<double>{0, 0}));
}

TEST(Regret, BinaryIdentity)
{
    Rng rng(1);
    std::vector<double> r(500), ones(500, 1.0);
    for (auto& v : r) v = rng.uniform() < 0.4 ? 1.0 : 0.0;
    const auto reg = regret_series(r, ones);
    std::vector<double> cum, mean;
    cumulative_and_mean(r, cum, mean);
    for (std::size_t t = 0; t < r.size(); ++t) EXPECT_EQ(reg[t], static_cast<double>(t + 1) - cum[t]);
}

TEST(Series, MeanTimesCountIsCumulative)
{
    const std::vector<double> r{1, 0, 1, 1, 0, 0, 1};
    std::vector<double> cum, mean;
    cumulative_and_mean(r, cum, mean);
    for (std::size_t t = 0; t < r.size(); ++t) EXPECT_EQ(mean[t] * static_cast<double>(t + 1), cum[t]);
}

TEST(Bound, BetaHandValue)
{
    DiagnosticsParams p;
    p.sigma = 1;
    p.dim = 2;
    p.context_bound = p.parameter_bound = 1;
    p.knn_uncertainty_sum = 0;
    p.delta = 0.1;
    EXPECT_NEAR(beta_bound(p, 100), 2 + 8 * std::log(51.0) + 8 * std::log(40.0), 1e-9);
    EXPECT_NEAR(beta_bound(p, 100), 62.97, 0.01);
    EXPECT_NEAR(beta_bound(p, 0), 2 + 8 * std::log(40.0), 1e-12);
    p.delta = 4.0;
    EXPECT_NEAR(beta_bound(p, 0), 2.0, 1e-15);
}

TEST(Bound, CurveMonotoneSublinearAndLinearInB)
{
    DiagnosticsParams p;
    const auto c = regret_bound_curve(p, 10000);
    EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
    EXPECT_LT(c.back() / 10000.0, c[99] / 100.0);
    p.b = 2;
    const auto c2 = regret_bound_curve(p, 10000);
    for (std::size_t i = 0; i < c.size(); i += 97) EXPECT_NEAR(c2[i], 2 * c[i], 1e-9 * c2[i]);
}

TEST(Sublinearity, ExactPowerLaws)
{
    std::vector<double> lin(1000), root(1000), flat(1000, 3.0);
    for (std::size_t i = 0; i < 1000; ++i) {
        lin[i] = static_cast<double>(i + 1);
        root[i] = std::sqrt(static_cast<double>(i + 1));
    }
    EXPECT_NEAR(sublinearity_exponent(lin), 1.0, 1e-6);
    EXPECT_NEAR(sublinearity_exponent(root), 0.5, 1e-6);
    EXPECT_NEAR(sublinearity_exponent(flat), 0.0, 1e-6);
}

TEST(MeanStd, Examples)
{
    const std::vector<double> one{7.0}, two{10.0, 20.0};
    EXPECT_EQ(mean_std(one).std, 0.0);
    EXPECT_EQ(mean_std(two).mean, 15.0);
    EXPECT_EQ(mean_std(two).std, 5.0);
}

TEST(Aggregate, GroupsAndIsPermutationInvariant)
{
    std::vector<RunResult> runs{
        fake_run("a", "x=1", 0, {1, 0, 1}), fake_run("a", "x=1", 1, {0, 0, 1}), fake_run("a", "x=2", 0, {1, 1, 1}),
        fake_run("b", "", 0, {0.3, 0.5, 0.25}), fake_run("b", "", 1, {0.1, 0.9, 0.7})};
    const auto agg = aggregate(runs);
    ASSERT_EQ(agg.rows.size(), 3u);
    EXPECT_EQ(agg.rows[0].runs, 2u);
    EXPECT_DOUBLE_EQ(agg.rows[0].final_cum_reward.mean, 1.5);
    EXPECT_DOUBLE_EQ(agg.rows[0].final_cum_reward.std, 0.5);
    std::vector<std::size_t> perm{0, 1, 2, 3, 4};
    do {
        std::vector<RunResult> shuffled;
        for (auto i : perm) shuffled.push_back(runs[i]);
        const auto other = aggregate(shuffled);
        ASSERT_EQ(other.rows.size(), agg.rows.size());
        for (std::size_t i = 0; i < agg.rows.size(); ++i) {
            EXPECT_EQ(other.rows[i].policy, agg.rows[i].policy);
            EXPECT_EQ(other.rows[i].final_cum_reward.mean, agg.rows[i].final_cum_reward.mean);
            EXPECT_EQ(other.rows[i].final_mean_reward.std, agg.rows[i].final_mean_reward.std);
        }
        EXPECT_EQ(other.robustness, agg.robustness);
    } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST(Aggregate, MixedHorizonsRejected)
{
    std::vector<RunResult> runs{fake_run("a", "", 0, {1, 0}), fake_run("a", "", 1, {1})};
    EXPECT_THROW(aggregate(runs), BanditError);
}
