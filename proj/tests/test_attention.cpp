#include <gtest/gtest.h>

#include <numeric>

#include "lnucb/attention.hpp"

using namespace lnucb;

TEST(RewardStats, LocalMean)
{
    RewardStats s(2);
    EXPECT_EQ(s.local_mean(0), 0.0);
    s.record(0, 1.0);
    s.record(0, 0.0);
    EXPECT_DOUBLE_EQ(local_mean(s, 0), 0.5);
    s.record(1, 0.3);
    EXPECT_DOUBLE_EQ(local_mean(s, 1), 0.3);
}

TEST(RewardStats, GlobalMean)
{
    RewardStats none(3);
    EXPECT_EQ(global_mean(none), 0.0);
    RewardStats two(2);
    two.record(0, 0.5);
    two.record(1, 0.3);
    EXPECT_DOUBLE_EQ(global_mean(two), 0.4);
    RewardStats one(1);
    one.record(0, 0.9);
    EXPECT_DOUBLE_EQ(global_mean(one), 0.9);
}

TEST(RewardStats, UnpulledArmsCountAsZeroInGlobalMean)
{
    RewardStats s(4);
    s.record(2, 0.8);
    EXPECT_DOUBLE_EQ(s.global_mean(), 0.2);
}

TEST(ExplorationRate, Examples)
{
    EXPECT_EQ(exploration_rate({3.0, 0.4}, 17, 0.0, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(exploration_rate({1.0, 1.0}, 1, 0.8, 0.0), 0.4);
    EXPECT_DOUBLE_EQ(exploration_rate({1.0, 0.0}, 0, 0.0, 0.6), 0.6);
}

TEST(ExplorationRate, ForwardDifference)
{
    EXPECT_DOUBLE_EQ(alpha_forward_difference({1.0, 1.0}, 0, 1.0, 0.0), -0.5);
    EXPECT_EQ(alpha_forward_difference({1.0, 0.5}, 9, 0.0, 0.0), 0.0);
    for (std::size_t n = 0; n < 1000; n += 37) {
        EXPECT_LT(alpha_forward_difference({2.0, 0.5}, n, 0.3, 0.0), 0.0);
        EXPECT_LT(alpha_forward_difference({2.0, 0.5}, n, 0.0, 0.3), 0.0);
    }
}

TEST(Softmax, Examples)
{
    const std::vector<std::size_t> equal{4, 4, 4, 4};
    for (double w : softmax_attention(equal, 1.0)) EXPECT_DOUBLE_EQ(w, 0.25);
    const std::vector<std::size_t> skewed{0, 50};
    EXPECT_GT(softmax_attention(skewed, 1.0)[0], 0.999);
    const std::vector<std::size_t> single{123};
    EXPECT_EQ(softmax_attention(single, 1.0), std::vector<double>{1.0});
}

TEST(Softmax, StableForHugeCounts)
{
    const std::vector<std::size_t> counts{100000, 100001, 200000};
    const auto w = softmax_attention(counts, 2.0);
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
    for (double v : w) EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(w[0], w[1]);
}
