#include <gtest/gtest.h>

#include <cstring>

#include "helpers.hpp"
#include "lnucb/policies.hpp"

using namespace lnucb;
using testutil::vec;

namespace {

class FixedScores : public Policy {
public:
    explicit FixedScores(std::vector<double> s) : s_(std::move(s)) {}
    std::string id() const override { return "fixed"; }
    std::size_t arms() const override { return s_.size(); }
    std::size_t dim() const override { return 2; }
    std::vector<double> scores(const Context& x, std::size_t) const override
    {
        check_context(x);
        return s_;
    }
    void update(ArmIndex arm, const Context& x, double reward) override { check_update(arm, x, reward); }
    std::unique_ptr<Policy> clone() const override { return std::make_unique<FixedScores>(*this); }

private:
    std::vector<double> s_;
};

bool same_bytes(const Matrix& a, const Matrix& b)
{
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

} // namespace

TEST(Rng, SameSeedSameStream)
{
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        differs = differs || x != c.next_u64();
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, UniformInUnitInterval)
{
    Rng r(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(Rng, BelowStaysInRange)
{
    Rng r(5);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 7000; ++i) ++hits[r.below(7)];
    for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, NormalMoments)
{
    Rng r(3);
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Rng, BetaMean)
{
    Rng r(9);
    const int n = 100000;
    double s = 0;
    for (int i = 0; i < n; ++i) {
        const double b = r.beta(2.0, 5.0);
        ASSERT_GT(b, 0.0);
        ASSERT_LT(b, 1.0);
        s += b;
    }
    EXPECT_NEAR(s / n, 2.0 / 7.0, 0.005);
}

TEST(Rng, GammaSmallShapeMean)
{
    Rng r(11);
    const int n = 100000;
    double s = 0;
    for (int i = 0; i < n; ++i) s += r.gamma(0.5);
    EXPECT_NEAR(s / n, 0.5, 0.01);
}

TEST(Argmax, PicksLargest)
{
    const std::vector<double> s{0.1, 0.9, 0.3};
    EXPECT_EQ(argmax(s), 1u);
}

TEST(Argmax, TiesGoToLowestIndex)
{
    const std::vector<double> s{0.5, 0.7, 0.7, 0.2};
    EXPECT_EQ(argmax(s), 1u);
}

TEST(Argmax, SeededRandomTieBreakIsReproducibleAndAmongTies)
{
    const std::vector<double> s{0.7, 0.1, 0.7, 0.7};
    std::vector<int> seen(4, 0);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng a(seed), b(seed);
        const auto pick = argmax(s, TieBreak::SeededRandom, &a);
        EXPECT_EQ(pick, argmax(s, TieBreak::SeededRandom, &b));
        ++seen[pick];
    }
    EXPECT_EQ(seen[1], 0);
    EXPECT_GT(seen[0], 0);
    EXPECT_GT(seen[2], 0);
    EXPECT_GT(seen[3], 0);
}

TEST(Policy, SelectIsArgmaxOfScores)
{
    FixedScores p({0.1, 0.9, 0.3});
    EXPECT_EQ(policy_select(p, vec({1, 0}), 0), 1u);
}

TEST(Policy, RejectsWrongDimensionAndArm)
{
    FixedScores p({0.1, 0.9});
    EXPECT_THROW(p.select(vec({1, 0, 0}), 0), BanditError);
    EXPECT_THROW(p.update(2, vec({1, 0}), 1.0), BanditError);
    EXPECT_THROW(p.update(0, vec({1, 0}), std::nan("")), BanditError);
}

TEST(Policy, UntrainedLnucbTiesToArmZero)
{
    auto p = make_policy("lnucb-ta", 4, 3, PolicyConfig{});
    EXPECT_EQ(p->select(vec({0.6, 0.8, 0}), 0), 0u);
}

TEST(Policy, SymmetricStateTiesToLowerIndex)
{
    auto p = make_policy("lnucb-ta", 2, 2, PolicyConfig{});
    const auto x = vec({0.6, 0.8});
    for (ArmIndex a : {0u, 1u}) p->update(a, x, 0.4);
    const auto s = p->scores(x, 2);
    EXPECT_NEAR(s[0], s[1], 1e-12);
    EXPECT_EQ(p->select(x, 2), 0u);
    // Reverse insertion order for the other arm; scores still agree to 12 decimals.
    auto q = make_policy("lnucb-ta", 2, 2, PolicyConfig{});
    q->update(1, x, 0.4);
    q->update(0, x, 0.4);
    EXPECT_EQ(q->select(x, 2), 0u);
}

TEST(Policy, CountsAndLocalMean)
{
    HybridUcb p("lnucb-ta", 3, 2, PolicyConfig{});
    p.update(0, vec({1, 0}), 0.5);
    EXPECT_EQ(p.model(0).pulls, 1u);
    EXPECT_EQ(p.model(1).pulls, 0u);
    EXPECT_EQ(p.model(2).pulls, 0u);
    p.update(1, vec({1, 0}), 1.0);
    p.update(1, vec({0, 1}), 0.0);
    EXPECT_DOUBLE_EQ(p.stats().local_mean(1), 0.5);
}

TEST(Policy, UpdateIsolatesArms)
{
    HybridUcb p("lnucb-ta", 3, 3, PolicyConfig{});
    Rng rng(1);
    for (int t = 0; t < 30; ++t) p.update(static_cast<ArmIndex>(t % 3), testutil::random_unit(rng, 3), rng.uniform());
    const Matrix sigma1 = p.model(1).ridge.sigma();
    const Matrix inv1 = p.model(1).ridge.sigma_inv();
    const Matrix mu1 = p.model(1).ridge.mu_hat();
    const auto size1 = p.model(1).neighbors.size();
    p.update(0, testutil::random_unit(rng, 3), 0.9);
    EXPECT_TRUE(same_bytes(sigma1, p.model(1).ridge.sigma()));
    EXPECT_TRUE(same_bytes(inv1, p.model(1).ridge.sigma_inv()));
    EXPECT_TRUE(same_bytes(mu1, p.model(1).ridge.mu_hat()));
    EXPECT_EQ(size1, p.model(1).neighbors.size());
}

TEST(Policy, SelectIsPure)
{
    auto p = make_policy("eps-greedy", 4, 2, [] {
        PolicyConfig c;
        c.epsilon = 0.5;
        return c;
    }());
    p->set_seed(17);
    const auto x = vec({1, 0});
    for (std::size_t round = 0; round < 50; ++round) EXPECT_EQ(p->select(x, round), p->select(x, round));
}
