#include <gtest/gtest.h>

#include <cstdlib>
#include <sys/wait.h>

#include <json.hpp>

#include "helpers.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string err;
};

Outcome bandit(const std::string& args, const fs::path& dir)
{
    const auto err = dir / "stderr.txt";
    const std::string cmd = std::string(BANDIT_EXE) + " " + args + " >/dev/null 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, testutil::slurp(err)};
}

} // namespace

TEST(Cli, RunWritesFiles)
{
    const auto dir = testutil::scratch_dir("cli-run");
    const auto r = bandit("run --env synthetic --policy lnucb-ta --T 200 --seeds 7 --trace --out " + (dir / "o").string(), dir);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "o" / "result.csv"));
    EXPECT_TRUE(fs::exists(dir / "o" / "result.json"));
    const auto csv = testutil::slurp(dir / "o" / "result.csv");
    EXPECT_NE(csv.find(",linear,knn,alpha,width,ucb"), std::string::npos);
}

TEST(Cli, MissingDatasetExitsTwoNamingPath)
{
    const auto dir = testutil::scratch_dir("cli-missing");
    const auto r = bandit("compare --env classification --data /no/where/mushroom.csv --policy lnucb-ta --policy ucb --out " +
                              (dir / "o").string(),
                          dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("/no/where/mushroom.csv"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "o" / "aggregate.csv"));
}

TEST(Cli, MissingConfigExitsTwo)
{
    const auto dir = testutil::scratch_dir("cli-config");
    const auto r = bandit("run --config /no/such.cfg", dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("/no/such.cfg"), std::string::npos);
}

TEST(Cli, BadFlagsExitTwo)
{
    const auto dir = testutil::scratch_dir("cli-bad");
    EXPECT_EQ(bandit("run --policy nope --out " + (dir / "o").string(), dir).code, 2);
    EXPECT_EQ(bandit("run --policy linucb --alpha0 abc --out " + (dir / "o").string(), dir).code, 2);
    EXPECT_EQ(bandit("frobnicate", dir).code, 2);
}

TEST(Cli, ConfigFileWithFlagOverride)
{
    const auto dir = testutil::scratch_dir("cli-cfg");
    {
        std::ofstream f(dir / "exp.cfg");
        f << "[experiment]\nT = 100\nseeds = 0-1\n[policy linucb]\nalpha0 = 0.5\n[policy ucb]\nrho = 2\n";
    }
    const auto r = bandit("compare --config " + (dir / "exp.cfg").string() + " --T 50 --out " + (dir / "o").string(), dir);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto agg = testutil::slurp(dir / "o" / "aggregate.csv");
    EXPECT_NE(agg.find("alpha0=0.5"), std::string::npos);
    EXPECT_NE(agg.find("rho=2"), std::string::npos);
    const auto j = nlohmann::json::parse(testutil::slurp(dir / "o" / "aggregate.json"));
    EXPECT_EQ(j["horizon"], 50);
}

TEST(Cli, SweepAndBound)
{
    const auto dir = testutil::scratch_dir("cli-sweep");
    auto r = bandit("sweep --policy linucb --policy eps-greedy --grid alpha=0.1,1,10 --grid epsilon=0.05,0.1 --T 100 --seeds 0-2 "
                    "--jobs 3 --out " + (dir / "s").string(),
                    dir);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto best = testutil::slurp(dir / "s" / "best.csv");
    EXPECT_EQ(std::count(best.begin(), best.end(), '\n'), 3);
    r = bandit("bound --T 1000 --b 2 --out " + (dir / "b").string(), dir);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto bound = testutil::slurp(dir / "b" / "bound.csv");
    EXPECT_EQ(bound.substr(0, bound.find('\n')), "t,beta,regret_bound");
}

TEST(Cli, InjectedFailureExitsOneWithoutOutput)
{
    const auto dir = testutil::scratch_dir("cli-fail");
    const auto r = bandit("compare --policy linucb --policy ucb --T 50 --fail-after-writes 2 --out " + (dir / "o").string(), dir);
    EXPECT_EQ(r.code, 1);
    EXPECT_TRUE(fs::is_empty(dir / "o"));
}
