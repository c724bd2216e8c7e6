#include <gtest/gtest.h>

#include "helpers.hpp"
#include "lnucb/experiment.hpp"

using namespace lnucb;
namespace fs = std::filesystem;

namespace {

ExperimentSpec small_spec(const fs::path& out)
{
    ExperimentSpec s;
    s.out = out.string();
    s.horizon = 120;
    s.seeds = {0, 1};
    s.policies = {{"lnucb-ta", PolicyConfig{}}, {"linucb", PolicyConfig{}}};
    return s;
}

std::string strip_runtime_csv(const std::string& csv)
{
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
}

std::vector<std::string> list(const fs::path& dir)
{
    std::vector<std::string> names;
    for (const auto& e : fs::recursive_directory_iterator(dir)) names.push_back(fs::relative(e.path(), dir).string());
    std::sort(names.begin(), names.end());
    return names;
}

} // namespace

TEST(Seeds, Parsing)
{
    EXPECT_EQ(parse_seeds("7"), (std::vector<std::uint64_t>{7}));
    EXPECT_EQ(parse_seeds("0-3,9"), (std::vector<std::uint64_t>{0, 1, 2, 3, 9}));
    EXPECT_THROW(parse_seeds("5-2"), ConfigError);
    EXPECT_THROW(parse_seeds("x"), ConfigError);
}

TEST(PolicyArg, InlineParameters)
{
    const auto p = parse_policy_arg("linucb:alpha0=0.5,lambda=2", PolicyConfig{});
    EXPECT_EQ(p.id, "linucb");
    EXPECT_EQ(p.cfg.alpha0, 0.5);
    EXPECT_EQ(p.cfg.lambda, 2.0);
    EXPECT_THROW(parse_policy_arg("nope", PolicyConfig{}), ConfigError);
    EXPECT_THROW(parse_policy_arg("linucb:alpha0", PolicyConfig{}), ConfigError);
}

TEST(ConfigFile, Sections)
{
    const auto cf = parse_config(R"(# comment
[experiment]
T = 300
seeds = 0-2
[env]
kind = synthetic
noise_sigma = 0.2
[policy]
lambda = 2
[policy lnucb-ta]
alpha0 = 10   ; trailing comment
[grid]
alpha = 0.1, 1, 10
[diagnostics]
sigma = 0.5
)",
                                 "cfg");
    EXPECT_EQ(cf.spec.horizon, 300u);
    EXPECT_EQ(cf.spec.seeds.size(), 3u);
    EXPECT_EQ(cf.spec.env.synthetic.noise_sigma, 0.2);
    EXPECT_EQ(cf.defaults.lambda, 2.0);
    ASSERT_EQ(cf.policy_sections.size(), 1u);
    EXPECT_EQ(cf.policy_sections[0].first, "lnucb-ta");
    EXPECT_EQ(cf.spec.grid.at("alpha0").size(), 3u);
    EXPECT_EQ(cf.spec.diagnostics.sigma, 0.5);
}

TEST(ConfigFile, ErrorsNameLine)
{
    try {
        parse_config("[env]\nnoise_sigma = 0.1\nbogus = 3\n", "my.cfg");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("my.cfg:3"), std::string::npos);
    }
    EXPECT_THROW(parse_config("[nope]\n", "c"), ConfigError);
    EXPECT_THROW(parse_config("[policy nope]\n", "c"), ConfigError);
    EXPECT_THROW(parse_config("T 3\n", "c"), ConfigError);
}

TEST(Grid, PointsOnlyForRelevantKeys)
{
    std::map<std::string, std::vector<std::string>> grid{{"alpha0", {"0.1", "1"}}, {"epsilon", {"0.1", "0.2", "0.5"}}};
    EXPECT_EQ(grid_points("linucb", grid).size(), 2u);
    EXPECT_EQ(grid_points("eps-greedy", grid).size(), 3u);
    EXPECT_EQ(grid_points("ucb", grid).size(), 1u);
}

TEST(Best, TiesGoToSmallerParameter)
{
    std::vector<BestRow> c{{"p", "a=10", {{"alpha0", "10"}}, 0.5, 5},
                           {"p", "a=1", {{"alpha0", "1"}}, 0.5, 5},
                           {"p", "a=0.1", {{"alpha0", "0.1"}}, 0.4, 4},
                           {"q", "e=0.2", {{"epsilon", "0.2"}}, 0.1, 1},
                           {"q", "e=0.5", {{"epsilon", "0.5"}}, 0.2, 2}};
    const auto best = select_best(c);
    ASSERT_EQ(best.size(), 2u);
    EXPECT_EQ(best[0].params, "a=1");
    EXPECT_EQ(best[1].params, "e=0.5");
}

TEST(Commands, RunIsByteIdenticalAndTraced)
{
    const auto dir = testutil::scratch_dir("run");
    ExperimentSpec s = small_spec(dir / "a");
    s.policies.resize(1);
    s.seeds = {7};
    s.trace = true;
    cmd_run(s);
    s.out = (dir / "b").string();
    cmd_run(s);
    for (const char* f : {"result.csv", "result.json"}) {
        EXPECT_EQ(testutil::slurp(dir / "a" / f), testutil::slurp(dir / "b" / f)) << f;
    }
    const auto csv = testutil::slurp(dir / "a" / "result.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "round,cumulative_reward,mean_reward,cumulative_regret,linear,knn,alpha,width,ucb");
    const auto j = nlohmann::json::parse(testutil::slurp(dir / "a" / "result.json"));
    EXPECT_EQ(j["seed"], 7);
    EXPECT_EQ(j["version"], kVersion);
    EXPECT_FALSE(j["dataset_fingerprint"].get<std::string>().empty());
    EXPECT_EQ(j["policies"][0]["config"]["alpha0"], "1");
}

TEST(Commands, RunRequiresSinglePolicyAndSeed)
{
    const auto dir = testutil::scratch_dir("run-bad");
    EXPECT_THROW(cmd_run(small_spec(dir)), ConfigError);
}

TEST(Commands, CompareCountsAndParallelDeterminism)
{
    const auto dir = testutil::scratch_dir("compare");
    auto s = small_spec(dir / "serial");
    s.policies.push_back({"ucb", PolicyConfig{}});
    s.policies.push_back({"knn-ucb", PolicyConfig{}});
    s.seeds = {0, 1, 2};
    const auto agg = cmd_compare(s);
    EXPECT_EQ(agg.rows.size(), 4u);
    std::size_t runs = 0;
    for (const auto& e : fs::directory_iterator(dir / "serial" / "runs")) runs += e.is_regular_file();
    EXPECT_EQ(runs, 12u);
    s.out = (dir / "parallel").string();
    s.jobs = 8;
    cmd_compare(s);
    EXPECT_EQ(strip_runtime_csv(testutil::slurp(dir / "serial" / "aggregate.csv")),
              strip_runtime_csv(testutil::slurp(dir / "parallel" / "aggregate.csv")));
    EXPECT_EQ(list(dir / "serial"), list(dir / "parallel"));
}

TEST(Commands, SweepCountsAndBest)
{
    const auto dir = testutil::scratch_dir("sweep");
    auto s = small_spec(dir);
    s.seeds = {0, 1, 2};
    s.grid["alpha0"] = {"0.1", "1", "10"};
    const auto sr = cmd_sweep(s);
    for (const auto& row : sr.aggregate.rows) EXPECT_EQ(row.runs, 3u);
    EXPECT_EQ(sr.aggregate.rows.size(), 6u);
    EXPECT_EQ(sr.best.size(), 2u);
    const auto robust = testutil::slurp(dir / "robustness.csv");
    EXPECT_EQ(std::count(robust.begin(), robust.end(), '\n'), 7);
    s.grid = {{"epsilon", {"0.1"}}};
    EXPECT_THROW(cmd_sweep(s), ConfigError);
}

TEST(Commands, BoundCurveAndOverlay)
{
    const auto dir = testutil::scratch_dir("bound");
    ExperimentSpec s;
    s.out = (dir / "b1").string();
    s.bound_horizon = 10000;
    const auto c1 = cmd_bound(s);
    EXPECT_TRUE(std::is_sorted(c1.begin(), c1.end()));
    const auto csv = testutil::slurp(dir / "b1" / "bound.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10001);
    s.diagnostics.b = 2;
    s.out = (dir / "b2").string();
    const auto c2 = cmd_bound(s);
    for (std::size_t i = 0; i < c1.size(); i += 101) EXPECT_NEAR(c2[i], 2 * c1[i], 1e-12 * c2[i]);

    auto r = small_spec(dir / "run");
    r.policies.resize(1);
    r.seeds = {1};
    r.horizon = 77;
    cmd_run(r);
    s.out = (dir / "overlay").string();
    cmd_bound(s, (dir / "run" / "result.csv").string());
    const auto ov = testutil::slurp(dir / "overlay" / "overlay.csv");
    EXPECT_EQ(std::count(ov.begin(), ov.end(), '\n'), 78);
}

TEST(Commands, InjectedFailureLeavesNothing)
{
    const auto dir = testutil::scratch_dir("atomic");
    auto s = small_spec(dir);
    s.fail_after_writes = 3;
    EXPECT_THROW(cmd_compare(s), std::runtime_error);
    EXPECT_TRUE(list(dir).empty());
}

TEST(Commands, FailureKeepsPreviousResults)
{
    const auto dir = testutil::scratch_dir("atomic-keep");
    auto s = small_spec(dir);
    cmd_compare(s);
    const auto before = testutil::slurp(dir / "aggregate.csv");
    s.horizon = 50;
    s.fail_after_writes = 2;
    EXPECT_THROW(cmd_compare(s), std::runtime_error);
    EXPECT_EQ(testutil::slurp(dir / "aggregate.csv"), before);
    for (const auto& e : fs::directory_iterator(dir)) EXPECT_FALSE(e.path().filename().string().starts_with(".staging"));
}

TEST(Commands, MissingDataPath)
{
    const auto dir = testutil::scratch_dir("missing");
    auto s = small_spec(dir);
    s.env.kind = "classification";
    s.env.data = "/no/such/file.csv";
    try {
        cmd_compare(s);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/no/such/file.csv"), std::string::npos);
    }
}

TEST(Commands, ClassificationAndNewsFromFiles)
{
    const auto dir = testutil::scratch_dir("files");
    {
        std::ofstream f(dir / "iris.csv");
        f << "a,b,c,label\n";
        Rng rng(1);
        for (int i = 0; i < 60; ++i) {
            const int y = i % 3;
            f << 1 + y + rng.uniform() << ',' << 3 - y + rng.uniform() << ',' << rng.uniform() + 0.1 << ",c" << y << '\n';
        }
    }
    auto s = small_spec(dir / "cls");
    s.env.kind = "classification";
    s.env.data = (dir / "iris.csv").string();
    const auto agg = cmd_compare(s);
    EXPECT_TRUE(agg.rows[0].has_regret);

    {
        std::ofstream f(dir / "news.csv");
        Rng rng(2);
        for (int i = 0; i < 500; ++i) {
            f << 1 + rng.below(10) << ',' << (rng.uniform() < 0.1 ? 1 : 0);
            for (int j = 0; j < 100; ++j) f << ',' << rng.uniform();
            f << '\n';
        }
    }
    auto n = small_spec(dir / "news");
    n.env.kind = "news";
    n.env.data = (dir / "news.csv").string();
    n.horizon = 20;
    const auto nagg = cmd_compare(n);
    EXPECT_FALSE(nagg.rows[0].has_regret);
}
