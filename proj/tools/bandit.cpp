// bandit: run / compare / sweep / bound front end for the lnucb library.

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lnucb/experiment.hpp"

namespace {

struct Flags {
    std::optional<std::string> config;
    std::optional<std::string> env;
    std::optional<std::string> data;
    std::vector<std::string> policies;
    std::optional<std::size_t> horizon;
    std::optional<std::string> seeds;
    std::optional<std::size_t> jobs;
    std::optional<std::string> out;
    std::optional<std::string> format;
    bool trace = false;
    std::vector<std::string> env_params;
    std::vector<std::string> grid;
    std::map<std::string, std::string> policy_params;
    std::map<std::string, std::string> diagnostics;
    std::optional<std::string> overlay;
    std::size_t fail_after_writes = 0;
};

void add_common(CLI::App* cmd, Flags& f, std::map<std::string, std::optional<std::string>>& policy_opts)
{
    cmd->add_option("--config", f.config, "key = value config file; flags override it");
    cmd->add_option("--env", f.env, "synthetic | classification | bumpy | news");
    cmd->add_option("--data", f.data, "dataset path (classification, news)");
    cmd->add_option("--env-param", f.env_params, "environment parameter key=value (repeatable)");
    cmd->add_option("--policy", f.policies, "policy id, optionally id:key=val,key=val (repeatable)");
    cmd->add_option("--T", f.horizon, "horizon (feedback steps)");
    cmd->add_option("--seeds", f.seeds, "seed list: 7 | 0-19 | 1,4,9");
    cmd->add_option("--jobs", f.jobs, "parallel workers");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--format", f.format, "csv,json");
    cmd->add_flag("--trace", f.trace, "emit the per-round score breakdown of the chosen arm");
    cmd->add_option("--fail-after-writes", f.fail_after_writes)->group("");
    for (const auto& key : lnucb::PolicyConfig::keys()) {
        cmd->add_option("--" + key, policy_opts[key], "policy parameter applied to every policy")->group("Policy parameters");
    }
}

lnucb::ExperimentSpec build_spec(const Flags& f, const std::map<std::string, std::optional<std::string>>& policy_opts)
{
    using namespace lnucb;
    ConfigFile cf;
    if (f.config) cf = load_config(*f.config);
    ExperimentSpec spec = cf.spec;

    try {
        if (f.env) spec.env.set("kind", *f.env);
        if (f.data) spec.env.set("data", *f.data);
        for (const auto& kv : f.env_params) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--env-param expects key=value: " + kv);
            spec.env.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (f.horizon) spec.horizon = *f.horizon;
        if (f.seeds) spec.seeds = parse_seeds(*f.seeds);
        if (f.jobs) spec.jobs = *f.jobs;
        if (f.out) spec.out = *f.out;
        if (f.format) spec.formats = detail::split_list(*f.format);
        if (f.trace) spec.trace = true;
        spec.fail_after_writes = f.fail_after_writes;
        for (const auto& g : f.grid) {
            const auto eq = g.find('=');
            if (eq == std::string::npos) throw ConfigError("--grid expects key=v1,v2,...: " + g);
            auto key = detail::trim(g.substr(0, eq));
            if (key == "alpha") key = "alpha0";
            spec.grid[key] = detail::split_list(g.substr(eq + 1));
        }
        for (const auto& [k, v] : f.diagnostics) set_diagnostic(spec.diagnostics, k, v);
        if (f.horizon) spec.bound_horizon = *f.horizon;
    } catch (const ConfigError&) {
        throw;
    } catch (const BanditError& e) {
        throw ConfigError(e.what());
    }

    // Precedence: [policy] defaults < [policy <id>] < global flags < inline id:key=val.
    auto base_for = [&](const std::string& id, const std::vector<std::pair<std::string, std::string>>* section) {
        PolicyConfig cfg = cf.defaults;
        if (section) {
            for (const auto& [k, v] : *section) cfg.set(k, v);
        }
        for (const auto& [k, v] : policy_opts) {
            if (v) cfg.set(k, *v);
        }
        (void)id;
        return cfg;
    };
    try {
        if (!f.policies.empty()) {
            spec.policies.clear();
            for (const auto& arg : f.policies) {
                const auto id = detail::trim(arg.substr(0, arg.find(':')));
                const std::vector<std::pair<std::string, std::string>>* section = nullptr;
                for (const auto& s : cf.policy_sections) {
                    if (s.first == id) {
                        section = &s.second;
                        break;
                    }
                }
                spec.policies.push_back(parse_policy_arg(arg, base_for(id, section)));
            }
        } else {
            spec.policies.clear();
            for (const auto& s : cf.policy_sections) spec.policies.push_back({s.first, base_for(s.first, &s.second)});
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const BanditError& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Contextual bandit experiments: LNUCB-TA and baselines"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(lnucb::kVersion));

    Flags f;
    std::map<std::string, std::optional<std::string>> policy_opts;

    auto* run = app.add_subcommand("run", "one policy, one seed: result.csv + result.json");
    auto* compare = app.add_subcommand("compare", "policies x seeds: aggregate.csv, aggregate.json, robustness.csv");
    auto* sweep = app.add_subcommand("sweep", "grid x seeds per policy: sweep.csv, best.csv, robustness.csv");
    auto* bound = app.add_subcommand("bound", "theoretical regret bound curve: bound.csv");
    for (auto* cmd : {run, compare, sweep}) add_common(cmd, f, policy_opts);
    sweep->add_option("--grid", f.grid, "parameter grid key=v1,v2,... (repeatable)");

    bound->add_option("--config", f.config, "config file ([diagnostics] section)");
    bound->add_option("--T", f.horizon, "horizon (default 10000)");
    bound->add_option("--out", f.out, "output directory");
    bound->add_option("--format", f.format, "csv,json");
    bound->add_option("--overlay", f.overlay, "result.csv whose regret column is paired with the bound");
    bound->add_option("--fail-after-writes", f.fail_after_writes)->group("");
    std::map<std::string, std::optional<std::string>> diag_opts;
    for (const char* key : {"sigma", "delta", "B", "W", "d", "b", "u-sum"}) {
        bound->add_option(std::string("--") + key, diag_opts[key]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        for (const auto& [k, v] : diag_opts) {
            if (v) f.diagnostics[k == "u-sum" ? "u_sum" : k] = *v;
        }
        const auto spec = build_spec(f, policy_opts);
        if (run->parsed()) {
            lnucb::cmd_run(spec);
        } else if (compare->parsed()) {
            const auto agg = lnucb::cmd_compare(spec);
            std::cout << lnucb::aggregate_csv(agg.rows);
        } else if (sweep->parsed()) {
            const auto sr = lnucb::cmd_sweep(spec);
            for (const auto& b : sr.best) {
                std::cout << b.policy << " best " << b.params << " mean_reward "
                          << lnucb::format_double(b.final_mean_reward) << '\n';
            }
        } else {
            lnucb::cmd_bound(spec, f.overlay.value_or(""));
        }
        std::cerr << "bandit: wrote " << spec.out << '\n';
    } catch (const lnucb::BanditError& e) {
        std::cerr << "bandit: error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "bandit: failed: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
