#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lnucb/config.hpp"
#include "lnucb/env.hpp"
#include "lnucb/metrics.hpp"
#include "lnucb/policies.hpp"
#include "lnucb/runner.hpp"

namespace lnucb {

inline constexpr const char* kVersion = "lnucb 0.1.0";

/// Bad configuration or unusable path. The CLI maps this to exit code 2.
class ConfigError : public BanditError {
public:
    using BanditError::BanditError;
};

namespace detail {

inline std::string trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

inline std::vector<std::string> split_list(const std::string& s, char sep = ',')
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        auto t = trim(cur);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Environment spec
// ---------------------------------------------------------------------------

struct EnvSpec {
    /// synthetic | classification | bumpy | news
    std::string kind = "synthetic";
    std::string data;
    SyntheticParams synthetic;
    /// Rows of the generated bumpy classification set.
    std::size_t rows = 5000;
    double class_radius = 0.35;
    bool header = true;
    long label_column = -1;

    static const std::vector<std::string>& keys()
    {
        static const std::vector<std::string> all = {
            "kind", "data", "dim", "arms", "bumps", "noise_sigma", "linear_scale", "bump_scale", "bump_radius", "offset",
            "clusters", "cluster_jitter", "rows", "class_radius", "header", "label_column"};
        return all;
    }

    void set(const std::string& key, const std::string& value)
    {
        if (key == "kind") {
            if (value != "synthetic" && value != "classification" && value != "bumpy" && value != "news")
                throw ConfigError("unknown env kind: '" + value + "' (expected synthetic, classification, bumpy, news)");
            kind = value;
        }
        else if (key == "data") data = value;
        else if (key == "dim") synthetic.dim = parse_size(key, value);
        else if (key == "arms") synthetic.arms = parse_size(key, value);
        else if (key == "bumps") synthetic.bumps = parse_size(key, value);
        else if (key == "noise_sigma") synthetic.noise_sigma = parse_double(key, value);
        else if (key == "linear_scale") synthetic.linear_scale = parse_double(key, value);
        else if (key == "bump_scale") synthetic.bump_scale = parse_double(key, value);
        else if (key == "bump_radius") synthetic.bump_radius = parse_double(key, value);
        else if (key == "offset") synthetic.offset = parse_double(key, value);
        else if (key == "clusters") synthetic.clusters = parse_size(key, value);
        else if (key == "cluster_jitter") synthetic.cluster_jitter = parse_double(key, value);
        else if (key == "rows") rows = parse_size(key, value);
        else if (key == "class_radius") class_radius = parse_double(key, value);
        else if (key == "header") header = parse_bool(key, value);
        else if (key == "label_column") label_column = static_cast<long>(parse_double(key, value));
        else throw ConfigError("unknown env parameter: " + key);
    }

    std::map<std::string, std::string> to_map() const
    {
        std::map<std::string, std::string> m{{"kind", kind}};
        if (kind == "synthetic") {
            m["dim"] = std::to_string(synthetic.dim);
            m["arms"] = std::to_string(synthetic.arms);
            m["bumps"] = std::to_string(synthetic.bumps);
            m["noise_sigma"] = format_double(synthetic.noise_sigma);
            m["linear_scale"] = format_double(synthetic.linear_scale);
            m["bump_scale"] = format_double(synthetic.bump_scale);
            m["bump_radius"] = format_double(synthetic.bump_radius);
            m["offset"] = format_double(synthetic.offset);
            m["clusters"] = std::to_string(synthetic.clusters);
            m["cluster_jitter"] = format_double(synthetic.cluster_jitter);
        } else if (kind == "bumpy") {
            m["dim"] = std::to_string(synthetic.dim);
            m["bumps"] = std::to_string(synthetic.bumps);
            m["rows"] = std::to_string(rows);
            m["class_radius"] = format_double(class_radius);
        } else {
            m["data"] = data;
            if (kind == "classification") {
                m["header"] = header ? "true" : "false";
                m["label_column"] = std::to_string(label_column);
            }
        }
        return m;
    }
};

/// Loads input files once; hands out one isolated environment per seed.
class EnvSource {
public:
    explicit EnvSource(EnvSpec spec) : spec_(std::move(spec))
    {
        if (spec_.kind == "classification" || spec_.kind == "news") {
            if (spec_.data.empty()) throw ConfigError("env kind '" + spec_.kind + "' needs a data path (--data)");
            if (!std::filesystem::is_regular_file(spec_.data))
                throw ConfigError("data file not found: " + spec_.data);
        }
        if (spec_.kind == "classification") {
            classification_ = std::make_shared<ClassificationData>(
                parse_classification_csv(read_file(spec_.data), spec_.data, {spec_.header, spec_.label_column}));
        } else if (spec_.kind == "news") {
            news_ = std::make_shared<ReplayLogEnv>(load_news_csv(spec_.data));
        } else if (spec_.kind == "synthetic") {
            SyntheticHybridEnv probe(0, spec_.synthetic); // validates the parameters up front
        }
    }

    const EnvSpec& spec() const { return spec_; }

    std::shared_ptr<const Environment> make(std::uint64_t seed) const
    {
        if (spec_.kind == "synthetic") return std::make_shared<SyntheticHybridEnv>(seed, spec_.synthetic);
        if (spec_.kind == "classification") return std::make_shared<ClassificationBanditEnv>(*classification_, seed);
        if (spec_.kind == "bumpy") {
            return std::make_shared<ClassificationBanditEnv>(
                make_bumpy_classification(seed, spec_.rows, spec_.synthetic.dim, spec_.synthetic.bumps, spec_.class_radius),
                seed);
        }
        return news_;
    }

private:
    EnvSpec spec_;
    std::shared_ptr<const ClassificationData> classification_;
    std::shared_ptr<const ReplayLogEnv> news_;
};

// ---------------------------------------------------------------------------
// Experiment spec and config file
// ---------------------------------------------------------------------------

struct PolicySpec {
    std::string id;
    PolicyConfig cfg;
};

struct ExperimentSpec {
    EnvSpec env;
    std::vector<PolicySpec> policies;
    std::size_t horizon = 1000;
    std::vector<std::uint64_t> seeds{0};
    std::string out = "out";
    std::vector<std::string> formats{"csv", "json"};
    bool trace = false;
    std::size_t jobs = 1;
    /// Sweep grid: key -> values, applied to every policy the key is relevant to.
    std::map<std::string, std::vector<std::string>> grid;
    DiagnosticsParams diagnostics;
    std::size_t bound_horizon = 10000;
    /// Testing hook: throw after this many output files were staged (0: off).
    std::size_t fail_after_writes = 0;

    bool wants(const std::string& format) const
    {
        return std::find(formats.begin(), formats.end(), format) != formats.end();
    }

    void validate() const
    {
        if (policies.empty()) throw ConfigError("no policy given (--policy)");
        if (seeds.empty()) throw ConfigError("no seeds given (--seeds)");
        if (horizon < 1) throw ConfigError("T must be at least 1");
        if (jobs < 1) throw ConfigError("jobs must be at least 1");
        if (formats.empty()) throw ConfigError("no output format");
        for (const auto& f : formats) {
            if (f != "csv" && f != "json") throw ConfigError("unknown format: " + f);
        }
        for (const auto& p : policies) {
            try {
                relevant_parameters(p.id);
                p.cfg.validate();
            } catch (const BanditError& e) {
                throw ConfigError("policy '" + p.id + "': " + e.what());
            }
        }
    }
};

/// "7", "0-19", "1,4,9" or combinations such as "0-3,10".
inline std::vector<std::uint64_t> parse_seeds(const std::string& s)
{
    std::vector<std::uint64_t> out;
    for (const auto& part : detail::split_list(s)) {
        const auto dash = part.find('-');
        try {
            if (dash == std::string::npos) {
                out.push_back(parse_size("seeds", part));
            } else {
                const auto lo = parse_size("seeds", detail::trim(part.substr(0, dash)));
                const auto hi = parse_size("seeds", detail::trim(part.substr(dash + 1)));
                if (hi < lo) throw ConfigError("bad seed range: " + part);
                for (auto v = lo; v <= hi; ++v) out.push_back(v);
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const BanditError& e) {
            throw ConfigError(e.what());
        }
    }
    if (out.empty()) throw ConfigError("empty seed list: '" + s + "'");
    return out;
}

/// "id" or "id:key=val,key=val".
inline PolicySpec parse_policy_arg(const std::string& arg, const PolicyConfig& base)
{
    PolicySpec p;
    const auto colon = arg.find(':');
    p.id = detail::trim(arg.substr(0, colon));
    p.cfg = base;
    if (p.id.empty()) throw ConfigError("empty policy id in '" + arg + "'");
    try {
        relevant_parameters(p.id);
    } catch (const BanditError& e) {
        throw ConfigError(e.what());
    }
    if (colon == std::string::npos) return p;
    for (const auto& kv : detail::split_list(arg.substr(colon + 1))) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key=value in policy '" + arg + "': " + kv);
        try {
            p.cfg.set(detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
        } catch (const BanditError& e) {
            throw ConfigError("policy '" + p.id + "': " + e.what());
        }
    }
    return p;
}

inline void set_diagnostic(DiagnosticsParams& d, const std::string& key, const std::string& value)
{
    if (key == "sigma") d.sigma = parse_double(key, value);
    else if (key == "delta") d.delta = parse_double(key, value);
    else if (key == "B" || key == "context_bound") d.context_bound = parse_double(key, value);
    else if (key == "W" || key == "parameter_bound") d.parameter_bound = parse_double(key, value);
    else if (key == "d" || key == "dim") d.dim = parse_size(key, value);
    else if (key == "b") d.b = parse_double(key, value);
    else if (key == "u_sum" || key == "knn_uncertainty_sum") d.knn_uncertainty_sum = parse_double(key, value);
    else throw ConfigError("unknown diagnostics parameter: " + key);
}

inline void set_experiment(ExperimentSpec& spec, const std::string& key, const std::string& value)
{
    if (key == "T" || key == "horizon") spec.horizon = parse_size(key, value);
    else if (key == "seeds") spec.seeds = parse_seeds(value);
    else if (key == "out") spec.out = value;
    else if (key == "format") spec.formats = detail::split_list(value);
    else if (key == "trace") spec.trace = parse_bool(key, value);
    else if (key == "jobs") spec.jobs = parse_size(key, value);
    else if (key == "bound_T") spec.bound_horizon = parse_size(key, value);
    else throw ConfigError("unknown experiment parameter: " + key);
}

/// Contents of a config file before command-line overrides are applied.
struct ConfigFile {
    ExperimentSpec spec;
    /// [policy] section without an id: defaults for every policy.
    PolicyConfig defaults;
    /// [policy <id>] sections as raw key/value pairs, in file order.
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> policy_sections;
    std::vector<std::pair<std::string, std::string>> default_entries;
};

/// Line-oriented `key = value` text with [experiment], [env], [policy],
/// [policy <id>], [grid] and [diagnostics] sections. '#' and ';' start comments.
inline ConfigFile parse_config(const std::string& text, const std::string& source)
{
    ConfigFile cf;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& what) {
        throw ConfigError(source + ":" + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (const auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section.starts_with("policy ")) {
                const auto id = detail::trim(section.substr(7));
                try {
                    relevant_parameters(id);
                } catch (const BanditError& e) {
                    fail(e.what());
                }
                cf.policy_sections.push_back({id, {}});
            } else if (section != "experiment" && section != "env" && section != "policy" && section != "grid" &&
                       section != "diagnostics") {
                fail("unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        if (key.empty()) fail("empty key");
        try {
            if (section.empty() || section == "experiment") {
                set_experiment(cf.spec, key, value);
            } else if (section == "env") {
                cf.spec.env.set(key, value);
            } else if (section == "policy") {
                cf.defaults.set(key, value);
                cf.default_entries.push_back({key, value});
            } else if (section == "grid") {
                auto values = detail::split_list(value);
                if (values.empty()) fail("empty grid for " + key);
                cf.spec.grid[key == "alpha" ? "alpha0" : key] = values;
            } else if (section == "diagnostics") {
                set_diagnostic(cf.spec.diagnostics, key, value);
            } else {
                PolicyConfig probe;
                probe.set(key, value);
                cf.policy_sections.back().second.push_back({key, value});
            }
        } catch (const BanditError& e) {
            if (std::string(e.what()).starts_with(source + ":")) throw;
            fail(e.what());
        }
    }
    return cf;
}

inline ConfigFile load_config(const std::string& path)
{
    if (!std::filesystem::is_regular_file(path)) throw ConfigError("config file not found: " + path);
    return parse_config(read_file(path), path);
}

// ---------------------------------------------------------------------------
// Staged, all-or-nothing output
// ---------------------------------------------------------------------------

/// Files are written under `<out>/.staging-*` and moved into `<out>` only
/// when commit() is reached; otherwise the staging tree is removed.
class StagedOutput {
public:
    StagedOutput(const std::string& out, std::size_t fail_after_writes = 0)
        : out_(out), fail_after_(fail_after_writes)
    {
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(out_, ec);
        if (ec || !fs::is_directory(out_)) throw ConfigError("cannot create output directory: " + out);
        const auto stamp = static_cast<std::uint64_t>(std::chrono::steady_clock::now().time_since_epoch().count());
        staging_ = out_ / (".staging-" + hex64(mix_seed(stamp, std::hash<std::thread::id>{}(std::this_thread::get_id()))));
        fs::create_directories(staging_, ec);
        if (ec) throw ConfigError("cannot create staging directory under: " + out);
    }

    StagedOutput(const StagedOutput&) = delete;
    StagedOutput& operator=(const StagedOutput&) = delete;

    ~StagedOutput()
    {
        if (!committed_) {
            std::error_code ec;
            std::filesystem::remove_all(staging_, ec);
        }
    }

    void write(const std::string& relpath, const std::string& content)
    {
        namespace fs = std::filesystem;
        const fs::path p = staging_ / relpath;
        fs::create_directories(p.parent_path());
        {
            std::ofstream f(p, std::ios::binary | std::ios::trunc);
            if (!f) throw std::runtime_error("cannot write " + p.string());
            f << content;
            if (!f.flush()) throw std::runtime_error("write failed: " + p.string());
        }
        if (std::find(top_.begin(), top_.end(), fs::path(relpath).begin()->string()) == top_.end())
            top_.push_back(fs::path(relpath).begin()->string());
        ++writes_;
        if (fail_after_ != 0 && writes_ >= fail_after_) {
            throw std::runtime_error("injected failure after " + std::to_string(writes_) + " staged file(s)");
        }
    }

    void commit()
    {
        namespace fs = std::filesystem;
        for (const auto& name : top_) {
            const fs::path target = out_ / name;
            if (fs::exists(target)) fs::remove_all(target);
            fs::rename(staging_ / name, target);
        }
        fs::remove_all(staging_);
        committed_ = true;
    }

    const std::filesystem::path& staging() const { return staging_; }

private:
    std::filesystem::path out_;
    std::filesystem::path staging_;
    std::vector<std::string> top_;
    std::size_t fail_after_;
    std::size_t writes_ = 0;
    bool committed_ = false;
};

// ---------------------------------------------------------------------------
// Cells and parallel execution
// ---------------------------------------------------------------------------

struct Cell {
    std::size_t policy_index = 0;
    std::string id;
    PolicyConfig cfg;
    std::string params;
    /// Grid values for this cell, in key order (sweep only).
    std::vector<std::pair<std::string, std::string>> point;
    std::uint64_t seed = 0;
};

struct CellResult {
    RunResult result;
    std::string fingerprint;
};

/// Runs f(i) for i in [0, n) on up to `jobs` threads; rethrows the first
/// failure in index order.
inline void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& f)
{
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min(std::max<std::size_t>(jobs, 1), n);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

inline std::vector<CellResult> run_cells(const EnvSource& source, const std::vector<Cell>& cells, std::size_t horizon,
                                         bool trace, std::size_t jobs)
{
    std::vector<CellResult> out(cells.size());
    parallel_for(cells.size(), jobs, [&](std::size_t i) {
        const auto& c = cells[i];
        auto env = source.make(c.seed);
        auto policy = make_policy(c.id, env->arms(), env->dim(), c.cfg, c.seed);
        RunOptions opts;
        opts.horizon = horizon;
        opts.trace = trace;
        out[i].result = run_policy(*env, *policy, opts).result;
        out[i].result.params = c.params;
        out[i].fingerprint = env->fingerprint();
    });
    return out;
}

/// Cartesian product of the grid keys relevant to `id`, keys in sorted order.
inline std::vector<std::vector<std::pair<std::string, std::string>>> grid_points(
    const std::string& id, const std::map<std::string, std::vector<std::string>>& grid)
{
    const auto relevant = relevant_parameters(id);
    std::vector<std::vector<std::pair<std::string, std::string>>> points{{}};
    for (const auto& [key, values] : grid) {
        if (std::find(relevant.begin(), relevant.end(), key) == relevant.end()) continue;
        std::vector<std::vector<std::pair<std::string, std::string>>> next;
        for (const auto& p : points) {
            for (const auto& v : values) {
                auto q = p;
                q.push_back({key, v});
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    return points;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline std::string result_csv(const RunResult& r)
{
    std::string s = "round,cumulative_reward,mean_reward,cumulative_regret";
    const bool traced = !r.trace.empty();
    if (traced) s += ",linear,knn,alpha,width,ucb";
    s += '\n';
    for (std::size_t t = 0; t < r.horizon(); ++t) {
        s += std::to_string(t);
        s += ',' + format_double(r.cumulative_reward[t]);
        s += ',' + format_double(r.mean_reward[t]);
        s += ',';
        if (r.has_regret()) s += format_double(r.cumulative_regret[t]);
        if (traced) {
            const auto& b = r.trace[t];
            for (double v : {b.linear, b.knn, b.alpha, b.width, b.ucb}) s += ',' + format_double(v);
        }
        s += '\n';
    }
    return s;
}

inline constexpr const char* kAggregateHeader =
    "policy,params,final_cum_reward_mean,final_cum_reward_std,final_mean_reward_mean,final_mean_reward_std,"
    "final_regret_mean,final_regret_std,runtime_s_mean";

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

inline std::string aggregate_csv(const std::vector<AggregateRow>& rows)
{
    std::string s = std::string(kAggregateHeader) + '\n';
    for (const auto& r : rows) {
        s += csv_field(r.policy) + ',' + csv_field(r.params);
        s += ',' + format_double(r.final_cum_reward.mean) + ',' + format_double(r.final_cum_reward.std);
        s += ',' + format_double(r.final_mean_reward.mean) + ',' + format_double(r.final_mean_reward.std);
        s += ',';
        if (r.has_regret) s += format_double(r.final_regret.mean) + ',' + format_double(r.final_regret.std);
        else s += ',';
        s += ',' + format_double(r.runtime_s_mean) + '\n';
    }
    return s;
}

/// Table-3 layout: one row per (policy, setting) with the policy's
/// cross-setting std of mean reward repeated on each row.
inline std::string robustness_csv(const AggregateResult& agg)
{
    std::string s = "policy,params,final_cum_reward_mean,final_mean_reward_mean,runtime_s_mean,mean_reward_std_across_params\n";
    for (const auto& r : agg.rows) {
        s += csv_field(r.policy) + ',' + csv_field(r.params) + ',' + format_double(r.final_cum_reward.mean) + ',' +
             format_double(r.final_mean_reward.mean) + ',' + format_double(r.runtime_s_mean) + ',' +
             format_double(agg.robustness.at(r.policy)) + '\n';
    }
    return s;
}

using Json = nlohmann::ordered_json;

inline Json aggregate_row_json(const AggregateRow& r)
{
    Json j;
    j["policy"] = r.policy;
    j["params"] = r.params;
    j["runs"] = r.runs;
    j["horizon"] = r.horizon;
    j["final_cum_reward"] = {{"mean", r.final_cum_reward.mean}, {"std", r.final_cum_reward.std}};
    j["final_mean_reward"] = {{"mean", r.final_mean_reward.mean}, {"std", r.final_mean_reward.std}};
    if (r.has_regret) j["final_regret"] = {{"mean", r.final_regret.mean}, {"std", r.final_regret.std}};
    else j["final_regret"] = nullptr;
    j["runtime_s_mean"] = r.runtime_s_mean;
    return j;
}

inline Json spec_echo(const ExperimentSpec& spec, const std::string& command)
{
    Json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["rng_algorithm"] = Rng::kAlgorithm;
    j["horizon"] = spec.horizon;
    j["seeds"] = spec.seeds;
    j["trace"] = spec.trace;
    j["env"] = spec.env.to_map();
    Json pols = Json::array();
    for (const auto& p : spec.policies) pols.push_back({{"id", p.id}, {"config", p.cfg.to_map()}});
    j["policies"] = pols;
    if (!spec.grid.empty()) j["grid"] = spec.grid;
    return j;
}

inline std::string run_file_stem(const RunResult& r)
{
    return r.policy + "-" + hex64(fnv1a64(r.params)) + "-s" + std::to_string(r.seed);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline void cmd_run(const ExperimentSpec& spec)
{
    spec.validate();
    if (spec.policies.size() != 1) throw ConfigError("run takes exactly one policy");
    if (spec.seeds.size() != 1) throw ConfigError("run takes exactly one seed");
    EnvSource source(spec.env);
    const auto& p = spec.policies.front();
    std::vector<Cell> cells{{0, p.id, p.cfg, params_string(p.id, p.cfg), {}, spec.seeds.front()}};
    StagedOutput out(spec.out, spec.fail_after_writes);
    const auto res = run_cells(source, cells, spec.horizon, spec.trace, 1).front();
    const auto& r = res.result;
    if (spec.wants("csv")) out.write("result.csv", result_csv(r));
    if (spec.wants("json")) {
        Json j = spec_echo(spec, "run");
        j["seed"] = r.seed;
        j["policy"] = r.policy;
        j["params"] = r.params;
        j["dataset_fingerprint"] = res.fingerprint;
        j["summary"] = {{"steps", r.horizon()},
                        {"rows_seen", r.rows_seen},
                        {"final_cumulative_reward", r.final_cumulative()},
                        {"final_mean_reward", r.final_mean()},
                        {"final_regret", r.has_regret() ? Json(r.final_regret()) : Json(nullptr)}};
        out.write("result.json", j.dump(2) + "\n");
    }
    out.commit();
}

namespace detail {

inline std::vector<RunResult> results_of(const std::vector<CellResult>& cells)
{
    std::vector<RunResult> out;
    out.reserve(cells.size());
    for (const auto& c : cells) out.push_back(c.result);
    return out;
}

inline Json fingerprints_json(const std::vector<CellResult>& cells)
{
    Json fp = Json::object();
    for (const auto& c : cells) fp[std::to_string(c.result.seed)] = c.fingerprint;
    return fp;
}

inline void write_runs(StagedOutput& out, const std::vector<CellResult>& cells)
{
    for (const auto& c : cells) out.write("runs/" + run_file_stem(c.result) + ".csv", result_csv(c.result));
}

} // namespace detail

inline AggregateResult cmd_compare(const ExperimentSpec& spec)
{
    spec.validate();
    if (spec.policies.size() < 2 && spec.seeds.size() < 2)
        throw ConfigError("compare needs at least two policies or two seeds");
    EnvSource source(spec.env);
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < spec.policies.size(); ++i) {
        const auto& p = spec.policies[i];
        for (auto seed : spec.seeds) cells.push_back({i, p.id, p.cfg, params_string(p.id, p.cfg), {}, seed});
    }
    StagedOutput out(spec.out, spec.fail_after_writes);
    const auto results = run_cells(source, cells, spec.horizon, spec.trace, spec.jobs);
    const auto runs = detail::results_of(results);
    const auto agg = aggregate(runs);
    if (spec.wants("csv")) {
        out.write("aggregate.csv", aggregate_csv(agg.rows));
        out.write("robustness.csv", robustness_csv(agg));
    }
    if (spec.wants("json")) {
        Json j = spec_echo(spec, "compare");
        j["dataset_fingerprints"] = detail::fingerprints_json(results);
        Json rows = Json::array();
        for (const auto& r : agg.rows) rows.push_back(aggregate_row_json(r));
        j["rows"] = rows;
        j["robustness"] = agg.robustness;
        out.write("aggregate.json", j.dump(2) + "\n");
    }
    detail::write_runs(out, results);
    out.commit();
    return agg;
}

struct BestRow {
    std::string policy;
    std::string params;
    std::vector<std::pair<std::string, std::string>> point;
    double final_mean_reward = 0.0;
    double final_cum_reward = 0.0;
};

/// True when grid point a is "smaller" than b: values compared key by key,
/// numerically where both parse as numbers.
inline bool point_less(const std::vector<std::pair<std::string, std::string>>& a,
                       const std::vector<std::pair<std::string, std::string>>& b)
{
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        double x = 0.0, y = 0.0;
        const bool nx = parse_number(a[i].second, x);
        const bool ny = parse_number(b[i].second, y);
        if (nx && ny) {
            if (x != y) return x < y;
        } else if (a[i].second != b[i].second) {
            return a[i].second < b[i].second;
        }
    }
    return a.size() < b.size();
}

/// Highest mean final reward; exact ties go to the smaller grid point.
inline std::vector<BestRow> select_best(const std::vector<BestRow>& candidates)
{
    std::map<std::string, BestRow> best;
    std::vector<std::string> order;
    for (const auto& c : candidates) {
        auto it = best.find(c.policy);
        if (it == best.end()) {
            best.emplace(c.policy, c);
            order.push_back(c.policy);
        } else if (c.final_mean_reward > it->second.final_mean_reward ||
                   (c.final_mean_reward == it->second.final_mean_reward && point_less(c.point, it->second.point))) {
            it->second = c;
        }
    }
    std::vector<BestRow> out;
    for (const auto& id : order) out.push_back(best.at(id));
    return out;
}

struct SweepResult {
    AggregateResult aggregate;
    std::vector<BestRow> best;
};

inline SweepResult cmd_sweep(const ExperimentSpec& spec)
{
    spec.validate();
    if (spec.grid.empty()) throw ConfigError("sweep needs a parameter grid (--grid key=v1,v2,...)");
    for (const auto& [key, values] : spec.grid) {
        if (values.empty()) throw ConfigError("empty grid for " + key);
        bool used = false;
        for (const auto& p : spec.policies) {
            const auto rel = relevant_parameters(p.id);
            used = used || std::find(rel.begin(), rel.end(), key) != rel.end();
        }
        if (!used) throw ConfigError("grid key '" + key + "' is not a parameter of any selected policy");
    }
    EnvSource source(spec.env);
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < spec.policies.size(); ++i) {
        const auto& p = spec.policies[i];
        for (const auto& point : grid_points(p.id, spec.grid)) {
            PolicyConfig cfg = p.cfg;
            try {
                for (const auto& [k, v] : point) cfg.set(k, v);
                cfg.validate();
            } catch (const BanditError& e) {
                throw ConfigError("policy '" + p.id + "' grid point: " + e.what());
            }
            for (auto seed : spec.seeds) cells.push_back({i, p.id, cfg, params_string(p.id, cfg), point, seed});
        }
    }
    StagedOutput out(spec.out, spec.fail_after_writes);
    const auto results = run_cells(source, cells, spec.horizon, spec.trace, spec.jobs);
    SweepResult sr;
    sr.aggregate = aggregate(detail::results_of(results));
    // Candidates in canonical (policy, point) order.
    std::vector<BestRow> candidates;
    for (const auto& c : cells) {
        if (!candidates.empty() && candidates.back().policy == c.id && candidates.back().params == c.params) continue;
        for (const auto& row : sr.aggregate.rows) {
            if (row.policy == c.id && row.params == c.params) {
                candidates.push_back({c.id, c.params, c.point, row.final_mean_reward.mean, row.final_cum_reward.mean});
                break;
            }
        }
    }
    sr.best = select_best(candidates);
    if (spec.wants("csv")) {
        out.write("sweep.csv", aggregate_csv(sr.aggregate.rows));
        std::string b = "policy,best_params,best_final_mean_reward,best_final_cum_reward\n";
        for (const auto& r : sr.best) {
            b += csv_field(r.policy) + ',' + csv_field(r.params) + ',' + format_double(r.final_mean_reward) + ',' +
                 format_double(r.final_cum_reward) + '\n';
        }
        out.write("best.csv", b);
        out.write("robustness.csv", robustness_csv(sr.aggregate));
    }
    if (spec.wants("json")) {
        Json j = spec_echo(spec, "sweep");
        j["dataset_fingerprints"] = detail::fingerprints_json(results);
        Json rows = Json::array();
        for (const auto& r : sr.aggregate.rows) rows.push_back(aggregate_row_json(r));
        j["rows"] = rows;
        Json best = Json::array();
        for (const auto& r : sr.best) {
            best.push_back({{"policy", r.policy},
                            {"params", r.params},
                            {"final_mean_reward", r.final_mean_reward},
                            {"final_cum_reward", r.final_cum_reward}});
        }
        j["best"] = best;
        j["robustness"] = sr.aggregate.robustness;
        out.write("sweep.json", j.dump(2) + "\n");
    }
    detail::write_runs(out, results);
    out.commit();
    return sr;
}

/// Reads the cumulative_regret column of a result.csv.
inline std::vector<double> read_regret_column(const std::string& path)
{
    if (!std::filesystem::is_regular_file(path)) throw ConfigError("overlay file not found: " + path);
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path, 1, "empty file");
    const auto header = split_csv_line(line);
    const auto it = std::find(header.begin(), header.end(), "cumulative_regret");
    if (it == header.end()) throw ParseError(path, 1, "no cumulative_regret column");
    const auto col = static_cast<std::size_t>(it - header.begin());
    std::vector<double> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        double v = 0.0;
        if (f.size() <= col || !parse_number(f[col], v)) throw ParseError(path, lineno, "bad cumulative_regret value");
        out.push_back(v);
    }
    if (out.empty()) throw ParseError(path, lineno, "no data rows");
    return out;
}

/// Writes bound.csv (t, beta, regret_bound) for t = 1..T. With an overlay
/// run, T is that run's length and overlay.csv pairs its regret with the bound.
inline std::vector<double> cmd_bound(const ExperimentSpec& spec, const std::string& overlay = "")
{
    try {
        spec.diagnostics.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const BanditError& e) {
        throw ConfigError(e.what());
    }
    std::vector<double> regret;
    std::size_t horizon = spec.bound_horizon;
    if (!overlay.empty()) {
        regret = read_regret_column(overlay);
        horizon = regret.size();
    }
    if (horizon < 1) throw ConfigError("bound horizon must be at least 1");
    const auto curve = regret_bound_curve(spec.diagnostics, horizon);
    StagedOutput out(spec.out, spec.fail_after_writes);
    if (spec.wants("csv")) {
        std::string s = "t,beta,regret_bound\n";
        for (std::size_t t = 1; t <= horizon; ++t) {
            s += std::to_string(t) + ',' + format_double(beta_bound(spec.diagnostics, t)) + ',' +
                 format_double(curve[t - 1]) + '\n';
        }
        out.write("bound.csv", s);
        if (!regret.empty()) {
            std::string o = "t,cumulative_regret,regret_bound\n";
            for (std::size_t t = 1; t <= horizon; ++t) {
                o += std::to_string(t) + ',' + format_double(regret[t - 1]) + ',' + format_double(curve[t - 1]) + '\n';
            }
            out.write("overlay.csv", o);
        }
    }
    if (spec.wants("json")) {
        const auto& d = spec.diagnostics;
        Json j;
        j["command"] = "bound";
        j["version"] = kVersion;
        j["horizon"] = horizon;
        j["diagnostics"] = {{"sigma", d.sigma},       {"delta", d.delta}, {"B", d.context_bound},
                            {"W", d.parameter_bound}, {"d", d.dim},       {"b", d.b},
                            {"u_sum", d.knn_uncertainty_sum}};
        if (!overlay.empty()) j["overlay"] = {{"path", overlay}, {"fingerprint", hex64(fnv1a64(read_file(overlay)))}};
        j["final_beta"] = beta_bound(d, horizon);
        j["final_regret_bound"] = curve.back();
        out.write("bound.json", j.dump(2) + "\n");
    }
    out.commit();
    return curve;
}

} // namespace lnucb
