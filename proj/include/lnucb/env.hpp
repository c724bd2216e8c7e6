#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lnucb/config.hpp"
#include "lnucb/core.hpp"

namespace lnucb {

/// Structured input error carrying the 1-based line number (0 when not tied to a line).
class ParseError : public BanditError {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : BanditError(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Outcome of pulling an arm.
struct RoundFeedback {
    double reward = 0.0;
    /// False only for replay rows whose logged arm differs from the choice.
    bool step_consumed = true;
    /// Expected reward of the chosen arm, when the environment knows it.
    std::optional<double> expected_reward;
    /// Expected reward of the best arm for this context.
    std::optional<double> oracle_reward;
};

/// One pass of interaction with an environment. Owns its cursor.
class EnvSession {
public:
    virtual ~EnvSession() = default;
    /// Advances to the next context; false when the environment is exhausted.
    virtual bool next(Context& x) = 0;
    virtual RoundFeedback pull(ArmIndex arm) = 0;
};

/// Immutable after construction; sessions hold all per-run state.
class Environment {
public:
    virtual ~Environment() = default;
    virtual std::string kind() const = 0;
    virtual std::size_t arms() const = 0;
    virtual std::size_t dim() const = 0;
    virtual bool has_oracle() const = 0;
    virtual double reward_min() const { return -1.0; }
    virtual double reward_max() const { return 1.0; }
    /// Content hash of the backing data (or of the generator parameters).
    virtual std::string fingerprint() const = 0;
    virtual std::unique_ptr<EnvSession> start() const = 0;
};

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xCBF29CE484222325ULL)
{
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(path, 0, "cannot open file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        auto field = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
        out.emplace_back(field);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline bool parse_number(const std::string& s, double& v)
{
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    auto res = std::from_chars(first, s.data() + s.size(), v);
    return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(v);
}

// ---------------------------------------------------------------------------
// Classification -> bandit
// ---------------------------------------------------------------------------

/// Parsed, normalized classification data in file order.
struct ClassificationData {
    std::vector<Context> contexts;
    std::vector<ArmIndex> labels;
    /// Original label strings, indexed by arm (first-appearance order).
    std::vector<std::string> classes;
    std::string fingerprint;
};

struct ClassificationCsvOptions {
    bool header = false;
    /// Column index of the label; negative counts from the end.
    long label_column = -1;
};

/// Rows scaled to unit l2 norm; a zero row is an error naming its line.
inline ClassificationData parse_classification_csv(const std::string& text, const std::string& source,
                                                   const ClassificationCsvOptions& opts = {})
{
    ClassificationData data;
    data.fingerprint = hex64(fnv1a64(text));
    std::map<std::string, ArmIndex> class_index;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool skipped_header = !opts.header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!skipped_header) {
            skipped_header = true;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (width == 0) {
            width = fields.size();
            if (width < 2) throw ParseError(source, line_no, "need at least one feature and a label column");
        } else if (fields.size() != width) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(width) + " columns, found " + std::to_string(fields.size()));
        }
        const long lc = opts.label_column < 0 ? static_cast<long>(width) + opts.label_column : opts.label_column;
        if (lc < 0 || lc >= static_cast<long>(width)) throw ParseError(source, line_no, "label column out of range");
        Context x(static_cast<Eigen::Index>(width - 1));
        Eigen::Index j = 0;
        for (std::size_t c = 0; c < width; ++c) {
            if (static_cast<long>(c) == lc) continue;
            double v = 0.0;
            if (!parse_number(fields[c], v)) {
                throw ParseError(source, line_no, "non-numeric feature in column " + std::to_string(c) + ": '" + fields[c] + "'");
            }
            x[j++] = v;
        }
        const double norm = x.norm();
        if (!(norm > 0.0)) throw ParseError(source, line_no, "feature row is all zeros and cannot be normalized");
        x /= norm;
        const auto& label = fields[static_cast<std::size_t>(lc)];
        auto [it, inserted] = class_index.try_emplace(label, data.classes.size());
        if (inserted) data.classes.push_back(label);
        data.contexts.push_back(std::move(x));
        data.labels.push_back(it->second);
    }
    if (data.contexts.empty()) throw ParseError(source, 0, "no data rows");
    return data;
}

/// Each round shows one row; the arm matching the row's class pays 1, others 0.
/// Rows are visited in a seeded shuffled order and cycled if the horizon is longer.
class ClassificationBanditEnv : public Environment {
public:
    ClassificationBanditEnv(ClassificationData data, std::uint64_t shuffle_seed)
        : data_(std::move(data)), shuffle_seed_(shuffle_seed)
    {
        require(!data_.contexts.empty(), "classification env: empty data");
        require(data_.classes.size() >= 1, "classification env: no classes");
        order_.resize(data_.contexts.size());
        for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
        Rng rng(shuffle_seed);
        for (std::size_t i = order_.size(); i > 1; --i) {
            std::swap(order_[i - 1], order_[rng.below(i)]);
        }
    }

    std::string kind() const override { return "classification"; }
    std::size_t arms() const override { return data_.classes.size(); }
    std::size_t dim() const override { return static_cast<std::size_t>(data_.contexts.front().size()); }
    bool has_oracle() const override { return true; }
    double reward_min() const override { return 0.0; }
    std::string fingerprint() const override { return data_.fingerprint; }
    std::size_t rows() const { return order_.size(); }
    const std::vector<std::string>& classes() const { return data_.classes; }
    std::uint64_t shuffle_seed() const { return shuffle_seed_; }

    const Context& context_at(std::size_t t) const { return data_.contexts[order_[t % order_.size()]]; }
    ArmIndex label_at(std::size_t t) const { return data_.labels[order_[t % order_.size()]]; }

    /// 1 when the arm is the row's class, else 0.
    double reward(std::size_t t, ArmIndex arm) const
    {
        require(arm < arms(), "classification env: arm out of range");
        return arm == label_at(t) ? 1.0 : 0.0;
    }

    std::unique_ptr<EnvSession> start() const override { return std::make_unique<Session>(*this); }

private:
    class Session : public EnvSession {
    public:
        explicit Session(const ClassificationBanditEnv& env) : env_(env) {}
        bool next(Context& x) override
        {
            t_ = started_ ? t_ + 1 : 0;
            started_ = true;
            x = env_.context_at(t_);
            return true;
        }
        RoundFeedback pull(ArmIndex arm) override
        {
            const double r = env_.reward(t_, arm);
            return {r, true, r, 1.0};
        }

    private:
        const ClassificationBanditEnv& env_;
        std::size_t t_ = 0;
        bool started_ = false;
    };

    ClassificationData data_;
    std::uint64_t shuffle_seed_;
    std::vector<std::size_t> order_;
};

inline ClassificationBanditEnv load_classification_csv(const std::string& path, const ClassificationCsvOptions& opts,
                                                       std::uint64_t shuffle_seed)
{
    return {parse_classification_csv(read_file(path), path, opts), shuffle_seed};
}

/// Two-class data: label = [w^T x > 0], flipped inside a few small balls.
/// Contexts are unit-norm with nonnegative entries.
inline ClassificationData make_bumpy_classification(std::uint64_t seed, std::size_t rows, std::size_t dim,
                                                    std::size_t bumps, double radius = 0.35)
{
    require(rows >= 1 && dim >= 2, "bumpy classification: need rows >= 1 and dim >= 2");
    Rng rng(mix_seed(seed, 0x636C617373ULL));
    auto draw_context = [&]() {
        Context x(static_cast<Eigen::Index>(dim));
        for (auto& v : x) v = std::abs(rng.normal());
        const double n = x.norm();
        return n > 0.0 ? Context(x / n) : Context(Context::Ones(x.size()) / std::sqrt(static_cast<double>(dim)));
    };
    Context w(static_cast<Eigen::Index>(dim));
    for (auto& v : w) v = rng.normal();
    // Center the boundary on the data: subtract the mean score.
    std::vector<Context> centers;
    for (std::size_t j = 0; j < bumps; ++j) centers.push_back(draw_context());
    ClassificationData data;
    data.classes = {"0", "1"};
    std::vector<Context> xs;
    std::vector<double> margins;
    for (std::size_t i = 0; i < rows; ++i) {
        xs.push_back(draw_context());
        margins.push_back(w.dot(xs.back()));
    }
    std::vector<double> sorted = margins;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rows / 2), sorted.end());
    const double median = sorted[rows / 2];
    std::string fp;
    for (std::size_t i = 0; i < rows; ++i) {
        bool label = margins[i] > median;
        for (const auto& c : centers) {
            if ((xs[i] - c).norm() < radius) label = !label;
        }
        data.contexts.push_back(xs[i]);
        data.labels.push_back(label ? 1 : 0);
    }
    data.fingerprint = hex64(mix_seed(seed, rows, dim * 1000 + bumps));
    // Class order is by first appearance, as for loaded files.
    if (!data.labels.empty() && data.labels.front() == 1) {
        for (auto& l : data.labels) l = 1 - l;
        std::swap(data.classes[0], data.classes[1]);
    }
    return data;
}

// ---------------------------------------------------------------------------
// Logged click replay
// ---------------------------------------------------------------------------

struct ReplayRow {
    ArmIndex logged_arm = 0;
    double click = 0.0;
    Context context;
};

class ReplayLogEnv : public Environment {
public:
    static constexpr std::size_t kArms = 10;
    static constexpr std::size_t kColumns = 102;

    ReplayLogEnv(std::vector<ReplayRow> rows, std::string fingerprint)
        : rows_(std::move(rows)), fingerprint_(std::move(fingerprint))
    {
        require(!rows_.empty(), "replay env: empty log");
    }

    std::string kind() const override { return "news"; }
    std::size_t arms() const override { return kArms; }
    std::size_t dim() const override { return static_cast<std::size_t>(rows_.front().context.size()); }
    bool has_oracle() const override { return false; }
    double reward_min() const override { return 0.0; }
    std::string fingerprint() const override { return fingerprint_; }
    const std::vector<ReplayRow>& rows() const { return rows_; }

    std::unique_ptr<EnvSession> start() const override { return std::make_unique<Session>(*this); }

private:
    /// Standard row-by-row replay: each row's context is offered in turn and
    /// feedback is revealed only when the choice matches the logged arm.
    class Session : public EnvSession {
    public:
        explicit Session(const ReplayLogEnv& env) : env_(env) {}
        bool next(Context& x) override
        {
            if (started_) ++cursor_;
            started_ = true;
            if (cursor_ >= env_.rows_.size()) return false;
            x = env_.rows_[cursor_].context;
            return true;
        }
        RoundFeedback pull(ArmIndex arm) override
        {
            const auto& row = env_.rows_[cursor_];
            if (row.logged_arm != arm) return {0.0, false, std::nullopt, std::nullopt};
            return {row.click, true, std::nullopt, std::nullopt};
        }

    private:
        const ReplayLogEnv& env_;
        std::size_t cursor_ = 0;
        bool started_ = false;
    };

    std::vector<ReplayRow> rows_;
    std::string fingerprint_;
};

inline ReplayLogEnv parse_news_csv(const std::string& text, const std::string& source)
{
    std::vector<ReplayRow> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != ReplayLogEnv::kColumns) {
            throw ParseError(source, line_no,
                             "expected 102 columns, found " + std::to_string(fields.size()));
        }
        double arm = 0.0;
        double click = 0.0;
        if (!parse_number(fields[0], arm) || arm != std::floor(arm) || arm < 1.0 || arm > 10.0) {
            throw ParseError(source, line_no, "arm id must be an integer in 1..10, found '" + fields[0] + "'");
        }
        if (!parse_number(fields[1], click) || (click != 0.0 && click != 1.0)) {
            throw ParseError(source, line_no, "click must be 0 or 1, found '" + fields[1] + "'");
        }
        ReplayRow row;
        row.logged_arm = static_cast<ArmIndex>(arm) - 1;
        row.click = click;
        row.context.resize(ReplayLogEnv::kColumns - 2);
        for (std::size_t c = 2; c < fields.size(); ++c) {
            double v = 0.0;
            if (!parse_number(fields[c], v)) {
                throw ParseError(source, line_no, "non-numeric feature in column " + std::to_string(c) + ": '" + fields[c] + "'");
            }
            row.context[static_cast<Eigen::Index>(c - 2)] = v;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(source, 0, "no data rows");
    return {std::move(rows), hex64(fnv1a64(text))};
}

inline ReplayLogEnv load_news_csv(const std::string& path) { return parse_news_csv(read_file(path), path); }

struct ReplayStep {
    RoundFeedback feedback;
    std::size_t next_cursor = 0;
};

/// Scans forward from `cursor` to the first row logged with `chosen_arm`.
/// Exhausting the log yields step_consumed = false and cursor = rows().size().
inline ReplayStep replay_step(const ReplayLogEnv& env, ArmIndex chosen_arm, std::size_t cursor)
{
    const auto& rows = env.rows();
    require(cursor <= rows.size(), "replay_step: cursor out of range");
    require(chosen_arm < env.arms(), "replay_step: arm out of range");
    for (std::size_t i = cursor; i < rows.size(); ++i) {
        if (rows[i].logged_arm == chosen_arm) {
            return {{rows[i].click, true, std::nullopt, std::nullopt}, i + 1};
        }
    }
    return {{0.0, false, std::nullopt, std::nullopt}, rows.size()};
}

// ---------------------------------------------------------------------------
// Synthetic linear + local-bump environment
// ---------------------------------------------------------------------------

struct SyntheticParams {
    std::size_t dim = 10;
    std::size_t arms = 5;
    std::size_t bumps = 3;
    double noise_sigma = 0.05;
    /// Norm of each arm's linear parameter.
    double linear_scale = 0.3;
    /// Maximum |bump value|. Expected rewards stay within
    /// [-(linear_scale + bumps * bump_scale), +...], which must be <= 1.
    double bump_scale = 0.23;
    double bump_radius = 0.3;
    /// Constant added to every arm's expected reward.
    double offset = 0.0;
    /// Contexts are drawn around this many fixed prototypes (0: no clustering).
    std::size_t clusters = 20;
    /// Gaussian jitter added to a prototype before renormalizing.
    double cluster_jitter = 0.05;
};

/// Expected reward mu_a^T x + sum_j v_aj [||x - c_aj|| < r]. Contexts are
/// unit-norm with nonnegative entries. Everything random is keyed on the
/// seed and the round, so every policy sees the same contexts and noise.
class SyntheticHybridEnv : public Environment {
public:
    SyntheticHybridEnv(std::uint64_t seed, const SyntheticParams& p) : seed_(seed), p_(p)
    {
        require(p.dim >= 1, "synthetic env: dim must be at least 1");
        require(p.arms >= 2, "synthetic env: need at least two arms");
        require(std::isfinite(p.noise_sigma) && p.noise_sigma >= 0.0, "synthetic env: noise_sigma must be nonnegative");
        require(p.linear_scale >= 0.0 && p.bump_scale >= 0.0 && p.bump_radius > 0.0, "synthetic env: invalid scales");
        require(std::abs(p.offset) + p.linear_scale + static_cast<double>(p.bumps) * p.bump_scale <= 1.0 + 1e-12,
                "synthetic env: expected rewards could leave [-1, 1]");
        Rng rng(mix_seed(seed, 0x656E76ULL));
        const auto d = static_cast<Eigen::Index>(p.dim);
        for (std::size_t c = 0; c < p.clusters; ++c) prototypes_.push_back(draw_uniform_context(rng));
        for (std::size_t a = 0; a < p.arms; ++a) {
            Context mu(d);
            for (auto& v : mu) v = rng.normal();
            mu *= p.linear_scale / std::max(mu.norm(), 1e-300);
            mu_.push_back(mu);
            std::vector<Context> centers;
            std::vector<double> values;
            for (std::size_t j = 0; j < p.bumps; ++j) {
                centers.push_back(draw_context(rng));
                values.push_back(rng.uniform(-p.bump_scale, p.bump_scale));
            }
            centers_.push_back(std::move(centers));
            values_.push_back(std::move(values));
        }
    }

    std::string kind() const override { return "synthetic"; }
    std::size_t arms() const override { return p_.arms; }
    std::size_t dim() const override { return p_.dim; }
    bool has_oracle() const override { return true; }
    std::string fingerprint() const override
    {
        std::string s = "synthetic:" + std::to_string(seed_) + ":" + std::to_string(p_.dim) + ":" +
                        std::to_string(p_.arms) + ":" + std::to_string(p_.bumps) + ":" + format_double(p_.noise_sigma) +
                        ":" + format_double(p_.linear_scale) + ":" + format_double(p_.bump_scale) + ":" +
                        format_double(p_.bump_radius) + ":" + format_double(p_.offset) + ":" +
                        std::to_string(p_.clusters) + ":" + format_double(p_.cluster_jitter);
        return hex64(fnv1a64(s));
    }
    const SyntheticParams& params() const { return p_; }
    std::uint64_t seed() const { return seed_; }
    const Context& linear_parameter(ArmIndex a) const { return mu_.at(a); }

    Context context_at(std::size_t t) const
    {
        Rng rng(mix_seed(seed_, t, 0x637478ULL));
        return draw_context(rng);
    }

    double expected_reward(const Context& x, ArmIndex a) const
    {
        require(a < arms(), "synthetic env: arm out of range");
        double r = p_.offset + mu_[a].dot(x);
        for (std::size_t j = 0; j < centers_[a].size(); ++j) {
            if ((x - centers_[a][j]).norm() < p_.bump_radius) r += values_[a][j];
        }
        return r;
    }

    ArmIndex oracle_arm(const Context& x) const
    {
        std::vector<double> e(arms());
        for (ArmIndex a = 0; a < arms(); ++a) e[a] = expected_reward(x, a);
        return argmax(e);
    }

    /// Expected reward plus Gaussian noise truncated to [-1, 1] by rejection.
    double realized_reward(std::size_t t, const Context& x, ArmIndex a) const
    {
        const double mean = expected_reward(x, a);
        if (p_.noise_sigma == 0.0) return mean;
        Rng rng(mix_seed(seed_, t, 0x6E6F697365ULL + a));
        for (int i = 0; i < 1000; ++i) {
            const double r = mean + p_.noise_sigma * rng.normal();
            if (r >= -1.0 && r <= 1.0) return r;
        }
        return mean;
    }

    std::unique_ptr<EnvSession> start() const override { return std::make_unique<Session>(*this); }

private:
    Context draw_context(Rng& rng) const
    {
        if (prototypes_.empty()) return draw_uniform_context(rng);
        Context x = prototypes_[rng.below(prototypes_.size())];
        for (auto& v : x) v = std::abs(v + p_.cluster_jitter * rng.normal());
        const double n = x.norm();
        if (!(n > 0.0)) return draw_uniform_context(rng);
        return x / n;
    }

    Context draw_uniform_context(Rng& rng) const
    {
        Context x(static_cast<Eigen::Index>(p_.dim));
        for (auto& v : x) v = std::abs(rng.normal());
        const double n = x.norm();
        if (!(n > 0.0)) return Context::Ones(x.size()) / std::sqrt(static_cast<double>(p_.dim));
        return x / n;
    }

    class Session : public EnvSession {
    public:
        explicit Session(const SyntheticHybridEnv& env) : env_(env) {}
        bool next(Context& x) override
        {
            t_ = started_ ? t_ + 1 : 0;
            started_ = true;
            x_ = env_.context_at(t_);
            x = x_;
            return true;
        }
        RoundFeedback pull(ArmIndex arm) override
        {
            double best = -kHuge;
            for (ArmIndex a = 0; a < env_.arms(); ++a) best = std::max(best, env_.expected_reward(x_, a));
            return {env_.realized_reward(t_, x_, arm), true, env_.expected_reward(x_, arm), best};
        }

    private:
        static constexpr double kHuge = 1e300;
        const SyntheticHybridEnv& env_;
        Context x_;
        std::size_t t_ = 0;
        bool started_ = false;
    };

    std::uint64_t seed_;
    SyntheticParams p_;
    std::vector<Context> prototypes_;
    std::vector<Context> mu_;
    std::vector<std::vector<Context>> centers_;
    std::vector<std::vector<double>> values_;
};

inline SyntheticHybridEnv synthetic_hybrid(std::uint64_t seed, std::size_t d, std::size_t arms, std::size_t bumps,
                                           double noise_sigma)
{
    SyntheticParams p;
    p.dim = d;
    p.arms = arms;
    p.bumps = bumps;
    p.noise_sigma = noise_sigma;
    if (bumps > 0) p.bump_scale = std::min(p.bump_scale, (1.0 - p.linear_scale) / static_cast<double>(bumps));
    return {seed, p};
}

} // namespace lnucb
