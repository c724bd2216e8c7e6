#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "lnucb/attention.hpp"
#include "lnucb/config.hpp"
#include "lnucb/core.hpp"
#include "lnucb/knn.hpp"
#include "lnucb/linear.hpp"

namespace lnucb {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Ridge state, neighbor history and pull count of one arm.
struct ArmModel {
    RidgeState ridge;
    NeighborStore neighbors;
    std::size_t pulls = 0;

    ArmModel() = default;
    ArmModel(std::size_t dim, const PolicyConfig& cfg)
        : ridge(dim, cfg.lambda, cfg.gamma_cov), neighbors(dim, cfg.store_capacity)
    {
    }
};

/// k for an arm: adaptive from reward variance, or fixed.
inline std::size_t neighbor_count(const NeighborStore& store, const PolicyConfig& cfg)
{
    if (cfg.knn_mode == KnnMode::Fixed) {
        return cfg.fixed_k();
    }
    return select_k(reward_variance(store) * cfg.variance_scale, cfg.theta_min, cfg.theta_max);
}

inline KnnScore knn_component(const NeighborStore& store, const Context& x, const PolicyConfig& cfg)
{
    if (cfg.knn_mode == KnnMode::Off) {
        return {};
    }
    return knn_score(store, x, neighbor_count(store, cfg));
}

// ---------------------------------------------------------------------------
// Hybrid linear + k-NN UCB family
// ---------------------------------------------------------------------------

/// Disjoint per-arm ridge model plus an optional k-NN reward term and either
/// the temporal-attention exploration rate or a fixed one:
///
///     ucb_a = l_a(x) + f_a(x) + alpha_a * sqrt(x^T Sigma_a^-1 x)
///
/// With `attention` off and `knn_mode` off this is LinUCB; with a fixed k it is
/// the plain linear + k-NN combination; with both enabled it is LNUCB-TA.
class HybridUcb : public Policy {
public:
    HybridUcb(std::string id, std::size_t arms, std::size_t dim, PolicyConfig cfg)
        : id_(std::move(id)), dim_(dim), cfg_(std::move(cfg)), stats_(arms)
    {
        cfg_.validate();
        require(dim >= 1, "policy dimension must be at least 1");
        models_.reserve(arms);
        for (std::size_t a = 0; a < arms; ++a) {
            models_.emplace_back(dim, cfg_);
        }
        set_tie_break(cfg_.tie_break);
    }

    std::string id() const override { return id_; }
    std::size_t arms() const override { return models_.size(); }
    std::size_t dim() const override { return dim_; }
    const PolicyConfig& config() const { return cfg_; }
    const ArmModel& model(ArmIndex a) const { return models_.at(a); }
    const RewardStats& stats() const { return stats_; }

    ScoreBreakdown score(ArmIndex a, const Context& x) const
    {
        const ArmModel& m = models_.at(a);
        ScoreBreakdown s;
        s.linear = m.ridge.predict(x);
        const KnnScore k = knn_component(m.neighbors, x, cfg_);
        s.knn = k.applied ? k.score : 0.0;
        if (cfg_.attention) {
            s.alpha = exploration_rate({cfg_.alpha0, cfg_.kappa}, m.pulls, stats_.global_mean(), stats_.local_mean(a));
        } else {
            s.alpha = cfg_.alpha0;
        }
        if (cfg_.floor_alpha_at_zero) {
            s.alpha = std::max(s.alpha, 0.0);
        }
        s.width = m.ridge.width(x);
        s.ucb = s.linear + s.knn + s.alpha * s.width;
        return s;
    }

    std::vector<ScoreBreakdown> breakdown(const Context& x, std::size_t) const override
    {
        check_context(x);
        std::vector<ScoreBreakdown> out(arms());
        for (ArmIndex a = 0; a < arms(); ++a) {
            out[a] = score(a, x);
        }
        return out;
    }

    std::vector<double> scores(const Context& x, std::size_t round) const override
    {
        auto b = breakdown(x, round);
        std::vector<double> s(b.size());
        std::transform(b.begin(), b.end(), s.begin(), [](const ScoreBreakdown& v) { return v.ucb; });
        return s;
    }

    /// The k-NN term is recomputed from the arm's unchanged state, so it equals
    /// the value used when this round's selection was made.
    void update(ArmIndex arm, const Context& x, double reward) override
    {
        check_update(arm, x, reward);
        ArmModel& m = models_[arm];
        const KnnScore k = knn_component(m.neighbors, x, cfg_);
        const double knn = k.applied ? k.score : 0.0;
        const double e = k.applied ? k.u_max * k.u_max : 0.0;
        m.ridge.update(x, reward - knn, e);
        m.neighbors.insert(x, reward, update_round_);
        ++m.pulls;
        stats_.record(arm, reward);
        ++update_round_;
    }

    std::unique_ptr<Policy> clone() const override { return std::make_unique<HybridUcb>(*this); }

private:
    std::string id_;
    std::size_t dim_;
    PolicyConfig cfg_;
    std::vector<ArmModel> models_;
    RewardStats stats_;
    std::size_t update_round_ = 0;
};

inline PolicyConfig lnucb_ta_config(PolicyConfig cfg)
{
    cfg.attention = true;
    cfg.knn_mode = KnnMode::Adaptive;
    return cfg;
}

inline PolicyConfig linucb_config(PolicyConfig cfg)
{
    cfg.attention = false;
    cfg.knn_mode = KnnMode::Off;
    return cfg;
}

inline PolicyConfig lin_knn_config(PolicyConfig cfg)
{
    cfg.attention = false;
    cfg.knn_mode = KnnMode::Fixed;
    return cfg;
}

// ---------------------------------------------------------------------------
// Context-free baselines
// ---------------------------------------------------------------------------

/// Bernoulli KL divergence kl(p, q), arguments clamped away from {0, 1}.
inline double bernoulli_kl(double p, double q)
{
    constexpr double eps = 1e-15;
    p = std::clamp(p, eps, 1.0 - eps);
    q = std::clamp(q, eps, 1.0 - eps);
    return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

/// Largest q in [p, 1] with kl(p, q) <= budget, by bisection.
inline double kl_upper_bound(double p, double budget, double tol = 1e-9, int max_iter = 64)
{
    p = std::clamp(p, 0.0, 1.0);
    if (budget <= 0.0) {
        return p;
    }
    double lo = p;
    double hi = 1.0;
    for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (bernoulli_kl(p, mid) > budget) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return lo;
}

/// Shared bookkeeping for policies that only look at per-arm reward means.
class MeanRewardPolicy : public Policy {
public:
    MeanRewardPolicy(std::string id, std::size_t arms, std::size_t dim, const PolicyConfig& cfg)
        : id_(std::move(id)), dim_(dim), cfg_(cfg), stats_(arms)
    {
        cfg_.validate();
        require(dim >= 1, "policy dimension must be at least 1");
        set_tie_break(cfg_.tie_break);
    }

    std::string id() const override { return id_; }
    std::size_t arms() const override { return stats_.arms(); }
    std::size_t dim() const override { return dim_; }
    const RewardStats& stats() const { return stats_; }

    void update(ArmIndex arm, const Context& x, double reward) override
    {
        check_update(arm, x, reward);
        stats_.record(arm, reward);
    }

protected:
    std::string id_;
    std::size_t dim_;
    PolicyConfig cfg_;
    RewardStats stats_;
};

/// mean + rho * sqrt(ln t / N); unpulled arms first.
class UcbPolicy : public MeanRewardPolicy {
public:
    UcbPolicy(std::size_t arms, std::size_t dim, const PolicyConfig& cfg) : MeanRewardPolicy("ucb", arms, dim, cfg) {}

    std::vector<double> scores(const Context& x, std::size_t) const override
    {
        check_context(x);
        const double log_t = std::log(static_cast<double>(stats_.total() + 1));
        std::vector<double> s(arms());
        for (ArmIndex a = 0; a < arms(); ++a) {
            const auto n = stats_.count(a);
            s[a] = n == 0 ? kInf : stats_.local_mean(a) + cfg_.rho * std::sqrt(log_t / static_cast<double>(n));
        }
        return s;
    }

    std::unique_ptr<Policy> clone() const override { return std::make_unique<UcbPolicy>(*this); }
};

/// KL-UCB with exploration budget (ln t + c ln ln t) / N. Rewards are treated
/// as Bernoulli means, clamped to [0, 1].
class KlUcbPolicy : public MeanRewardPolicy {
public:
    KlUcbPolicy(std::size_t arms, std::size_t dim, const PolicyConfig& cfg)
        : MeanRewardPolicy("kl-ucb", arms, dim, cfg)
    {
    }

    std::vector<double> scores(const Context& x, std::size_t) const override
    {
        check_context(x);
        const double t = static_cast<double>(stats_.total() + 1);
        const double log_t = std::log(t);
        const double budget_num = log_t + (t >= 3.0 ? cfg_.c * std::log(log_t) : 0.0);
        std::vector<double> s(arms());
        for (ArmIndex a = 0; a < arms(); ++a) {
            const auto n = stats_.count(a);
            s[a] = n == 0 ? kInf : kl_upper_bound(stats_.local_mean(a), budget_num / static_cast<double>(n));
        }
        return s;
    }

    std::unique_ptr<Policy> clone() const override { return std::make_unique<KlUcbPolicy>(*this); }
};

/// Inverse-CDF draw from a discrete distribution using one uniform variate.
inline ArmIndex sample_categorical(std::span<const double> weights, Rng& rng)
{
    const double u = rng.uniform();
    double acc = 0.0;
    for (ArmIndex a = 0; a < weights.size(); ++a) {
        acc += weights[a];
        if (u < acc) {
            return a;
        }
    }
    return weights.size() - 1;
}

/// Epsilon-greedy on empirical means (unpulled arms have mean 0).
class EpsilonGreedyPolicy : public MeanRewardPolicy {
public:
    EpsilonGreedyPolicy(std::size_t arms, std::size_t dim, const PolicyConfig& cfg)
        : MeanRewardPolicy("eps-greedy", arms, dim, cfg)
    {
    }

    std::vector<double> scores(const Context& x, std::size_t) const override
    {
        check_context(x);
        std::vector<double> s(arms());
        for (ArmIndex a = 0; a < arms(); ++a) {
            s[a] = stats_.local_mean(a);
        }
        return s;
    }

    ArmIndex select(const Context& x, std::size_t round) const override
    {
        const auto s = scores(x, round);
        Rng rng = round_rng(round);
        if (rng.uniform() < cfg_.epsilon) {
            const std::vector<double> uniform(arms(), 1.0 / static_cast<double>(arms()));
            return sample_categorical(uniform, rng);
        }
        return argmax(s, tie_break(), &rng);
    }

    std::unique_ptr<Policy> clone() const override { return std::make_unique<EpsilonGreedyPolicy>(*this); }
};

/// Beta-Bernoulli Thompson sampling. A reward r in [0, 1] adds r successes
/// and 1 - r failures.
class BetaThompsonPolicy : public MeanRewardPolicy {
public:
    BetaThompsonPolicy(std::size_t arms, std::size_t dim, const PolicyConfig& cfg)
        : MeanRewardPolicy("beta-thompson", arms, dim, cfg)
    {
    }

    double posterior_alpha(ArmIndex a) const { return cfg_.prior_alpha + std::clamp(stats_.sum(a), 0.0, static_cast<double>(stats_.count(a))); }
    double posterior_beta(ArmIndex a) const
    {
        return cfg_.prior_beta + static_cast<double>(stats_.count(a)) - (posterior_alpha(a) - cfg_.prior_alpha);
    }

    std::vector<double> scores(const Context& x, std::size_t round) const override
    {
        check_context(x);
        Rng rng = round_rng(round);
        std::vector<double> s(arms());
        for (ArmIndex a = 0; a < arms(); ++a) {
            s[a] = rng.beta(posterior_alpha(a), posterior_beta(a));
        }
        return s;
    }

    std::unique_ptr<Policy> clone() const override { return std::make_unique<BetaThompsonPolicy>(*this); }
};

// ---------------------------------------------------------------------------
// Linear Thompson sampling
// ---------------------------------------------------------------------------

/// Gaussian posterior sampling with scale v. Only the projection mu~^T x
/// matters for the argmax, so the draw is the scalar
/// N(mu_hat^T x, v^2 x^T Sigma^-1 x) per arm.
class LinThompsonPolicy : public Policy {
public:
    LinThompsonPolicy(std::size_t arms, std::size_t dim, const PolicyConfig& cfg) : dim_(dim), cfg_(cfg)
    {
        cfg_.validate();
        require(arms >= 1, "policy needs at least one arm");
        ridges_.assign(arms, RidgeState(dim, cfg_.lambda));
        set_tie_break(cfg_.tie_break);
    }

    std::string id() const override { return "linthompson"; }
    std::size_t arms() const override { return ridges_.size(); }
    std::size_t dim() const override { return dim_; }

    std::vector<double> scores(const Context& x, std::size_t round) const override
    {
        check_context(x);
        Rng rng = round_rng(round);
        std::vector<double> s(arms());
        for (ArmIndex a = 0; a < arms(); ++a) {
            s[a] = ridges_[a].predict(x) + cfg_.v * ridges_[a].width(x) * rng.normal();
        }
        return s;
    }

    void update(ArmIndex arm, const Context& x, double reward) override
    {
        check_update(arm, x, reward);
        ridges_[arm].update(x, reward);
    }

    std::unique_ptr<Policy> clone() const override { return std::make_unique<LinThompsonPolicy>(*this); }

private:
    std::size_t dim_;
    PolicyConfig cfg_;
    std::vector<RidgeState> ridges_;
};

// ---------------------------------------------------------------------------
// k-NN baselines
// ---------------------------------------------------------------------------

/// Fixed-k nearest-neighbor index with a distance bonus. `kl` switches the
/// optimism from rho * u_k to a KL-UCB bound on the neighbor mean (budget
/// c * ln t / k) plus u_k. Arms with fewer than k entries score +inf.
class KnnUcbPolicy : public Policy {
public:
    KnnUcbPolicy(bool kl, std::size_t arms, std::size_t dim, const PolicyConfig& cfg)
        : kl_(kl), dim_(dim), cfg_(cfg), stats_(arms)
    {
        cfg_.validate();
        require(dim >= 1, "policy dimension must be at least 1");
        stores_.assign(arms, NeighborStore(dim, cfg_.store_capacity));
        set_tie_break(cfg_.tie_break);
    }

    std::string id() const override { return kl_ ? "knn-kl-ucb" : "knn-ucb"; }
    std::size_t arms() const override { return stores_.size(); }
    std::size_t dim() const override { return dim_; }

    std::vector<double> scores(const Context& x, std::size_t) const override
    {
        check_context(x);
        const std::size_t k = cfg_.fixed_k();
        const double log_t = std::log(static_cast<double>(stats_.total() + 1));
        std::vector<double> s(arms());
        for (ArmIndex a = 0; a < arms(); ++a) {
            const KnnScore ks = knn_score(stores_[a], x, k);
            if (!ks.applied) {
                s[a] = kInf;
            } else if (kl_) {
                s[a] = kl_upper_bound(ks.score, cfg_.c * log_t / static_cast<double>(k)) + ks.u_max;
            } else {
                s[a] = ks.score + cfg_.rho * ks.u_max;
            }
        }
        return s;
    }

    void update(ArmIndex arm, const Context& x, double reward) override
    {
        check_update(arm, x, reward);
        stores_[arm].insert(x, reward, round_++);
        stats_.record(arm, reward);
    }

    std::unique_ptr<Policy> clone() const override { return std::make_unique<KnnUcbPolicy>(*this); }

private:
    bool kl_;
    std::size_t dim_;
    PolicyConfig cfg_;
    std::vector<NeighborStore> stores_;
    RewardStats stats_;
    std::size_t round_ = 0;
};

// ---------------------------------------------------------------------------
// Enhanced baselines: adaptive k-NN value term + softmax attention on the
// exploration knob.
// ---------------------------------------------------------------------------

enum class EnhancedBase { EpsilonGreedy, BetaThompson, LinThompson };

inline std::string to_string(EnhancedBase b)
{
    switch (b) {
    case EnhancedBase::EpsilonGreedy: return "eps-greedy";
    case EnhancedBase::BetaThompson: return "beta-thompson";
    case EnhancedBase::LinThompson: return "linthompson";
    }
    return "";
}

inline EnhancedBase enhanced_base_from_string(const std::string& s)
{
    if (s == "eps-greedy") return EnhancedBase::EpsilonGreedy;
    if (s == "beta-thompson") return EnhancedBase::BetaThompson;
    if (s == "linthompson") return EnhancedBase::LinThompson;
    throw BanditError("unknown enhanced base policy: " + s);
}

class EnhancedPolicy : public Policy {
public:
    EnhancedPolicy(EnhancedBase base, std::size_t arms, std::size_t dim, const PolicyConfig& cfg)
        : base_(base), dim_(dim), cfg_(cfg), stats_(arms)
    {
        cfg_.validate();
        require(dim >= 1, "policy dimension must be at least 1");
        cfg_.knn_mode = KnnMode::Adaptive;
        stores_.assign(arms, NeighborStore(dim, cfg_.store_capacity));
        if (base_ == EnhancedBase::LinThompson) {
            ridges_.assign(arms, RidgeState(dim, cfg_.lambda));
        }
        set_tie_break(cfg_.tie_break);
    }

    std::string id() const override { return "enhanced-" + to_string(base_); }
    std::size_t arms() const override { return stores_.size(); }
    std::size_t dim() const override { return dim_; }
    EnhancedBase base() const { return base_; }

    std::vector<double> attention_weights() const { return softmax_attention(stats_.counts(), cfg_.gamma_sm); }

    double knn_value(ArmIndex a, const Context& x) const
    {
        const KnnScore k = knn_component(stores_.at(a), x, cfg_);
        return k.applied ? k.score : 0.0;
    }

    /// Base value estimate plus the k-NN term, before any exploration.
    std::vector<double> values(const Context& x) const
    {
        std::vector<double> s(arms());
        for (ArmIndex a = 0; a < arms(); ++a) {
            double base = 0.0;
            switch (base_) {
            case EnhancedBase::EpsilonGreedy: base = stats_.local_mean(a); break;
            case EnhancedBase::BetaThompson: base = posterior_mean(a); break;
            case EnhancedBase::LinThompson: base = ridges_[a].predict(x); break;
            }
            s[a] = base + knn_value(a, x);
        }
        return s;
    }

    std::vector<double> scores(const Context& x, std::size_t round) const override
    {
        check_context(x);
        auto s = values(x);
        if (base_ == EnhancedBase::EpsilonGreedy) {
            return s;
        }
        const auto w = attention_weights();
        Rng rng = round_rng(round);
        for (ArmIndex a = 0; a < arms(); ++a) {
            if (base_ == EnhancedBase::BetaThompson) {
                const double draw = rng.beta(posterior_alpha(a), posterior_beta(a));
                s[a] += w[a] * (draw - posterior_mean(a));
            } else {
                s[a] += w[a] * cfg_.v * ridges_[a].width(x) * rng.normal();
            }
        }
        return s;
    }

    ArmIndex select(const Context& x, std::size_t round) const override
    {
        if (base_ != EnhancedBase::EpsilonGreedy) {
            return Policy::select(x, round);
        }
        check_context(x);
        const auto s = values(x);
        const auto w = attention_weights();
        Rng rng = round_rng(round);
        const ArmIndex greedy = argmax(s);
        if (rng.uniform() < cfg_.epsilon * w[greedy]) {
            return sample_categorical(w, rng);
        }
        return argmax(s, tie_break(), &rng);
    }

    void update(ArmIndex arm, const Context& x, double reward) override
    {
        check_update(arm, x, reward);
        const double knn = knn_value(arm, x);
        if (base_ == EnhancedBase::LinThompson) {
            ridges_[arm].update(x, reward - knn);
        }
        stores_[arm].insert(x, reward, round_++);
        stats_.record(arm, reward);
    }

    std::unique_ptr<Policy> clone() const override { return std::make_unique<EnhancedPolicy>(*this); }

private:
    double posterior_alpha(ArmIndex a) const
    {
        return cfg_.prior_alpha + std::clamp(stats_.sum(a), 0.0, static_cast<double>(stats_.count(a)));
    }
    double posterior_beta(ArmIndex a) const
    {
        return cfg_.prior_beta + static_cast<double>(stats_.count(a)) - (posterior_alpha(a) - cfg_.prior_alpha);
    }
    double posterior_mean(ArmIndex a) const
    {
        const double pa = posterior_alpha(a);
        return pa / (pa + posterior_beta(a));
    }

    EnhancedBase base_;
    std::size_t dim_;
    PolicyConfig cfg_;
    std::vector<NeighborStore> stores_;
    std::vector<RidgeState> ridges_;
    RewardStats stats_;
    std::size_t round_ = 0;
};

inline std::unique_ptr<Policy> enhanced_variant(const std::string& base, std::size_t arms, std::size_t dim,
                                                const PolicyConfig& cfg)
{
    return std::make_unique<EnhancedPolicy>(enhanced_base_from_string(base), arms, dim, cfg);
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& policy_ids()
{
    static const std::vector<std::string> ids = {
        "lnucb-ta", "ucb", "kl-ucb", "eps-greedy", "beta-thompson", "linucb", "linthompson", "knn-ucb", "knn-kl-ucb",
        "lin-knn-ucb", "enhanced-eps-greedy", "enhanced-beta-thompson", "enhanced-linthompson", "uniform"};
    return ids;
}

/// Parameters that influence each policy; used for the canonical params string.
inline std::vector<std::string> relevant_parameters(const std::string& id)
{
    if (id == "lnucb-ta")
        return {"alpha0", "attention", "floor_alpha_at_zero", "gamma_cov", "kappa", "knn_mode", "lambda", "theta_max",
                "theta_min", "variance_scale"};
    if (id == "linucb") return {"alpha0", "lambda"};
    if (id == "lin-knn-ucb") return {"alpha0", "k", "lambda", "theta_max"};
    if (id == "ucb") return {"rho"};
    if (id == "kl-ucb") return {"c"};
    if (id == "eps-greedy") return {"epsilon"};
    if (id == "beta-thompson") return {"prior_alpha", "prior_beta"};
    if (id == "linthompson") return {"lambda", "v"};
    if (id == "knn-ucb") return {"k", "rho", "theta_max"};
    if (id == "knn-kl-ucb") return {"c", "k", "theta_max"};
    if (id == "enhanced-eps-greedy") return {"epsilon", "gamma_sm", "theta_max", "theta_min", "variance_scale"};
    if (id == "enhanced-beta-thompson")
        return {"gamma_sm", "prior_alpha", "prior_beta", "theta_max", "theta_min", "variance_scale"};
    if (id == "enhanced-linthompson") return {"gamma_sm", "lambda", "theta_max", "theta_min", "v", "variance_scale"};
    if (id == "uniform") return {};
    throw BanditError("unknown policy id: " + id);
}

inline std::string params_string(const std::string& id, const PolicyConfig& cfg)
{
    std::string out;
    for (const auto& key : relevant_parameters(id)) {
        if (!out.empty()) out += ';';
        out += key + "=" + cfg.get(key);
    }
    return out;
}

/// Uniform-random arm choice; the reference point for linear regret.
class UniformPolicy : public Policy {
public:
    UniformPolicy(std::size_t arms, std::size_t dim) : arms_(arms), dim_(dim) { require(arms >= 1, "policy needs at least one arm"); }
    std::string id() const override { return "uniform"; }
    std::size_t arms() const override { return arms_; }
    std::size_t dim() const override { return dim_; }
    std::vector<double> scores(const Context& x, std::size_t round) const override
    {
        check_context(x);
        Rng rng = round_rng(round);
        std::vector<double> s(arms_);
        for (auto& v : s) v = rng.uniform();
        return s;
    }
    void update(ArmIndex arm, const Context& x, double reward) override { check_update(arm, x, reward); }
    std::unique_ptr<Policy> clone() const override { return std::make_unique<UniformPolicy>(*this); }

private:
    std::size_t arms_;
    std::size_t dim_;
};

inline std::unique_ptr<Policy> make_policy(const std::string& id, std::size_t arms, std::size_t dim,
                                           const PolicyConfig& cfg, std::uint64_t seed = 0)
{
    require(arms >= 1, "policy needs at least one arm");
    std::unique_ptr<Policy> p;
    if (id == "lnucb-ta") {
        // Ablation switches (attention, knn_mode) are honored as given.
        p = std::make_unique<HybridUcb>(id, arms, dim, cfg);
    } else if (id == "linucb") {
        p = std::make_unique<HybridUcb>(id, arms, dim, linucb_config(cfg));
    } else if (id == "lin-knn-ucb") {
        p = std::make_unique<HybridUcb>(id, arms, dim, lin_knn_config(cfg));
    } else if (id == "ucb") {
        p = std::make_unique<UcbPolicy>(arms, dim, cfg);
    } else if (id == "kl-ucb") {
        p = std::make_unique<KlUcbPolicy>(arms, dim, cfg);
    } else if (id == "eps-greedy") {
        p = std::make_unique<EpsilonGreedyPolicy>(arms, dim, cfg);
    } else if (id == "beta-thompson") {
        p = std::make_unique<BetaThompsonPolicy>(arms, dim, cfg);
    } else if (id == "linthompson") {
        p = std::make_unique<LinThompsonPolicy>(arms, dim, cfg);
    } else if (id == "knn-ucb") {
        p = std::make_unique<KnnUcbPolicy>(false, arms, dim, cfg);
    } else if (id == "knn-kl-ucb") {
        p = std::make_unique<KnnUcbPolicy>(true, arms, dim, cfg);
    } else if (id.starts_with("enhanced-")) {
        p = enhanced_variant(id.substr(9), arms, dim, cfg);
    } else if (id == "uniform") {
        p = std::make_unique<UniformPolicy>(arms, dim);
    } else {
        throw BanditError("unknown policy id: " + id);
    }
    p->set_seed(seed);
    return p;
}

} // namespace lnucb
