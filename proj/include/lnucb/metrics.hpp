#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lnucb/core.hpp"

namespace lnucb {

/// Time series of one (policy, seed) run.
struct RunResult {
    std::string policy;
    std::string params;
    std::uint64_t seed = 0;
    std::vector<double> rewards;
    std::vector<double> cumulative_reward;
    std::vector<double> mean_reward;
    /// Empty when the environment has no oracle.
    std::vector<double> cumulative_regret;
    std::vector<ArmIndex> arms;
    /// Per-round breakdown of the chosen arm's score, when traced.
    std::vector<ScoreBreakdown> trace;
    /// Rows visited (replay) or rounds played.
    std::size_t rows_seen = 0;
    std::size_t matched_steps = 0;
    double runtime_s = 0.0;

    std::size_t horizon() const { return cumulative_reward.size(); }
    bool has_regret() const { return !cumulative_regret.empty(); }
    double final_cumulative() const { return cumulative_reward.empty() ? 0.0 : cumulative_reward.back(); }
    double final_mean() const { return mean_reward.empty() ? 0.0 : mean_reward.back(); }
    double final_regret() const { return cumulative_regret.empty() ? 0.0 : cumulative_regret.back(); }
};

/// Prefix sums of (oracle - obtained).
inline std::vector<double> regret_series(std::span<const double> rewards, std::span<const double> oracle_rewards)
{
    require(rewards.size() == oracle_rewards.size(), "regret_series: length mismatch");
    std::vector<double> out(rewards.size());
    double acc = 0.0;
    for (std::size_t t = 0; t < rewards.size(); ++t) {
        acc += oracle_rewards[t] - rewards[t];
        out[t] = acc;
    }
    return out;
}

/// cumulative[t] and cumulative[t] / (t + 1).
inline void cumulative_and_mean(std::span<const double> rewards, std::vector<double>& cumulative, std::vector<double>& mean)
{
    cumulative.resize(rewards.size());
    mean.resize(rewards.size());
    double acc = 0.0;
    for (std::size_t t = 0; t < rewards.size(); ++t) {
        acc += rewards[t];
        cumulative[t] = acc;
        mean[t] = acc / static_cast<double>(t + 1);
    }
}

// ---------------------------------------------------------------------------
// Confidence-width and regret-bound diagnostics
// ---------------------------------------------------------------------------

struct DiagnosticsParams {
    double sigma = 1.0;
    double delta = 0.1;
    double context_bound = 1.0;   // B
    double parameter_bound = 1.0; // W
    std::size_t dim = 2;
    /// Absolute constant of the regret bound; its value is not pinned down, 1 by default.
    double b = 1.0;
    /// sum over arms of T^a (u^a)^2.
    double knn_uncertainty_sum = 0.0;

    void validate() const
    {
        require(sigma > 0.0 && std::isfinite(sigma), "diagnostics: sigma must be positive");
        require(delta > 0.0 && delta < 1.0, "diagnostics: delta must lie in (0, 1)");
        require(context_bound > 0.0 && parameter_bound > 0.0, "diagnostics: B and W must be positive");
        require(dim >= 1, "diagnostics: dimension must be at least 1");
        require(b > 0.0, "diagnostics: b must be positive");
        require(knn_uncertainty_sum >= 0.0, "diagnostics: uncertainty sum must be nonnegative");
    }
};

/// sigma^2 (2 + 4 d ln(1 + T B^2 W^2 / d + U / d) + 8 ln(4 / delta)), natural logs.
/// The confidence width does not depend on the current round t beyond T.
inline double beta_bound(const DiagnosticsParams& p, std::size_t horizon, std::size_t /*t*/ = 0)
{
    const double d = static_cast<double>(p.dim);
    const double T = static_cast<double>(horizon);
    const double bw = p.context_bound * p.context_bound * p.parameter_bound * p.parameter_bound;
    return p.sigma * p.sigma *
           (2.0 + 4.0 * d * std::log(1.0 + T * bw / d + p.knn_uncertainty_sum / d) + 8.0 * std::log(4.0 / p.delta));
}

/// b sigma sqrt(T (d ln(1 + T B^2 W^2 / (d sigma^2) + U / (d sigma^2)) + ln(4 / delta))).
inline double regret_bound(const DiagnosticsParams& p, std::size_t horizon)
{
    const double d = static_cast<double>(p.dim);
    const double T = static_cast<double>(horizon);
    const double s2 = p.sigma * p.sigma;
    const double bw = p.context_bound * p.context_bound * p.parameter_bound * p.parameter_bound;
    const double inner = d * std::log(1.0 + T * bw / (d * s2) + p.knn_uncertainty_sum / (d * s2)) + std::log(4.0 / p.delta);
    return p.b * p.sigma * std::sqrt(T * inner);
}

/// Bound value at t = 1..horizon.
inline std::vector<double> regret_bound_curve(const DiagnosticsParams& p, std::size_t horizon)
{
    p.validate();
    require(horizon >= 1, "regret_bound_curve: horizon must be at least 1");
    std::vector<double> out(horizon);
    for (std::size_t t = 1; t <= horizon; ++t) out[t - 1] = regret_bound(p, t);
    return out;
}

/// Least-squares slope of ln R_t against ln t over the second half of the
/// series (t is 1-based). Nonpositive entries are skipped.
inline double sublinearity_exponent(std::span<const double> regret)
{
    require(regret.size() >= 100, "sublinearity_exponent: need at least 100 points");
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = regret.size() / 2; i < regret.size(); ++i) {
        if (!(regret[i] > 0.0)) continue;
        const double x = std::log(static_cast<double>(i + 1));
        const double y = std::log(regret[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    require(n >= 2, "sublinearity_exponent: fewer than two positive points");
    const double nn = static_cast<double>(n);
    const double mx = sx / nn;
    const double my = sy / nn;
    const double vx = sxx / nn - mx * mx;
    require(vx > 0.0, "sublinearity_exponent: degenerate abscissa");
    return (sxy / nn - mx * my) / vx;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

/// Population mean and standard deviation.
inline MeanStd mean_std(std::span<const double> v)
{
    require(!v.empty(), "mean_std: empty input");
    // Sorted summation keeps the result independent of input order.
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    double sum = 0.0;
    for (double x : s) sum += x;
    const double m = sum / static_cast<double>(s.size());
    std::vector<double> sq(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) sq[i] = (s[i] - m) * (s[i] - m);
    std::sort(sq.begin(), sq.end());
    double ss = 0.0;
    for (double x : sq) ss += x;
    return {m, std::sqrt(ss / static_cast<double>(s.size()))};
}

struct AggregateRow {
    std::string policy;
    std::string params;
    std::size_t runs = 0;
    std::size_t horizon = 0;
    MeanStd final_cum_reward;
    MeanStd final_mean_reward;
    MeanStd final_regret;
    bool has_regret = false;
    double runtime_s_mean = 0.0;
};

struct AggregateResult {
    std::vector<AggregateRow> rows;
    /// Per policy: std of the final mean reward across its parameter settings.
    std::map<std::string, double> robustness;
};

/// Groups runs by (policy, params); rows come out sorted by that key.
inline AggregateResult aggregate(std::span<const RunResult> results)
{
    require(!results.empty(), "aggregate: no results");
    std::map<std::pair<std::string, std::string>, std::vector<const RunResult*>> groups;
    for (const auto& r : results) groups[{r.policy, r.params}].push_back(&r);
    AggregateResult out;
    std::map<std::string, std::vector<double>> per_policy_means;
    for (const auto& [key, runs] : groups) {
        AggregateRow row;
        row.policy = key.first;
        row.params = key.second;
        row.runs = runs.size();
        row.horizon = runs.front()->horizon();
        row.has_regret = runs.front()->has_regret();
        std::vector<double> cum, mean, reg, rt;
        for (const auto* r : runs) {
            require(r->horizon() == row.horizon, "aggregate: mixed horizons for " + key.first + " [" + key.second + "]");
            cum.push_back(r->final_cumulative());
            mean.push_back(r->final_mean());
            reg.push_back(r->final_regret());
            rt.push_back(r->runtime_s);
        }
        row.final_cum_reward = mean_std(cum);
        row.final_mean_reward = mean_std(mean);
        row.final_regret = mean_std(reg);
        row.runtime_s_mean = mean_std(rt).mean;
        per_policy_means[row.policy].push_back(row.final_mean_reward.mean);
        out.rows.push_back(std::move(row));
    }
    for (const auto& [policy, means] : per_policy_means) out.robustness[policy] = mean_std(means).std;
    return out;
}

/// Element-wise mean of equally long series.
inline std::vector<double> mean_series(std::span<const std::vector<double>> series)
{
    require(!series.empty(), "mean_series: no series");
    std::vector<double> out(series.front().size(), 0.0);
    for (const auto& s : series) {
        require(s.size() == out.size(), "mean_series: length mismatch");
        for (std::size_t i = 0; i < s.size(); ++i) out[i] += s[i];
    }
    for (auto& v : out) v /= static_cast<double>(series.size());
    return out;
}

} // namespace lnucb
