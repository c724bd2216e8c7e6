#pragma once

#include <chrono>

#include "lnucb/env.hpp"
#include "lnucb/metrics.hpp"
#include "lnucb/policies.hpp"

namespace lnucb {

struct RunOptions {
    std::size_t horizon = 1000;
    bool trace = false;
    /// Keep the full RoundRecord sequence (memory heavy; tests only).
    bool keep_records = false;
};

struct RunOutput {
    RunResult result;
    std::vector<RoundRecord> records;
};

/// Plays `policy` against a fresh session of `env` until `horizon` feedback
/// steps have been consumed or the environment runs out. Regret is measured
/// on expected rewards when the environment exposes them.
inline RunOutput run_policy(const Environment& env, Policy& policy, const RunOptions& opts)
{
    require(policy.arms() == env.arms(), "policy arm count does not match environment");
    require(policy.dim() == env.dim(), "policy dimension does not match environment");
    require(opts.horizon >= 1, "horizon must be at least 1");
    const auto start = std::chrono::steady_clock::now();
    RunOutput out;
    RunResult& r = out.result;
    r.policy = policy.id();
    r.seed = policy.seed();
    r.rewards.reserve(opts.horizon);
    std::vector<double> obtained;
    std::vector<double> oracle;
    auto session = env.start();
    Context x;
    std::size_t row = 0;
    while (r.rewards.size() < opts.horizon && session->next(x)) {
        const std::size_t round = row++;
        const ArmIndex arm = policy.select(x, round);
        std::optional<ScoreBreakdown> chosen;
        std::vector<double> per_arm;
        if (opts.trace || opts.keep_records) {
            auto b = policy.breakdown(x, round);
            chosen = b.at(arm);
            for (const auto& s : b) per_arm.push_back(s.ucb);
        }
        const RoundFeedback fb = session->pull(arm);
        if (!fb.step_consumed) continue;
        if (opts.keep_records) {
            out.records.push_back({r.rewards.size(), x, arm, fb.reward, per_arm});
        }
        policy.update(arm, x, fb.reward);
        r.rewards.push_back(fb.reward);
        r.arms.push_back(arm);
        if (opts.trace) r.trace.push_back(*chosen);
        if (env.has_oracle()) {
            obtained.push_back(fb.expected_reward.value_or(fb.reward));
            oracle.push_back(fb.oracle_reward.value_or(fb.reward));
        }
    }
    r.rows_seen = row;
    r.matched_steps = r.rewards.size();
    cumulative_and_mean(r.rewards, r.cumulative_reward, r.mean_reward);
    if (env.has_oracle()) r.cumulative_regret = regret_series(obtained, oracle);
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

} // namespace lnucb
