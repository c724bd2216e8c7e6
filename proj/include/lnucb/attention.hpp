#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "lnucb/core.hpp"

namespace lnucb {

struct AttentionParams {
    double alpha0 = 1.0;
    double kappa = 0.5;

    void validate() const
    {
        require(std::isfinite(alpha0) && alpha0 >= 0.0, "attention: alpha0 must be nonnegative");
        require(std::isfinite(kappa) && kappa >= 0.0 && kappa <= 1.0, "attention: kappa must lie in [0, 1]");
    }
};

/// Running per-arm reward sums and pull counts. The single source of the
/// local mean n and global mean g.
class RewardStats {
public:
    RewardStats() = default;
    explicit RewardStats(std::size_t arms) : sum_(arms, 0.0), count_(arms, 0)
    {
        require(arms >= 1, "reward stats: need at least one arm");
    }

    std::size_t arms() const { return sum_.size(); }
    std::size_t count(ArmIndex a) const
    {
        check(a);
        return count_[a];
    }
    double sum(ArmIndex a) const
    {
        check(a);
        return sum_[a];
    }
    std::span<const std::size_t> counts() const { return count_; }
    std::size_t total() const
    {
        std::size_t t = 0;
        for (auto c : count_) {
            t += c;
        }
        return t;
    }

    void record(ArmIndex a, double reward)
    {
        check(a);
        require(std::isfinite(reward), "reward stats: non-finite reward");
        sum_[a] += reward;
        ++count_[a];
    }

    /// Mean reward of arm a; 0 when never pulled.
    double local_mean(ArmIndex a) const
    {
        check(a);
        return count_[a] == 0 ? 0.0 : sum_[a] / static_cast<double>(count_[a]);
    }

    /// Average of the per-arm means over all arms (unpulled arms count as 0).
    double global_mean() const
    {
        require(!sum_.empty(), "reward stats: no arms");
        double acc = 0.0;
        for (ArmIndex a = 0; a < sum_.size(); ++a) {
            acc += local_mean(a);
        }
        return acc / static_cast<double>(sum_.size());
    }

private:
    void check(ArmIndex a) const { require(a < sum_.size(), "reward stats: arm index out of range"); }

    std::vector<double> sum_;
    std::vector<std::size_t> count_;
};

inline double local_mean(const RewardStats& s, ArmIndex a) { return s.local_mean(a); }
inline double global_mean(const RewardStats& s) { return s.global_mean(); }

/// alpha0 / (N + 1) * (kappa * g + (1 - kappa) * n)
inline double exploration_rate(const AttentionParams& p, std::size_t pulls, double global, double local)
{
    return p.alpha0 / (static_cast<double>(pulls) + 1.0) * (p.kappa * global + (1.0 - p.kappa) * local);
}

inline double alpha_forward_difference(const AttentionParams& p, std::size_t pulls, double global, double local)
{
    return exploration_rate(p, pulls + 1, global, local) - exploration_rate(p, pulls, global, local);
}

/// exp(-gamma * N_a) normalized over arms, with max-subtraction.
inline std::vector<double> softmax_attention(std::span<const std::size_t> counts, double gamma_sm)
{
    require(!counts.empty(), "softmax attention: no arms");
    require(std::isfinite(gamma_sm) && gamma_sm > 0.0, "softmax attention: gamma must be positive");
    const auto min_count = *std::min_element(counts.begin(), counts.end());
    std::vector<double> w(counts.size());
    double total = 0.0;
    for (std::size_t a = 0; a < counts.size(); ++a) {
        w[a] = std::exp(-gamma_sm * static_cast<double>(counts[a] - min_count));
        total += w[a];
    }
    for (auto& v : w) {
        v /= total;
    }
    return w;
}

} // namespace lnucb
