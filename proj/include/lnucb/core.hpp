#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lnucb {

using Context = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ArmIndex = std::size_t;

/// Thrown for contract violations: bad dimensions, invalid arms, bad parameters.
class BanditError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void require(bool cond, const std::string& what)
{
    if (!cond) {
        throw BanditError(what);
    }
}

inline bool all_finite(const Context& x) { return x.allFinite(); }

struct RewardSample {
    double value = 0.0;
    std::size_t round = 0;
};

/// Per-arm decomposition of an LNUCB-style score: ucb = linear + knn + alpha * width.
struct ScoreBreakdown {
    double linear = 0.0;
    double knn = 0.0;
    double alpha = 0.0;
    double width = 0.0;
    double ucb = 0.0;
};

struct RoundRecord {
    std::size_t round = 0;
    Context context;
    ArmIndex chosen_arm = 0;
    double reward = 0.0;
    std::optional<std::vector<double>> per_arm_scores;
};

// ---------------------------------------------------------------------------
// Randomness
//
// Generator: splitmix64 seeding into xoshiro256**. Both are fully specified
// bit-level algorithms, and the real-valued transforms below are written out
// here rather than taken from <random> distributions, whose output differs
// between standard library implementations.
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Stateless mix of several words, used for counter-based streams.
inline constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0)
{
    std::uint64_t s = a;
    std::uint64_t h = splitmix64(s);
    s = h ^ (b * 0xD1B54A32D192ED03ULL);
    h = splitmix64(s);
    s = h ^ (c * 0x8CB92BA72F3D8DD7ULL);
    return splitmix64(s);
}

class Rng {
public:
    static constexpr const char* kAlgorithm = "xoshiro256**/splitmix64";

    explicit Rng(std::uint64_t seed = 0) : seed_(seed)
    {
        std::uint64_t s = seed;
        for (auto& w : state_) {
            w = splitmix64(s);
        }
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64()
    {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Lemire-free rejection for exactness.
    std::uint64_t below(std::uint64_t n)
    {
        require(n > 0, "Rng::below: n must be positive");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v = 0;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    /// Standard normal via Box-Muller (one value per call, the pair is not cached).
    double normal()
    {
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Gamma(shape, 1) by Marsaglia-Tsang, with the shape < 1 boost.
    double gamma(double shape)
    {
        require(shape > 0.0, "Rng::gamma: shape must be positive");
        if (shape < 1.0) {
            double u = uniform();
            while (u <= 0.0) {
                u = uniform();
            }
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = 0.0;
            double v = 0.0;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) {
                return d * v;
            }
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
                return d * v;
            }
        }
    }

    double beta(double a, double b)
    {
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t seed_;
    std::uint64_t state_[4] {};
};

// ---------------------------------------------------------------------------
// Selection
// ---------------------------------------------------------------------------

enum class TieBreak { LowestIndex, SeededRandom };

inline std::string to_string(TieBreak t) { return t == TieBreak::LowestIndex ? "lowest-index" : "seeded-random"; }

inline TieBreak tie_break_from_string(const std::string& s)
{
    if (s == "lowest-index") {
        return TieBreak::LowestIndex;
    }
    if (s == "seeded-random") {
        return TieBreak::SeededRandom;
    }
    throw BanditError("unknown tie-break rule: " + s);
}

/// Argmax over a finite score vector. Exact equality counts as a tie; with
/// SeededRandom the winner among tied arms is drawn from `rng`.
inline ArmIndex argmax(std::span<const double> scores, TieBreak rule = TieBreak::LowestIndex, Rng* rng = nullptr)
{
    require(!scores.empty(), "argmax: no arms");
    ArmIndex best = 0;
    std::size_t ties = 1;
    for (ArmIndex a = 1; a < scores.size(); ++a) {
        if (scores[a] > scores[best]) {
            best = a;
            ties = 1;
        } else if (scores[a] == scores[best]) {
            ++ties;
        }
    }
    if (rule == TieBreak::LowestIndex || ties == 1 || rng == nullptr) {
        return best;
    }
    auto pick = rng->below(ties);
    for (ArmIndex a = best; a < scores.size(); ++a) {
        if (scores[a] == scores[best]) {
            if (pick == 0) {
                return a;
            }
            --pick;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Policy interface
// ---------------------------------------------------------------------------

/// Common contract for every algorithm: `select` is const (no state change),
/// `update` touches the chosen arm's model and the global counters only.
/// Randomized policies draw from a stream keyed on (seed, round) so that
/// selection stays a pure function of state and round.
class Policy {
public:
    virtual ~Policy() = default;

    virtual std::string id() const = 0;
    virtual std::size_t arms() const = 0;
    virtual std::size_t dim() const = 0;

    /// Per-arm scores used for the argmax; randomized policies include their draw.
    virtual std::vector<double> scores(const Context& x, std::size_t round) const = 0;

    virtual ArmIndex select(const Context& x, std::size_t round) const
    {
        check_context(x);
        auto s = scores(x, round);
        Rng rng(mix_seed(seed_, round, 0x7469656272656B00ULL));
        return argmax(s, tie_break_, &rng);
    }

    virtual void update(ArmIndex arm, const Context& x, double reward) = 0;

    /// Per-arm breakdown for tracing. Policies without an additive decomposition
    /// report the score in `ucb` only.
    virtual std::vector<ScoreBreakdown> breakdown(const Context& x, std::size_t round) const
    {
        auto s = scores(x, round);
        std::vector<ScoreBreakdown> out(s.size());
        for (std::size_t a = 0; a < s.size(); ++a) {
            out[a].ucb = s[a];
        }
        return out;
    }

    virtual std::unique_ptr<Policy> clone() const = 0;

    std::uint64_t seed() const { return seed_; }
    void set_seed(std::uint64_t seed) { seed_ = seed; }
    TieBreak tie_break() const { return tie_break_; }
    void set_tie_break(TieBreak t) { tie_break_ = t; }

protected:
    void check_context(const Context& x) const
    {
        require(arms() > 0, "policy has no arms");
        require(static_cast<std::size_t>(x.size()) == dim(),
                "context dimension " + std::to_string(x.size()) + " does not match policy dimension " + std::to_string(dim()));
        require(all_finite(x), "context has non-finite entries");
    }

    void check_update(ArmIndex arm, const Context& x, double reward) const
    {
        require(arm < arms(), "arm index " + std::to_string(arm) + " out of range");
        check_context(x);
        require(std::isfinite(reward), "reward must be finite");
    }

    Rng round_rng(std::size_t round) const { return Rng(mix_seed(seed_, round, 0x73636F7265ULL)); }

private:
    std::uint64_t seed_ = 0;
    TieBreak tie_break_ = TieBreak::LowestIndex;
};

inline ArmIndex policy_select(const Policy& p, const Context& x, std::size_t round) { return p.select(x, round); }

inline void policy_update(Policy& p, ArmIndex arm, const Context& x, double reward) { p.update(arm, x, reward); }

} // namespace lnucb
