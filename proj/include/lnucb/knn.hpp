#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "lnucb/core.hpp"

namespace lnucb {

/// Per-arm history of (context, reward, round), ordered by round.
///
/// Contexts live in one flat row-major buffer so the neighbor scan walks
/// contiguous memory. With a capacity the oldest entry is evicted first.
class NeighborStore {
public:
    NeighborStore() = default;
    explicit NeighborStore(std::size_t dim, std::optional<std::size_t> capacity = std::nullopt)
        : dim_(dim), capacity_(capacity)
    {
        require(dim >= 1, "neighbor store: dimension must be at least 1");
        require(!capacity || *capacity >= 1, "neighbor store: capacity must be at least 1");
    }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return rewards_.size() - head_; }
    bool empty() const { return size() == 0; }
    std::optional<std::size_t> capacity() const { return capacity_; }

    void insert(const Context& x, double reward, std::size_t round)
    {
        require(static_cast<std::size_t>(x.size()) == dim_, "neighbor store: dimension mismatch");
        require(all_finite(x) && std::isfinite(reward), "neighbor store: non-finite entry");
        require(empty() || round > rounds_.back(), "neighbor store: rounds must be strictly increasing");
        if (capacity_ && size() == *capacity_) {
            ++head_;
            if (head_ >= 1024 && head_ * 2 >= rewards_.size()) {
                compact();
            }
        }
        contexts_.insert(contexts_.end(), x.data(), x.data() + x.size());
        rewards_.push_back(reward);
        rounds_.push_back(round);
    }

    /// Entry i in [0, size()), oldest first.
    Eigen::Map<const Context> context(std::size_t i) const
    {
        return {contexts_.data() + (head_ + i) * dim_, static_cast<Eigen::Index>(dim_)};
    }
    double reward(std::size_t i) const { return rewards_[head_ + i]; }
    std::size_t round(std::size_t i) const { return rounds_[head_ + i]; }

    double squared_distance(std::size_t i, const Context& x) const
    {
        const double* row = contexts_.data() + (head_ + i) * dim_;
        double acc = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) {
            const double diff = row[j] - x[static_cast<Eigen::Index>(j)];
            acc += diff * diff;
        }
        return acc;
    }

private:
    void compact()
    {
        contexts_.erase(contexts_.begin(), contexts_.begin() + static_cast<std::ptrdiff_t>(head_ * dim_));
        rewards_.erase(rewards_.begin(), rewards_.begin() + static_cast<std::ptrdiff_t>(head_));
        rounds_.erase(rounds_.begin(), rounds_.begin() + static_cast<std::ptrdiff_t>(head_));
        head_ = 0;
    }

    std::size_t dim_ = 1;
    std::optional<std::size_t> capacity_;
    std::vector<double> contexts_;
    std::vector<double> rewards_;
    std::vector<std::size_t> rounds_;
    std::size_t head_ = 0;
};

struct KnnScore {
    double score = 0.0;
    std::size_t k_used = 0;
    double u_max = 0.0;
    bool applied = false;
    /// Store positions of the selected neighbors, nearest first.
    std::vector<std::size_t> neighbors;
};

/// Population variance of the stored rewards; 0 with fewer than two entries.
inline double reward_variance(const NeighborStore& store)
{
    const std::size_t n = store.size();
    if (n < 2) {
        return 0.0;
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean += store.reward(i);
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = store.reward(i) - mean;
        ss += d * d;
    }
    return ss / static_cast<double>(n);
}

/// Neighbor count interpolated between the thresholds by reward variance.
/// Variance is clamped to [0, 1]; the result is rounded half-up.
inline std::size_t select_k(double variance, std::size_t theta_min, std::size_t theta_max)
{
    require(theta_min >= 1 && theta_min <= theta_max, "select_k: need 1 <= theta_min <= theta_max");
    require(std::isfinite(variance) && variance >= 0.0, "select_k: variance must be finite and nonnegative");
    const double v = std::clamp(variance, 0.0, 1.0);
    const double raw = static_cast<double>(theta_min) + static_cast<double>(theta_max - theta_min) * v;
    const auto k = static_cast<std::size_t>(std::floor(raw + 0.5));
    return std::clamp(k, theta_min, theta_max);
}

namespace detail {

inline KnnScore finish_score(const NeighborStore& store, std::vector<std::pair<double, std::size_t>>& picked)
{
    std::sort(picked.begin(), picked.end());
    KnnScore out;
    out.applied = true;
    out.k_used = picked.size();
    double sum = 0.0;
    out.neighbors.reserve(picked.size());
    for (const auto& [d2, i] : picked) {
        sum += store.reward(i);
        out.neighbors.push_back(i);
    }
    out.score = sum / static_cast<double>(picked.size());
    out.u_max = std::sqrt(picked.back().first);
    return out;
}

inline void check_query(const NeighborStore& store, const Context& x, std::size_t k)
{
    require(k >= 1, "knn: k must be at least 1");
    require(static_cast<std::size_t>(x.size()) == store.dim(), "knn: query dimension mismatch");
}

} // namespace detail

/// Mean reward of the k entries nearest to x (Euclidean; ties to the older
/// entry). Not applied when the store holds fewer than k entries.
inline KnnScore knn_score(const NeighborStore& store, const Context& x, std::size_t k)
{
    detail::check_query(store, x, k);
    if (store.size() < k) {
        return {};
    }
    // Bounded max-heap on (squared distance, position).
    std::vector<std::pair<double, std::size_t>> heap;
    heap.reserve(k);
    for (std::size_t i = 0; i < store.size(); ++i) {
        const double d2 = store.squared_distance(i, x);
        if (heap.size() < k) {
            heap.emplace_back(d2, i);
            std::push_heap(heap.begin(), heap.end());
        } else if (std::pair(d2, i) < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = {d2, i};
            std::push_heap(heap.begin(), heap.end());
        }
    }
    return detail::finish_score(store, heap);
}

/// Full-sort reference for knn_score.
inline KnnScore knn_score_bruteforce(const NeighborStore& store, const Context& x, std::size_t k)
{
    detail::check_query(store, x, k);
    if (store.size() < k) {
        return {};
    }
    std::vector<std::pair<double, std::size_t>> all;
    all.reserve(store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        all.emplace_back(store.squared_distance(i, x), i);
    }
    std::sort(all.begin(), all.end());
    all.resize(k);
    return detail::finish_score(store, all);
}

} // namespace lnucb
