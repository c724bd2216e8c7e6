#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lnucb/core.hpp"

namespace lnucb {

/// How the k-NN residual term enters a hybrid UCB policy.
enum class KnnMode { Off, Fixed, Adaptive };

inline std::string to_string(KnnMode m)
{
    switch (m) {
    case KnnMode::Off: return "off";
    case KnnMode::Fixed: return "fixed";
    case KnnMode::Adaptive: return "adaptive";
    }
    return "off";
}

inline KnnMode knn_mode_from_string(const std::string& s)
{
    if (s == "off") return KnnMode::Off;
    if (s == "fixed") return KnnMode::Fixed;
    if (s == "adaptive") return KnnMode::Adaptive;
    throw BanditError("unknown knn_mode: " + s);
}

/// Shortest round-trip decimal for a double. Locale-independent.
inline std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& key, const std::string& s)
{
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw BanditError("parameter '" + key + "': not a number: '" + s + "'");
    }
    return v;
}

inline std::size_t parse_size(const std::string& key, const std::string& s)
{
    std::size_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw BanditError("parameter '" + key + "': not a nonnegative integer: '" + s + "'");
    }
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& s)
{
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw BanditError("parameter '" + key + "': not a boolean: '" + s + "'");
}

/// Every tunable of the hybrid policy family plus the baseline knobs.
struct PolicyConfig {
    // ridge / UCB
    double lambda = 1.0;
    double alpha0 = 1.0;
    double kappa = 0.5;
    double gamma_cov = 0.0;
    bool floor_alpha_at_zero = false;
    bool attention = true;
    // k-NN
    KnnMode knn_mode = KnnMode::Adaptive;
    std::size_t theta_min = 1;
    std::size_t theta_max = 5;
    double variance_scale = 1.0;
    std::optional<std::size_t> store_capacity;
    /// Fixed neighbor count for fixed-k policies; 0 means theta_max.
    std::size_t k = 0;
    // baselines
    double rho = 1.0;
    double c = 0.0;
    double epsilon = 0.1;
    double prior_alpha = 1.0;
    double prior_beta = 1.0;
    double v = 1.0;
    double gamma_sm = 1.0;
    TieBreak tie_break = TieBreak::LowestIndex;

    std::size_t fixed_k() const { return k == 0 ? theta_max : k; }

    static const std::vector<std::string>& keys()
    {
        static const std::vector<std::string> all = {
            "lambda", "alpha0", "kappa", "gamma_cov", "floor_alpha_at_zero", "attention", "knn_mode", "theta_min",
            "theta_max", "variance_scale", "store_capacity", "k", "rho", "c", "epsilon", "prior_alpha", "prior_beta",
            "v", "gamma_sm", "tie_break"};
        return all;
    }

    void set(const std::string& key, const std::string& value)
    {
        if (key == "lambda") lambda = parse_double(key, value);
        else if (key == "alpha0" || key == "alpha") alpha0 = parse_double(key, value);
        else if (key == "kappa") kappa = parse_double(key, value);
        else if (key == "gamma_cov") gamma_cov = parse_double(key, value);
        else if (key == "floor_alpha_at_zero") floor_alpha_at_zero = parse_bool(key, value);
        else if (key == "attention") attention = parse_bool(key, value);
        else if (key == "knn_mode") knn_mode = knn_mode_from_string(value);
        else if (key == "theta_min") theta_min = parse_size(key, value);
        else if (key == "theta_max") theta_max = parse_size(key, value);
        else if (key == "variance_scale") variance_scale = parse_double(key, value);
        else if (key == "store_capacity") {
            if (value == "none" || value.empty()) store_capacity.reset();
            else store_capacity = parse_size(key, value);
        }
        else if (key == "k") k = parse_size(key, value);
        else if (key == "rho") rho = parse_double(key, value);
        else if (key == "c") c = parse_double(key, value);
        else if (key == "epsilon") epsilon = parse_double(key, value);
        else if (key == "prior_alpha") prior_alpha = parse_double(key, value);
        else if (key == "prior_beta") prior_beta = parse_double(key, value);
        else if (key == "v") v = parse_double(key, value);
        else if (key == "gamma_sm") gamma_sm = parse_double(key, value);
        else if (key == "tie_break") tie_break = tie_break_from_string(value);
        else throw BanditError("unknown policy parameter: " + key);
    }

    std::string get(const std::string& key) const
    {
        if (key == "lambda") return format_double(lambda);
        if (key == "alpha0") return format_double(alpha0);
        if (key == "kappa") return format_double(kappa);
        if (key == "gamma_cov") return format_double(gamma_cov);
        if (key == "floor_alpha_at_zero") return floor_alpha_at_zero ? "true" : "false";
        if (key == "attention") return attention ? "true" : "false";
        if (key == "knn_mode") return to_string(knn_mode);
        if (key == "theta_min") return std::to_string(theta_min);
        if (key == "theta_max") return std::to_string(theta_max);
        if (key == "variance_scale") return format_double(variance_scale);
        if (key == "store_capacity") return store_capacity ? std::to_string(*store_capacity) : "none";
        if (key == "k") return std::to_string(k);
        if (key == "rho") return format_double(rho);
        if (key == "c") return format_double(c);
        if (key == "epsilon") return format_double(epsilon);
        if (key == "prior_alpha") return format_double(prior_alpha);
        if (key == "prior_beta") return format_double(prior_beta);
        if (key == "v") return format_double(v);
        if (key == "gamma_sm") return format_double(gamma_sm);
        if (key == "tie_break") return to_string(tie_break);
        throw BanditError("unknown policy parameter: " + key);
    }

    std::map<std::string, std::string> to_map() const
    {
        std::map<std::string, std::string> m;
        for (const auto& key : keys()) {
            m[key] = get(key);
        }
        return m;
    }

    void validate() const
    {
        auto finite_pos = [](double x) { return std::isfinite(x) && x > 0.0; };
        auto finite_nonneg = [](double x) { return std::isfinite(x) && x >= 0.0; };
        require(finite_pos(lambda), "lambda must be positive");
        require(finite_nonneg(alpha0), "alpha0 must be nonnegative");
        require(std::isfinite(kappa) && kappa >= 0.0 && kappa <= 1.0, "kappa must lie in [0, 1]");
        require(finite_nonneg(gamma_cov), "gamma_cov must be nonnegative");
        require(theta_min >= 1 && theta_min <= theta_max, "need 1 <= theta_min <= theta_max");
        require(finite_pos(variance_scale), "variance_scale must be positive");
        require(!store_capacity || *store_capacity >= 1, "store_capacity must be at least 1");
        require(finite_nonneg(rho), "rho must be nonnegative");
        require(finite_nonneg(c), "c must be nonnegative");
        require(std::isfinite(epsilon) && epsilon >= 0.0 && epsilon <= 1.0, "epsilon must lie in [0, 1]");
        require(finite_pos(prior_alpha) && finite_pos(prior_beta), "Beta prior parameters must be positive");
        require(finite_nonneg(v), "v must be nonnegative");
        require(finite_pos(gamma_sm), "gamma_sm must be positive");
    }
};

} // namespace lnucb
