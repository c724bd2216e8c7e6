#pragma once

#include <cmath>
#include <span>

#include "lnucb/core.hpp"

namespace lnucb {

/// Online ridge regression for one arm.
///
/// Holds the design matrix sigma = lambda*I + sum x x^T (+ optional isotropic
/// inflation gamma_cov * e * I per update), its maintained inverse, the
/// response accumulator b = sum residual * x and the center mu_hat = sigma^-1 b.
class RidgeState {
public:
    /// Max-abs tolerance on sigma * sigma_inv - I before the inverse is rebuilt.
    static constexpr double kDriftTolerance = 1e-6;
    /// Updates between drift checks on the rank-one path.
    static constexpr std::size_t kDriftCheckPeriod = 64;

    RidgeState() = default;

    RidgeState(std::size_t dim, double lambda, double gamma_cov = 0.0)
        : lambda_(lambda), gamma_cov_(gamma_cov)
    {
        require(dim >= 1, "ridge: dimension must be at least 1");
        require(std::isfinite(lambda) && lambda > 0.0, "ridge: lambda must be positive");
        require(std::isfinite(gamma_cov) && gamma_cov >= 0.0, "ridge: gamma_cov must be nonnegative");
        const auto d = static_cast<Eigen::Index>(dim);
        sigma_ = Matrix::Identity(d, d) * lambda;
        sigma_inv_ = Matrix::Identity(d, d) / lambda;
        b_ = Context::Zero(d);
        mu_hat_ = Context::Zero(d);
    }

    std::size_t dim() const { return static_cast<std::size_t>(b_.size()); }
    double lambda() const { return lambda_; }
    double gamma_cov() const { return gamma_cov_; }
    std::size_t update_count() const { return update_count_; }
    const Matrix& sigma() const { return sigma_; }
    const Matrix& sigma_inv() const { return sigma_inv_; }
    const Context& b() const { return b_; }
    const Context& mu_hat() const { return mu_hat_; }

    double predict(const Context& x) const
    {
        check_dim(x);
        return mu_hat_.dot(x);
    }

    /// sqrt(x^T sigma^-1 x).
    double width(const Context& x) const
    {
        check_dim(x);
        const double q = x.dot(sigma_inv_ * x);
        return std::sqrt(std::max(q, 0.0));
    }

    void update(const Context& x, double residual, double e_knn = 0.0)
    {
        check_dim(x);
        require(all_finite(x), "ridge update: non-finite context");
        require(std::isfinite(residual), "ridge update: non-finite residual");
        require(std::isfinite(e_knn) && e_knn >= 0.0, "ridge update: e_knn must be finite and nonnegative");

        const double inflation = gamma_cov_ * e_knn;
        sigma_.noalias() += x * x.transpose();
        if (inflation > 0.0) {
            sigma_.diagonal().array() += inflation;
            rebuild_inverse();
        } else {
            // Sherman-Morrison: (S + x x^T)^-1 = S^-1 - S^-1 x x^T S^-1 / (1 + x^T S^-1 x)
            const Context sx = sigma_inv_ * x;
            const double denom = 1.0 + x.dot(sx);
            sigma_inv_.noalias() -= (sx * sx.transpose()) / denom;
            sigma_inv_ = 0.5 * (sigma_inv_ + sigma_inv_.transpose()).eval();
        }
        b_.noalias() += residual * x;
        ++update_count_;
        if (inflation == 0.0 && update_count_ % kDriftCheckPeriod == 0 && inverse_drift() > kDriftTolerance) {
            rebuild_inverse();
        }
        mu_hat_.noalias() = sigma_inv_ * b_;
    }

    /// max |sigma * sigma_inv - I|.
    double inverse_drift() const
    {
        const auto d = sigma_.rows();
        return (sigma_ * sigma_inv_ - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    }

    double log_det_sigma() const
    {
        Eigen::LLT<Matrix> llt(sigma_);
        return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    }

    double det_sigma() const { return std::exp(log_det_sigma()); }

private:
    void check_dim(const Context& x) const
    {
        require(static_cast<std::size_t>(x.size()) == dim(),
                "ridge: context dimension " + std::to_string(x.size()) + " != " + std::to_string(dim()));
    }

    void rebuild_inverse()
    {
        const auto d = sigma_.rows();
        sigma_inv_ = sigma_.llt().solve(Matrix::Identity(d, d));
    }

    double lambda_ = 1.0;
    double gamma_cov_ = 0.0;
    Matrix sigma_;
    Matrix sigma_inv_;
    Context b_;
    Context mu_hat_;
    std::size_t update_count_ = 0;
};

/// Confidence ellipsoid {mu : (mu - center)^T shape (mu - center) <= radius_sq}.
struct ConfidenceBall {
    Context center;
    Matrix shape;
    double radius_sq = 0.0;

    static ConfidenceBall of(const RidgeState& s, double beta)
    {
        require(beta >= 0.0, "confidence ball radius must be nonnegative");
        return {s.mu_hat(), s.sigma(), beta};
    }

    bool contains(const Context& mu, double tol = 0.0) const
    {
        const Context diff = mu - center;
        return diff.dot(shape * diff) <= radius_sq + tol;
    }
};

inline RidgeState ridge_init(std::size_t d, double lambda, double gamma_cov = 0.0) { return {d, lambda, gamma_cov}; }

inline double ridge_predict(const RidgeState& s, const Context& x) { return s.predict(x); }

inline double ridge_width(const RidgeState& s, const Context& x) { return s.width(x); }

inline RidgeState ridge_update(RidgeState s, const Context& x, double residual, double e_knn = 0.0)
{
    s.update(x, residual, e_knn);
    return s;
}

/// Direct solve of (X^T X + lambda I) mu = X^T y. Test oracle for the incremental path.
inline Context ridge_solve_batch(std::span<const Context> contexts, std::span<const double> residuals, double lambda,
                                 std::size_t dim)
{
    require(lambda > 0.0, "ridge_solve_batch: lambda must be positive");
    require(contexts.size() == residuals.size(), "ridge_solve_batch: length mismatch");
    const auto d = static_cast<Eigen::Index>(dim);
    Matrix gram = Matrix::Identity(d, d) * lambda;
    Context rhs = Context::Zero(d);
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        require(contexts[i].size() == d, "ridge_solve_batch: dimension mismatch");
        gram.noalias() += contexts[i] * contexts[i].transpose();
        rhs.noalias() += residuals[i] * contexts[i];
    }
    return gram.ldlt().solve(rhs);
}

} // namespace lnucb
