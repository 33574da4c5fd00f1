#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "biasamp/core_stats.hpp"

namespace biasamp {

/// Non-negative, finite per-datum weights with at least one positive entry.
class WeightVector {
public:
    explicit WeightVector(std::vector<double> weights);

    static WeightVector uniform(std::size_t n);

    /// Copy rescaled to mean exactly 1. Equal weights map to exact ones.
    WeightVector normalized() const;

    std::span<const double> weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return weights_.size(); }
    bool is_normalized() const noexcept { return normalized_; }
    double sum() const noexcept;

private:
    WeightVector(std::vector<double> weights, bool normalized)
        : weights_(std::move(weights)), normalized_(normalized) {}

    std::vector<double> weights_;
    bool normalized_ = false;
};

struct FitOptions {
    double tol_step = 1e-8;
    double tol_grad = 1e-8;
    std::size_t max_iters = 500;
    bool record_trace = false;
};

struct FitResult {
    BetaParams params;
    /// sum_i w_i log f(x_i) under the caller's (unnormalized) weights
    double weighted_loglik;
    std::size_t iterations;
    bool converged;
    /// Euclidean norm of the gradient of the mean log-likelihood with respect
    /// to (log alpha, log beta).
    double gradient_norm_at_exit;
    double last_step;
    /// Mean weighted log-likelihood at the start point and after every
    /// iteration; filled only when FitOptions::record_trace is set.
    std::vector<double> loglik_trace;
};

double weighted_log_likelihood(const BetaParams& params, const Dataset& data, const WeightVector& w);

/// Population-convention (divide by sum w) moment match, shapes floored at 0.01.
BetaParams weighted_method_of_moments(const Dataset& data, const WeightVector& w);

FitResult fit_mle(const Dataset& data, const FitOptions& options = {});
FitResult fit_wmle(const Dataset& data, const WeightVector& w, const FitOptions& options = {});

}  // namespace biasamp
