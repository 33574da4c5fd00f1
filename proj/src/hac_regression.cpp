#include "biasamp/hac_regression.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "biasamp/errors.hpp"

namespace biasamp {

Series first_difference(const Series& s) {
    if (s.size() < 2) {
        throw ArgumentError("first_difference: series '" + s.label + "' needs at least 2 values");
    }
    Series out{std::vector<double>(s.size() - 1), s.label};
    for (std::size_t k = 0; k + 1 < s.size(); ++k) out.values[k] = s.values[k + 1] - s.values[k];
    return out;
}

namespace {

struct Centered {
    double mean;
    double sxx;
};

// Throws when the regressor has no spread relative to its magnitude.
Centered center(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double sxx = 0.0, raw = 0.0;
    for (double v : x) {
        sxx += (v - mean) * (v - mean);
        raw += v * v;
    }
    if (!(sxx > 1e-24 * raw) || !(sxx > 0.0)) {
        throw DegenerateRegressorError("regressor has zero variance");
    }
    return {mean, sxx};
}

}  // namespace

OlsFit ols_fit(std::span<const double> dx, std::span<const double> dy) {
    if (dx.size() != dy.size()) throw ArgumentError("ols_fit: length mismatch");
    if (dx.size() < 3) throw ArgumentError("ols_fit: needs at least 3 observations");
    const auto [mx, sxx] = center(dx);
    double my = 0.0;
    for (double v : dy) my += v;
    my /= static_cast<double>(dy.size());
    double sxy = 0.0;
    for (std::size_t t = 0; t < dx.size(); ++t) sxy += (dx[t] - mx) * (dy[t] - my);
    const double beta = sxy / sxx;
    const double alpha = my - beta * mx;
    std::vector<double> resid(dx.size());
    for (std::size_t t = 0; t < dx.size(); ++t) resid[t] = dy[t] - alpha - beta * dx[t];
    return {alpha, beta, std::move(resid)};
}

OlsFit ols_fit(const Series& dx, const Series& dy) { return ols_fit(dx.values, dy.values); }

double newey_west_se(std::span<const double> x, std::span<const double> residuals, std::size_t lag) {
    const std::size_t n = x.size();
    if (residuals.size() != n) throw ArgumentError("newey_west_se: length mismatch");
    if (lag >= n) {
        std::ostringstream msg;
        msg << "newey_west_se: lag " << lag << " must be smaller than T=" << n;
        throw ArgumentError(msg.str());
    }
    const auto [mean, sxx] = center(x);
    // Slope row of (X'X)^-1 for X = [1, x]: (-mean / sxx, 1 / sxx).
    // The slope variance a' S a reduces to sums over q_t = e_t (a0 + a1 x_t).
    std::vector<double> q(n);
    for (std::size_t t = 0; t < n; ++t) q[t] = residuals[t] * (x[t] - mean) / sxx;

    double var = 0.0;
    for (double v : q) var += v * v;
    for (std::size_t l = 1; l <= lag; ++l) {
        const double weight = 1.0 - static_cast<double>(l) / static_cast<double>(lag + 1);
        double cross = 0.0;
        for (std::size_t t = l; t < n; ++t) cross += q[t] * q[t - l];
        var += 2.0 * weight * cross;
    }
    return std::sqrt(std::max(var, 0.0));
}

double white_se(std::span<const double> x, std::span<const double> residuals) {
    return newey_west_se(x, residuals, 0);
}

std::size_t newey_west_auto_lag(std::size_t n_obs) {
    return static_cast<std::size_t>(
        std::floor(4.0 * std::pow(static_cast<double>(n_obs) / 100.0, 2.0 / 9.0)));
}

double two_sided_p_value(double t, double df) {
    if (std::isnan(t)) return 1.0;
    if (std::isinf(t)) return 0.0;
    const boost::math::students_t dist(df);
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

DiffRegressionResult fit_diff_regression(std::span<const double> x, std::span<const double> y,
                                         const DiffRegressionOptions& options) {
    if (x.size() != y.size()) throw ArgumentError("fit_diff_regression: x and y differ in length");
    if (x.size() < 4) throw ArgumentError("fit_diff_regression: needs at least 4 raw observations");

    const std::size_t transitions = x.size() - 1;
    std::vector<bool> keep(transitions, true);
    for (std::size_t k : options.excluded_transitions) {
        if (k >= transitions) {
            throw ArgumentError("excluded transition " + std::to_string(k) + " out of range (" +
                                std::to_string(transitions) + " transitions)");
        }
        keep[k] = false;
    }
    std::vector<double> dx, dy;
    dx.reserve(transitions);
    dy.reserve(transitions);
    for (std::size_t k = 0; k < transitions; ++k) {
        if (!keep[k]) continue;
        dx.push_back(x[k + 1] - x[k]);
        dy.push_back(y[k + 1] - y[k]);
    }
    const std::size_t n_obs = dx.size();
    if (n_obs < 3) throw ArgumentError("fit_diff_regression: fewer than 3 differenced observations");
    const std::size_t lag = options.lag.value_or(newey_west_auto_lag(n_obs));
    if (lag >= n_obs) {
        throw ArgumentError("lag " + std::to_string(lag) + " must be smaller than T=" +
                            std::to_string(n_obs));
    }

    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    OlsFit ols;
    try {
        ols = ols_fit(dx, dy);
    } catch (const DegenerateRegressorError&) {
        return {nan, nan, nan, nan, 1.0, n_obs, lag, false};
    }
    const double se = newey_west_se(dx, ols.residuals, lag);
    double t;
    if (se > 0.0) {
        t = ols.beta_hat / se;
    } else if (ols.beta_hat != 0.0) {
        t = std::copysign(std::numeric_limits<double>::infinity(), ols.beta_hat);
    } else {
        t = 0.0;
    }
    const double p = two_sided_p_value(t, static_cast<double>(n_obs - 2));
    return {ols.beta_hat, ols.alpha_hat, se, t, p, n_obs, lag, true};
}

DiffRegressionResult fit_diff_regression(const Series& x, const Series& y,
                                         const DiffRegressionOptions& options) {
    return fit_diff_regression(std::span<const double>(x.values), std::span<const double>(y.values),
                               options);
}

}  // namespace biasamp
