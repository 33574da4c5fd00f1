#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace biasamp {

struct Series {
    std::vector<double> values;
    std::string label;

    std::size_t size() const noexcept { return values.size(); }
};

struct OlsFit {
    double alpha_hat;
    double beta_hat;
    std::vector<double> residuals;
};

struct DiffRegressionResult {
    double beta_hat;
    double alpha_hat;
    double se_nw;
    double t_stat;
    double p_value;
    std::size_t n_obs;  ///< differenced observations used
    std::size_t lag_used;
    bool testable;  ///< false for a degenerate regressor (p reported as 1)
};

Series first_difference(const Series& s);

/// Intercept-plus-slope least squares. Throws DegenerateRegressorError when dx
/// has no variance.
OlsFit ols_fit(std::span<const double> dx, std::span<const double> dy);
OlsFit ols_fit(const Series& dx, const Series& dy);

/// Bartlett-kernel HAC standard error of the slope in y = a + b x + e.
double newey_west_se(std::span<const double> x, std::span<const double> residuals, std::size_t lag);

/// Heteroskedasticity-only (HC0) special case of newey_west_se.
double white_se(std::span<const double> x, std::span<const double> residuals);

/// floor(4 (T / 100)^(2/9)).
std::size_t newey_west_auto_lag(std::size_t n_obs);

/// Two-sided p-value of t under Student-t with df degrees of freedom.
double two_sided_p_value(double t, double df);

struct DiffRegressionOptions {
    std::optional<std::size_t> lag;  ///< empty -> automatic
    /// Transition indices to drop after differencing (transition k joins raw
    /// points k and k + 1).
    std::vector<std::size_t> excluded_transitions;
};

/// Difference both series, regress dy on dx, and test the slope with a
/// Newey-West standard error and Student-t (T - 2 df) reference.
DiffRegressionResult fit_diff_regression(std::span<const double> x, std::span<const double> y,
                                         const DiffRegressionOptions& options = {});
DiffRegressionResult fit_diff_regression(const Series& x, const Series& y,
                                         const DiffRegressionOptions& options = {});

}  // namespace biasamp
