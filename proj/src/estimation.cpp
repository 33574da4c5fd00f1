#include "biasamp/estimation.hpp"

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "biasamp/errors.hpp"

namespace biasamp {

WeightVector::WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
    bool any_positive = false;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        const double w = weights_[i];
        if (!std::isfinite(w) || w < 0.0) {
            std::ostringstream msg;
            msg << "WeightVector: weight " << i << " is " << w << " (must be finite and >= 0)";
            throw ArgumentError(msg.str());
        }
        any_positive = any_positive || w > 0.0;
    }
    if (!any_positive) throw ArgumentError("WeightVector: all weights are zero");
}

WeightVector WeightVector::uniform(std::size_t n) {
    if (n == 0) throw ArgumentError("WeightVector: empty");
    return WeightVector(std::vector<double>(n, 1.0), true);
}

double WeightVector::sum() const noexcept {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
}

WeightVector WeightVector::normalized() const {
    if (normalized_) return *this;
    const bool all_equal = std::all_of(weights_.begin(), weights_.end(),
                                       [&](double w) { return w == weights_.front(); });
    if (all_equal) return WeightVector(std::vector<double>(weights_.size(), 1.0), true);
    const double mean = sum() / static_cast<double>(weights_.size());
    std::vector<double> out(weights_.size());
    std::transform(weights_.begin(), weights_.end(), out.begin(), [mean](double w) { return w / mean; });
    return WeightVector(std::move(out), true);
}

namespace {

void check_lengths(const Dataset& data, const WeightVector& w) {
    if (data.size() != w.size()) {
        std::ostringstream msg;
        msg << "weights have length " << w.size() << " but dataset has " << data.size();
        throw ArgumentError(msg.str());
    }
}

// Degenerate when fewer than two distinct values carry positive weight.
void check_spread(const Dataset& data, const WeightVector& w) {
    if (data.size() < 2) throw DegenerateDataError("fit requires at least two values");
    const auto x = data.values();
    const auto wt = w.weights();
    double first = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (wt[i] <= 0.0) continue;
        if (std::isnan(first)) {
            first = x[i];
        } else if (x[i] != first) {
            return;
        }
    }
    throw DegenerateDataError("all positively weighted values are equal; the fit is degenerate");
}

double log_beta_fn(double a, double b) {
    return boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(a + b);
}

// Mean weighted log-likelihood from the sufficient statistics
// s1 = E_w[log x], s2 = E_w[log(1 - x)].
double mean_loglik(double a, double b, double s1, double s2) {
    return (a - 1.0) * s1 + (b - 1.0) * s2 - log_beta_fn(a, b);
}

// Derivative of the mean log-likelihood along (da, db) in log-parameter space.
double directional_derivative(double la, double lb, double da, double db, double s1, double s2) {
    const double a = std::exp(la), b = std::exp(lb);
    const double psi_s = boost::math::digamma(a + b);
    return da * a * (s1 - boost::math::digamma(a) + psi_s) + db * b * (s2 - boost::math::digamma(b) + psi_s);
}

// Absolute rounding floor of mean_loglik at (a, b).
double loglik_noise(double a, double b, double s1, double s2) {
    const double scale = std::abs((a - 1.0) * s1) + std::abs((b - 1.0) * s2) + std::abs(boost::math::lgamma(a)) +
                         std::abs(boost::math::lgamma(b)) + std::abs(boost::math::lgamma(a + b));
    return 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale);
}

}  // namespace

double weighted_log_likelihood(const BetaParams& params, const Dataset& data, const WeightVector& w) {
    check_lengths(data, w);
    const auto x = data.values();
    const auto wt = w.weights();
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (wt[i] != 0.0) total += wt[i] * beta_log_pdf(params, x[i]);
    }
    return total;
}

BetaParams weighted_method_of_moments(const Dataset& data, const WeightVector& w) {
    check_lengths(data, w);
    const auto x = data.values();
    const auto wt = w.weights();
    const double total = w.sum();
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m += wt[i] * x[i];
    m /= total;
    double v = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) v += wt[i] * (x[i] - m) * (x[i] - m);
    v /= total;
    if (!(v > 0.0)) throw DegenerateDataError("weighted variance is zero; moments are degenerate");
    const double common = m * (1.0 - m) / v - 1.0;
    return BetaParams(std::max(m * common, 0.01), std::max((1.0 - m) * common, 0.01));
}

FitResult fit_mle(const Dataset& data, const FitOptions& options) {
    return fit_wmle(data, WeightVector::uniform(data.size()), options);
}

FitResult fit_wmle(const Dataset& data, const WeightVector& w, const FitOptions& options) {
    check_lengths(data, w);
    check_spread(data, w);
    const WeightVector wn = w.normalized();
    const BetaParams start = weighted_method_of_moments(data, wn);

    const auto x = data.values();
    const auto wt = wn.weights();
    double total = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (wt[i] == 0.0) continue;
        total += wt[i];
        s1 += wt[i] * std::log(x[i]);
        s2 += wt[i] * std::log1p(-x[i]);
    }
    s1 /= total;
    s2 /= total;

    // Newton ascent on (log alpha, log beta) with backtracking.
    double la = std::log(start.alpha());
    double lb = std::log(start.beta());
    double obj = mean_loglik(start.alpha(), start.beta(), s1, s2);

    FitResult result{start, 0.0, 0, false, std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity(), {}};
    if (options.record_trace) result.loglik_trace.push_back(obj);

    constexpr double kMaxLogStep = 5.0;
    constexpr int kMaxHalvings = 60;
    double prev_step = std::numeric_limits<double>::infinity();
    double gnorm = std::numeric_limits<double>::infinity();

    for (;;) {
        const double a = std::exp(la);
        const double b = std::exp(lb);
        const double psi_s = boost::math::digamma(a + b);
        const double ga = a * (s1 - boost::math::digamma(a) + psi_s);
        const double gb = b * (s2 - boost::math::digamma(b) + psi_s);
        gnorm = std::hypot(ga, gb);

        if (gnorm <= options.tol_grad && prev_step <= options.tol_step) {
            result.converged = true;
            break;
        }
        if (result.iterations >= options.max_iters) break;

        // Expected-information part of the log-scale Hessian is always
        // negative definite; the gradient term is added only when the full
        // Hessian stays negative definite.
        const double tri_s = boost::math::trigamma(a + b);
        const double faa = a * a * (boost::math::trigamma(a) - tri_s);
        const double fbb = b * b * (boost::math::trigamma(b) - tri_s);
        const double fab = -a * b * tri_s;
        double haa = -faa + ga, hbb = -fbb + gb;
        const double hab = -fab;
        if (!(haa < 0.0 && haa * hbb - hab * hab > 0.0)) {
            haa = -faa;
            hbb = -fbb;
        }
        const double det = haa * hbb - hab * hab;
        double da = -(hbb * ga - hab * gb) / det;
        double db = -(-hab * ga + haa * gb) / det;
        const double len = std::max(std::abs(da), std::abs(db));
        if (len > kMaxLogStep) {
            da *= kMaxLogStep / len;
            db *= kMaxLogStep / len;
        }

        double t = 1.0;
        double new_obj = obj;
        bool accepted = false;
        for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
            new_obj = mean_loglik(std::exp(la + t * da), std::exp(lb + t * db), s1, s2);
            if (!std::isfinite(new_obj)) continue;
            if (new_obj >= obj) {
                accepted = true;
                break;
            }
            // Close to the optimum the gain (about g'H^-1 g / 2) drops below the
            // rounding floor of the objective and the comparison above is noise.
            // Fall back on the slope: if the trial point has not passed the
            // maximum along the line, the true objective did not decrease.
            if (obj - new_obj <= loglik_noise(a, b, s1, s2) &&
                directional_derivative(la + t * da, lb + t * db, da, db, s1, s2) >= 0.0) {
                new_obj = obj;
                accepted = true;
                break;
            }
        }
        ++result.iterations;
        if (!accepted) {
            // No non-decreasing point along the direction: the objective is
            // flat to rounding here, so stop and judge on the gradient alone.
            prev_step = 0.0;
            result.converged = gnorm <= options.tol_grad;
            if (options.record_trace) result.loglik_trace.push_back(obj);
            break;
        }
        la += t * da;
        lb += t * db;
        obj = new_obj;
        prev_step = t * std::max(std::abs(da), std::abs(db));
        if (options.record_trace) result.loglik_trace.push_back(obj);
    }

    result.params = BetaParams(std::exp(la), std::exp(lb));
    result.gradient_norm_at_exit = gnorm;
    result.last_step = prev_step;
    result.weighted_loglik = w.sum() * obj;
    return result;
}

}  // namespace biasamp
