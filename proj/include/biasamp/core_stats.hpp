#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biasamp/rng.hpp"

namespace biasamp {

/// Boundary clamp applied to every value entering a Dataset.
inline constexpr double kClampEps = 1e-9;

/// Shape parameters of a Beta distribution; both strictly positive.
class BetaParams {
public:
    BetaParams(double alpha, double beta);

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double mean() const noexcept { return alpha_ / (alpha_ + beta_); }
    double concentration() const noexcept { return alpha_ + beta_; }

    friend bool operator==(const BetaParams&, const BetaParams&) = default;

private:
    double alpha_;
    double beta_;
};

struct BetaMoments {
    double mean;
    double variance;
    std::optional<double> mode;  ///< empty unless alpha > 1 and beta > 1
};

/// Where a value came from. Per-value origin survives dataset mixing so the
/// composition of any training set can be counted exactly.
enum class Origin : std::uint8_t { real, synthetic };

/// Immutable ordered sample on [eps, 1 - eps].
class Dataset {
public:
    Dataset() = default;

    /// Values in [0, 1] are clamped to [eps, 1 - eps]; anything else
    /// (including NaN) raises DomainError. Every value takes `origin`.
    Dataset(std::vector<double> values, std::string provenance, Origin origin);

    /// Mixed construction: `origins` must have the same length as `values`.
    Dataset(std::vector<double> values, std::vector<Origin> origins, std::string provenance);

    std::span<const double> values() const noexcept { return values_; }
    std::span<const Origin> origins() const noexcept { return origins_; }
    const std::string& provenance() const noexcept { return provenance_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    std::size_t count(Origin o) const noexcept;

    /// One value per line with a "# provenance=<tag>" header, 17 significant digits.
    void write(std::ostream& out) const;

    /// Reads the format produced by write(). The header is optional and
    /// defaults to "real". Per-value origin follows the tag ("real" -> real,
    /// anything else -> synthetic).
    static Dataset read(std::istream& in);

private:
    std::vector<double> values_;
    std::vector<Origin> origins_;
    std::string provenance_;
};

double beta_pdf(const BetaParams& params, double x);
double beta_log_pdf(const BetaParams& params, double x);
BetaMoments beta_moments(const BetaParams& params);

/// n draws as X / (X + Y) with X ~ Gamma(alpha), Y ~ Gamma(beta), clamped.
Dataset sample_beta(const BetaParams& params, std::size_t n, const SeedSpec& seed,
                    std::string provenance = "synthetic");
Dataset sample_beta(const BetaParams& params, std::size_t n, Rng& rng,
                    std::string provenance = "synthetic");

inline double clamp_unit(double x) noexcept {
    return x < kClampEps ? kClampEps : (x > 1.0 - kClampEps ? 1.0 - kClampEps : x);
}

}  // namespace biasamp
