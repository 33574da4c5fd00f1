#include "biasamp/core_stats.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "biasamp/errors.hpp"

namespace biasamp {

BetaParams::BetaParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
        std::ostringstream msg;
        msg << "BetaParams: shapes must be positive and finite (alpha=" << alpha
            << ", beta=" << beta << ")";
        throw ArgumentError(msg.str());
    }
}

namespace {

double ingest(double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream msg;
        msg << "Dataset: value " << v << " outside [0, 1]";
        throw DomainError(msg.str());
    }
    return clamp_unit(v);
}

void check_support(double x, const char* who) {
    if (!(x > 0.0 && x < 1.0)) {
        std::ostringstream msg;
        msg << who << ": x=" << x << " outside (0, 1)";
        throw DomainError(msg.str());
    }
}

}  // namespace

Dataset::Dataset(std::vector<double> values, std::string provenance, Origin origin)
    : values_(std::move(values)), origins_(values_.size(), origin), provenance_(std::move(provenance)) {
    for (double& v : values_) v = ingest(v);
}

Dataset::Dataset(std::vector<double> values, std::vector<Origin> origins, std::string provenance)
    : values_(std::move(values)), origins_(std::move(origins)), provenance_(std::move(provenance)) {
    if (origins_.size() != values_.size()) {
        throw ArgumentError("Dataset: origins and values differ in length");
    }
    for (double& v : values_) v = ingest(v);
}

std::size_t Dataset::count(Origin o) const noexcept {
    std::size_t n = 0;
    for (Origin x : origins_) n += (x == o);
    return n;
}

void Dataset::write(std::ostream& out) const {
    out << "# provenance=" << provenance_ << '\n';
    char buf[32];
    for (double v : values_) {
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
        out.write(buf, end - buf);
        out.put('\n');
    }
}

Dataset Dataset::read(std::istream& in) {
    std::string provenance = "real";
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            constexpr std::string_view key = "# provenance=";
            if (line_no == 1 && line.starts_with(key)) provenance = line.substr(key.size());
            continue;
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc{} || ptr != line.data() + line.size()) {
            throw SchemaError("dataset: unparsable value '" + line + "' at line " +
                                  std::to_string(line_no),
                              line_no, 1);
        }
        values.push_back(v);
    }
    const Origin origin = provenance == "real" ? Origin::real : Origin::synthetic;
    return Dataset(std::move(values), std::move(provenance), origin);
}

double beta_pdf(const BetaParams& params, double x) {
    check_support(x, "beta_pdf");
    return boost::math::ibeta_derivative(params.alpha(), params.beta(), x);
}

double beta_log_pdf(const BetaParams& params, double x) {
    check_support(x, "beta_log_pdf");
    const double a = params.alpha();
    const double b = params.beta();
    const double log_beta_fn =
        boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(a + b);
    return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta_fn;
}

BetaMoments beta_moments(const BetaParams& params) {
    const double a = params.alpha();
    const double b = params.beta();
    const double s = a + b;
    BetaMoments m{a / s, a * b / (s * s * (s + 1.0)), std::nullopt};
    if (a > 1.0 && b > 1.0) m.mode = (a - 1.0) / (s - 2.0);
    return m;
}

Dataset sample_beta(const BetaParams& params, std::size_t n, Rng& rng, std::string provenance) {
    if (n == 0) throw ArgumentError("sample_beta: n must be at least 1");
    std::vector<double> values(n);
    for (double& v : values) {
        const double log_x = rng.log_gamma_variate(params.alpha());
        const double log_y = rng.log_gamma_variate(params.beta());
        // X / (X + Y) = 1 / (1 + exp(log Y - log X))
        v = clamp_unit(1.0 / (1.0 + std::exp(log_y - log_x)));
    }
    const Origin origin = provenance == "real" ? Origin::real : Origin::synthetic;
    return Dataset(std::move(values), std::move(provenance), origin);
}

Dataset sample_beta(const BetaParams& params, std::size_t n, const SeedSpec& seed,
                    std::string provenance) {
    Rng rng(seed);
    return sample_beta(params, n, rng, std::move(provenance));
}

}  // namespace biasamp
