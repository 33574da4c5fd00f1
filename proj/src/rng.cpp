#include "biasamp/rng.hpp"

#include <cmath>
#include <limits>

#include "biasamp/errors.hpp"

namespace biasamp {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

SeedSpec SeedSpec::derive(std::string_view suffix) const {
    SeedSpec child{master_seed, stream_label};
    if (!child.stream_label.empty()) child.stream_label += '/';
    child.stream_label += suffix;
    return child;
}

std::uint64_t SeedSpec::stream_seed() const noexcept {
    return splitmix64(master_seed ^ splitmix64(fnv1a64(stream_label)));
}

double Rng::uniform_open() {
    // (k + 0.5) / 2^53 for k in [0, 2^53): never 0, never 1.
    const std::uint64_t k = engine_() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_index(std::uint64_t bound) {
    if (bound == 0) throw ArgumentError("uniform_index: bound must be positive");
    // Rejection sampling removes modulo bias.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
        r = engine_();
    } while (r >= limit);
    return r % bound;
}

double Rng::standard_normal() {
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    // Marsaglia polar method.
    double u, v, s;
    do {
        u = 2.0 * uniform_open() - 1.0;
        v = 2.0 * uniform_open() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * factor;
    has_spare_normal_ = true;
    return u * factor;
}

double Rng::log_gamma_variate(double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw ArgumentError("gamma variate: shape must be positive and finite");
    }
    if (shape < 1.0) {
        // Gamma(a) = Gamma(a + 1) * U^(1/a).
        return log_gamma_variate(shape + 1.0) + std::log(uniform_open()) / shape;
    }
    // Marsaglia & Tsang (2000).
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = standard_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
    }
}

double Rng::gamma_variate(double shape) { return std::exp(log_gamma_variate(shape)); }

}  // namespace biasamp
