#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace biasamp {

/// Names one reproducible random stream: a master seed plus a label such as
/// "sim/rep_3/synth/gen_7". Streams with different labels are independent;
/// the same (seed, label) pair always produces the same draws.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::string stream_label;

    /// Child stream "<label>/<suffix>".
    SeedSpec derive(std::string_view suffix) const;

    /// 64-bit engine seed for this stream.
    std::uint64_t stream_seed() const noexcept;

    friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Portable generator. Only the fully specified mt19937_64 engine is used
/// from <random>; all variate transforms are implemented here so draws are
/// identical across standard library implementations.
class Rng {
public:
    explicit Rng(const SeedSpec& seed) : engine_(seed.stream_seed()) {}
    explicit Rng(std::uint64_t raw_seed) : engine_(raw_seed) {}

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform_open();

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t uniform_index(std::uint64_t bound);

    double standard_normal();

    /// log of a Gamma(shape, 1) variate. Working in log space keeps small
    /// shapes from underflowing to zero.
    double log_gamma_variate(double shape);

    double gamma_variate(double shape);

private:
    std::mt19937_64 engine_;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

}  // namespace biasamp
