#pragma once

#include <array>
#include <iosfwd>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biasamp/core_stats.hpp"
#include "biasamp/errors.hpp"
#include "biasamp/estimation.hpp"

namespace biasamp {

enum class FitMode { wmle, mle };
enum class Mitigation { none, preservation, accumulation };

std::string_view to_string(FitMode mode) noexcept;
std::string_view to_string(Mitigation mitigation) noexcept;
FitMode parse_fit_mode(std::string_view text);
Mitigation parse_mitigation(std::string_view text);

struct SimConfig {
    BetaParams pretrain_params{3.0, 2.0};
    BetaParams target_params{2.0, 2.0};
    std::size_t n_samples = 100000;
    std::size_t generations = 10;
    FitMode mode = FitMode::wmle;
    Mitigation mitigation = Mitigation::none;
    /// Fraction of each synthetic set replaced by real values; only read
    /// when mitigation == preservation.
    double preserve_fraction = 0.10;
    SeedSpec seed{42, "sim"};
    FitOptions fit_options{};

    /// Throws ArgumentError on an invalid combination.
    void validate() const;
};

struct GenerationRecord {
    int gen_index;  ///< -1 is the pretrained model, 0 the first fine-tune
    BetaParams fitted;
    double fitted_mean;
    double fitted_concentration;
    std::size_t dataset_size;
    std::size_t n_real;
    std::size_t n_synth;
    std::size_t fit_iterations;
};

struct SimTrace {
    SimConfig config;
    std::vector<GenerationRecord> records;  ///< f_pre, f_0 ... f_G

    /// Rows of (alpha, beta, mean, concentration), one per record.
    std::vector<std::array<double, 4>> trajectory() const;

    /// Record for generation k (k = -1 for the pretrained model).
    const GenerationRecord& generation(int k) const;
};

/// A fit failure inside the loop, with the trace up to the failing generation.
class SimulationError : public NumericError {
public:
    SimulationError(const std::string& what, int generation, SimTrace partial)
        : NumericError(what), generation_(generation), partial_(std::move(partial)) {}

    int generation() const noexcept { return generation_; }
    const SimTrace& partial_trace() const noexcept { return partial_; }

private:
    int generation_;
    SimTrace partial_;
};

/// Builds the next training set from the latest synthetic draw.
///   none:         prev_synth unchanged
///   preservation: round(preserve_fraction * |prev_synth|) distinct positions of
///                 prev_synth are overwritten by values drawn without
///                 replacement from `real` (with replacement if `real` is
///                 smaller than the replacement count)
///   accumulation: concatenation of `history` followed by prev_synth
Dataset compose_training_set(const Dataset& prev_synth, const Dataset& real,
                             std::span<const Dataset> history, Mitigation mitigation,
                             double preserve_fraction, const SeedSpec& seed);

SimTrace run_sim(const SimConfig& config);

struct GenerationDispersion {
    int gen_index;
    double mean_of_means;
    double sd_of_means;  ///< sample standard deviation across replications
};

struct CollapseEnsemble {
    std::vector<SimTrace> traces;                  ///< by replication index
    std::vector<GenerationDispersion> dispersion;  ///< generations 0 ... G
};

/// Replicated finite-sample runs in mle mode. Replication r uses the seed
/// stream "<label>/rep_<r>", so results do not depend on `threads`.
CollapseEnsemble run_collapse_sim(const SimConfig& config, std::size_t replications,
                                  std::size_t threads = 0);

/// gen,alpha,beta,mean,concentration,n_real,n_synth; gen is -1 for f_pre.
void write_trace_csv(std::ostream& out, const SimTrace& trace);

inline constexpr std::size_t kPdfGridPoints = 512;

/// x,density on the midpoints (i + 0.5) / 512.
void write_pdf_grid_csv(std::ostream& out, const BetaParams& params);

/// gen,mean_of_means,sd_of_means,replications
void write_dispersion_csv(std::ostream& out, const CollapseEnsemble& ensemble);

}  // namespace biasamp
