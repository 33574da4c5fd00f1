#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "biasamp/hac_regression.hpp"

namespace biasamp {

/// Outcome and signal series over a common, strictly ascending version index.
class TrajectoryMatrix {
public:
    explicit TrajectoryMatrix(std::vector<std::int64_t> version_ids);

    void add_outcome(Series s);
    void add_signal(Series s);
    void set_excluded_transitions(std::vector<std::size_t> transitions);

    const std::vector<std::int64_t>& version_ids() const noexcept { return versions_; }
    const std::vector<Series>& outcomes() const noexcept { return outcomes_; }
    const std::vector<Series>& signals() const noexcept { return signals_; }
    const std::vector<std::size_t>& excluded_transitions() const noexcept { return excluded_; }

    const Series* find_outcome(const std::string& name) const;
    std::vector<std::string> outcome_names() const;

private:
    void check_new(const Series& s, const char* kind) const;

    std::vector<std::int64_t> versions_;
    std::vector<Series> outcomes_;
    std::vector<Series> signals_;
    std::unordered_map<std::string, std::size_t> outcome_index_;
    std::unordered_map<std::string, std::size_t> signal_index_;
    std::vector<std::size_t> excluded_;
};

/// Parses `version,y:<outcome>...,x:<signal>...` CSV. Errors carry the
/// 1-based line and column of the offending cell.
TrajectoryMatrix parse_trajectories(std::istream& in);
TrajectoryMatrix load_trajectories(const std::filesystem::path& path);
void write_trajectories(std::ostream& out, const TrajectoryMatrix& m);

/// Sidecar listing excluded transition indices, one per line; '#' starts a comment.
std::vector<std::size_t> parse_transition_mask(std::istream& in);
std::vector<std::size_t> load_transition_mask(const std::filesystem::path& path);

struct SignalResult {
    std::string signal;
    DiffRegressionResult result;
};

struct AnalysisResults {
    std::string outcome;
    std::vector<SignalResult> entries;  ///< matrix column order
};

/// One differenced regression per signal against `outcome`. threads == 0
/// picks hardware concurrency; the output never depends on it.
AnalysisResults analyze_all(const TrajectoryMatrix& m, const std::string& outcome,
                            std::optional<std::size_t> lag = std::nullopt, std::size_t threads = 0);

/// Testable signals with p < threshold, threshold in (0, 1].
std::set<std::string> significant_set(const AnalysisResults& results, double threshold = 0.05);

/// Benjamini-Hochberg step-up set at false discovery rate q over testable signals.
std::set<std::string> significant_set_bh(const AnalysisResults& results, double q = 0.05);

struct OverlapReport {
    std::set<std::string> intersection;
    std::size_t size_a = 0;
    std::size_t size_b = 0;
    std::size_t size_intersection = 0;
    std::size_t size_union = 0;
    std::size_t universe_size = 0;
    double jaccard = 0.0;
    /// P(X >= |A n B|) for X hypergeometric: |B| draws from a universe
    /// holding |A| marked items.
    double hypergeometric_tail = 1.0;
};

OverlapReport overlap_report(const std::set<std::string>& a, const std::set<std::string>& b,
                             std::size_t universe_size);

/// P(X >= k), X ~ Hypergeometric(successes, draws, population).
double hypergeometric_upper_tail(std::size_t k, std::size_t successes, std::size_t draws,
                                 std::size_t population);

struct OutcomeSignificance {
    std::string outcome;
    std::size_t n_testable = 0;
    std::set<std::string> significant;
    const AnalysisResults* results = nullptr;
};

struct SignificanceReport {
    double threshold = 0.05;
    bool bh_correction = false;
    std::size_t universe_size = 0;
    std::vector<OutcomeSignificance> outcomes;
    std::optional<OverlapReport> overlap;  ///< present when exactly two outcomes are compared
};

SignificanceReport build_significance_report(const std::vector<AnalysisResults>& analyses,
                                             double threshold, bool bh_correction, bool compare);

void write_results_csv(std::ostream& out, const AnalysisResults& results);
void write_report_json(std::ostream& out, const SignificanceReport& report);

}  // namespace biasamp
