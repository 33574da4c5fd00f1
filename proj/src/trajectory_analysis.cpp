#include "biasamp/trajectory_analysis.hpp"

#include <algorithm>
#include <boost/math/distributions/hypergeometric.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string_view>
#include <thread>

#include "biasamp/errors.hpp"

namespace biasamp {

TrajectoryMatrix::TrajectoryMatrix(std::vector<std::int64_t> version_ids) : versions_(std::move(version_ids)) {
    for (std::size_t i = 1; i < versions_.size(); ++i) {
        if (versions_[i] <= versions_[i - 1]) {
            throw DataError("version ids must be strictly ascending (index " + std::to_string(i) + ")");
        }
    }
}

void TrajectoryMatrix::check_new(const Series& s, const char* kind) const {
    if (s.size() != versions_.size()) {
        std::ostringstream msg;
        msg << kind << " '" << s.label << "' has " << s.size() << " values but there are "
            << versions_.size() << " versions";
        throw DataError(msg.str());
    }
    if (s.label.empty()) throw DataError(std::string(kind) + " with empty name");
}

void TrajectoryMatrix::add_outcome(Series s) {
    check_new(s, "outcome");
    if (outcome_index_.contains(s.label)) throw DataError("duplicate outcome '" + s.label + "'");
    outcome_index_.emplace(s.label, outcomes_.size());
    outcomes_.push_back(std::move(s));
}

void TrajectoryMatrix::add_signal(Series s) {
    check_new(s, "signal");
    if (signal_index_.contains(s.label)) throw DataError("duplicate signal '" + s.label + "'");
    signal_index_.emplace(s.label, signals_.size());
    signals_.push_back(std::move(s));
}

void TrajectoryMatrix::set_excluded_transitions(std::vector<std::size_t> transitions) {
    const std::size_t count = versions_.empty() ? 0 : versions_.size() - 1;
    std::sort(transitions.begin(), transitions.end());
    transitions.erase(std::unique(transitions.begin(), transitions.end()), transitions.end());
    for (std::size_t k : transitions) {
        if (k >= count) {
            throw DataError("excluded transition " + std::to_string(k) + " out of range (matrix has " +
                            std::to_string(count) + " transitions)");
        }
    }
    excluded_ = std::move(transitions);
}

const Series* TrajectoryMatrix::find_outcome(const std::string& name) const {
    const auto it = outcome_index_.find(name);
    return it == outcome_index_.end() ? nullptr : &outcomes_[it->second];
}

std::vector<std::string> TrajectoryMatrix::outcome_names() const {
    std::vector<std::string> names;
    for (const auto& o : outcomes_) names.push_back(o.label);
    return names;
}

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void schema_fail(const std::string& what, std::size_t row, std::size_t col) {
    std::ostringstream msg;
    msg << "trajectories: " << what << " (line " << row;
    if (col > 0) msg << ", column " << col;
    msg << ")";
    throw SchemaError(msg.str(), row, col);
}

template <class T>
bool parse_number(std::string_view cell, T& out) {
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc{} && ptr == cell.data() + cell.size();
}

}  // namespace

TrajectoryMatrix parse_trajectories(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) schema_fail("empty file", 1, 0);
    ++line_no;

    const auto header = split_csv_line(line);
    if (trim(header[0]) != "version") schema_fail("first column must be 'version'", 1, 1);

    enum class Kind { outcome, signal };
    std::vector<Kind> kinds;
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const auto cell = trim(header[c]);
        if (!seen.insert(std::string(cell)).second) {
            schema_fail("duplicate column '" + std::string(cell) + "'", 1, c + 1);
        }
        if (cell.starts_with("y:")) {
            kinds.push_back(Kind::outcome);
        } else if (cell.starts_with("x:")) {
            kinds.push_back(Kind::signal);
        } else {
            schema_fail("column '" + std::string(cell) + "' must start with 'y:' or 'x:'", 1, c + 1);
        }
        if (cell.size() == 2) schema_fail("empty column name", 1, c + 1);
        names.emplace_back(cell.substr(2));
    }

    std::vector<std::int64_t> versions;
    std::vector<std::vector<double>> columns(names.size());
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            schema_fail("expected " + std::to_string(header.size()) + " fields, found " +
                            std::to_string(cells.size()),
                        line_no, 0);
        }
        std::int64_t version = 0;
        if (!parse_number(trim(cells[0]), version)) {
            schema_fail("version '" + std::string(trim(cells[0])) + "' is not an integer", line_no, 1);
        }
        if (!versions.empty() && version <= versions.back()) {
            schema_fail("version " + std::to_string(version) + " does not increase on previous " +
                            std::to_string(versions.back()),
                        line_no, 1);
        }
        versions.push_back(version);
        for (std::size_t c = 0; c < names.size(); ++c) {
            const auto cell = trim(cells[c + 1]);
            double v = 0.0;
            if (!parse_number(cell, v) || !std::isfinite(v)) {
                schema_fail("value '" + std::string(cell) + "' is not a finite number", line_no, c + 2);
            }
            columns[c].push_back(v);
        }
    }
    if (versions.empty()) schema_fail("no data rows", line_no, 0);

    TrajectoryMatrix m(std::move(versions));
    for (std::size_t c = 0; c < names.size(); ++c) {
        Series s{std::move(columns[c]), names[c]};
        if (kinds[c] == Kind::outcome) {
            m.add_outcome(std::move(s));
        } else {
            m.add_signal(std::move(s));
        }
    }
    return m;
}

TrajectoryMatrix load_trajectories(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open trajectories file " + path.string());
    return parse_trajectories(in);
}

void write_trajectories(std::ostream& out, const TrajectoryMatrix& m) {
    out << "version";
    for (const auto& o : m.outcomes()) out << ",y:" << o.label;
    for (const auto& s : m.signals()) out << ",x:" << s.label;
    out << '\n';
    char buf[32];
    auto put = [&](double v) {
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
        out << ',';
        out.write(buf, end - buf);
    };
    for (std::size_t i = 0; i < m.version_ids().size(); ++i) {
        out << m.version_ids()[i];
        for (const auto& o : m.outcomes()) put(o.values[i]);
        for (const auto& s : m.signals()) put(s.values[i]);
        out << '\n';
    }
}

std::vector<std::size_t> parse_transition_mask(std::istream& in) {
    std::vector<std::size_t> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        std::size_t k = 0;
        if (!parse_number(view, k)) {
            throw SchemaError("mask: '" + std::string(view) + "' is not a transition index (line " +
                                  std::to_string(line_no) + ")",
                              line_no, 1);
        }
        out.push_back(k);
    }
    return out;
}

std::vector<std::size_t> load_transition_mask(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open mask file " + path.string());
    return parse_transition_mask(in);
}

AnalysisResults analyze_all(const TrajectoryMatrix& m, const std::string& outcome,
                            std::optional<std::size_t> lag, std::size_t threads) {
    const Series* y = m.find_outcome(outcome);
    if (y == nullptr) {
        std::string available;
        for (const auto& name : m.outcome_names()) available += (available.empty() ? "" : ", ") + name;
        throw DataError("unknown outcome '" + outcome + "'; available outcomes: " +
                        (available.empty() ? "(none)" : available));
    }
    DiffRegressionOptions options{lag, m.excluded_transitions()};
    const auto& signals = m.signals();
    AnalysisResults results{outcome, std::vector<SignalResult>(signals.size())};

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            results.entries[j] = SignalResult{signals[j].label, fit_diff_regression(signals[j], *y, options)};
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::max<std::size_t>(1, std::min(threads, signals.size()));
    if (threads == 1) {
        work(0, signals.size());
    } else {
        // Fit errors here are argument errors shared by every signal (series
        // too short, lag too large); check once serially so workers cannot throw.
        if (!signals.empty()) (void)fit_diff_regression(signals[0], *y, options);
        std::vector<std::jthread> pool;
        const std::size_t chunk = (signals.size() + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(signals.size(), begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
    }
    return results;
}

std::set<std::string> significant_set(const AnalysisResults& results, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) throw ArgumentError("threshold must lie in (0, 1]");
    std::set<std::string> out;
    for (const auto& e : results.entries) {
        if (e.result.testable && e.result.p_value < threshold) out.insert(e.signal);
    }
    return out;
}

std::set<std::string> significant_set_bh(const AnalysisResults& results, double q) {
    if (!(q > 0.0 && q <= 1.0)) throw ArgumentError("FDR level must lie in (0, 1]");
    std::vector<const SignalResult*> testable;
    for (const auto& e : results.entries) {
        if (e.result.testable) testable.push_back(&e);
    }
    std::stable_sort(testable.begin(), testable.end(), [](const SignalResult* a, const SignalResult* b) {
        return a->result.p_value < b->result.p_value;
    });
    const double m = static_cast<double>(testable.size());
    std::size_t cutoff = 0;
    for (std::size_t i = 0; i < testable.size(); ++i) {
        if (testable[i]->result.p_value <= static_cast<double>(i + 1) * q / m) cutoff = i + 1;
    }
    std::set<std::string> out;
    for (std::size_t i = 0; i < cutoff; ++i) out.insert(testable[i]->signal);
    return out;
}

double hypergeometric_upper_tail(std::size_t k, std::size_t successes, std::size_t draws,
                                 std::size_t population) {
    if (successes > population || draws > population) {
        throw ArgumentError("hypergeometric: successes and draws must not exceed the population");
    }
    if (k == 0) return 1.0;
    if (k > std::min(successes, draws)) return 0.0;
    // The intersection can never be smaller than a + b - N.
    if (successes + draws >= population + k) return 1.0;
    const boost::math::hypergeometric_distribution<double> dist(
        static_cast<unsigned>(successes), static_cast<unsigned>(draws), static_cast<unsigned>(population));
    return boost::math::cdf(boost::math::complement(dist, static_cast<unsigned>(k - 1)));
}

OverlapReport overlap_report(const std::set<std::string>& a, const std::set<std::string>& b,
                             std::size_t universe_size) {
    OverlapReport r;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::inserter(r.intersection, r.intersection.end()));
    r.size_a = a.size();
    r.size_b = b.size();
    r.size_intersection = r.intersection.size();
    r.size_union = a.size() + b.size() - r.size_intersection;
    r.universe_size = universe_size;
    if (r.size_union > universe_size) {
        throw ArgumentError("overlap_report: sets contain more names than the universe holds");
    }
    r.jaccard = r.size_union == 0 ? 0.0
                                  : static_cast<double>(r.size_intersection) / static_cast<double>(r.size_union);
    r.hypergeometric_tail = hypergeometric_upper_tail(r.size_intersection, r.size_a, r.size_b, universe_size);
    return r;
}

SignificanceReport build_significance_report(const std::vector<AnalysisResults>& analyses,
                                             double threshold, bool bh_correction, bool compare) {
    SignificanceReport report;
    report.threshold = threshold;
    report.bh_correction = bh_correction;
    report.universe_size = analyses.empty() ? 0 : analyses.front().entries.size();
    for (const auto& a : analyses) {
        OutcomeSignificance o;
        o.outcome = a.outcome;
        o.results = &a;
        o.n_testable = static_cast<std::size_t>(std::count_if(
            a.entries.begin(), a.entries.end(), [](const SignalResult& e) { return e.result.testable; }));
        o.significant = bh_correction ? significant_set_bh(a, threshold) : significant_set(a, threshold);
        report.outcomes.push_back(std::move(o));
    }
    if (compare) {
        if (report.outcomes.size() != 2) {
            throw ArgumentError("comparison needs exactly two outcomes (got " +
                                std::to_string(report.outcomes.size()) + ")");
        }
        report.overlap = overlap_report(report.outcomes[0].significant, report.outcomes[1].significant,
                                        report.universe_size);
    }
    return report;
}

void write_results_csv(std::ostream& out, const AnalysisResults& results) {
    out << "signal,beta,se,t,p,lag,testable\n";
    char buf[32];
    auto put = [&](double v) {
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
        out.write(buf, end - buf);
        out << ',';
    };
    for (const auto& e : results.entries) {
        out << e.signal << ',';
        put(e.result.beta_hat);
        put(e.result.se_nw);
        put(e.result.t_stat);
        put(e.result.p_value);
        out << e.result.lag_used << ',' << (e.result.testable ? "true" : "false") << '\n';
    }
}

void write_report_json(std::ostream& out, const SignificanceReport& report) {
    using nlohmann::json;
    json doc;
    doc["threshold"] = report.threshold;
    doc["correction"] = report.bh_correction ? "benjamini-hochberg" : "none";
    doc["universe_size"] = report.universe_size;
    doc["outcomes"] = json::array();
    for (const auto& o : report.outcomes) {
        json entry;
        entry["outcome"] = o.outcome;
        entry["n_testable"] = o.n_testable;
        entry["n_significant"] = o.significant.size();
        json sig = json::array();
        for (const auto& e : o.results->entries) {
            if (!o.significant.contains(e.signal)) continue;
            sig.push_back({{"signal", e.signal},
                           {"beta", e.result.beta_hat},
                           {"se", e.result.se_nw},
                           {"t", e.result.t_stat},
                           {"p", e.result.p_value},
                           {"n_obs", e.result.n_obs},
                           {"lag", e.result.lag_used}});
        }
        entry["significant"] = std::move(sig);
        doc["outcomes"].push_back(std::move(entry));
    }
    if (report.overlap) {
        const auto& ov = *report.overlap;
        doc["overlap"] = {{"outcome_a", report.outcomes[0].outcome},
                          {"outcome_b", report.outcomes[1].outcome},
                          {"size_a", ov.size_a},
                          {"size_b", ov.size_b},
                          {"intersection_size", ov.size_intersection},
                          {"union_size", ov.size_union},
                          {"universe_size", ov.universe_size},
                          {"jaccard", ov.jaccard},
                          {"hypergeometric_tail", ov.hypergeometric_tail},
                          {"intersection", ov.intersection}};
    }
    out << doc.dump(2) << '\n';
}

}  // namespace biasamp
