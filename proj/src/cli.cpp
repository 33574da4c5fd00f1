#include "biasamp/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "biasamp/bias_projection.hpp"
#include "biasamp/errors.hpp"
#include "biasamp/generational_sim.hpp"
#include "biasamp/io.hpp"
#include "biasamp/metrics_ingestion.hpp"
#include "biasamp/trajectory_analysis.hpp"

#ifndef BIASAMP_VERSION
#define BIASAMP_VERSION "0.0.0"
#endif

namespace biasamp::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kToolName = "biasamp";

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    std::string config_path;
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        // e.what() carries "line L, column C".
        throw ConfigError("config " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config " + path + ": top level must be a JSON object");
    return doc;
}

// Typed access to one JSON object; finish() rejects keys nobody asked for.
class ConfigReader {
public:
    ConfigReader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
        if (!obj_.is_object()) fail("", "must be an object");
    }

    bool has(const std::string& key) {
        used_.insert(key);
        return obj_.contains(key);
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_number()) fail(key, "must be a number");
        return v.get<double>();
    }

    std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_number_unsigned()) fail(key, "must be a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_string()) fail(key, "must be a string");
        return v.get<std::string>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_boolean()) fail(key, "must be true or false");
        return v.get<bool>();
    }

    std::optional<Vector> vector(const std::string& key) {
        if (!has(key)) return std::nullopt;
        const json& v = obj_.at(key);
        if (!v.is_array() || v.empty()) fail(key, "must be a non-empty array of numbers");
        Vector out(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) fail(key, "must be a non-empty array of numbers");
            out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
        }
        return out;
    }

    std::vector<std::string> strings(const std::string& key) {
        if (!has(key)) return {};
        const json& v = obj_.at(key);
        if (!v.is_array()) fail(key, "must be an array of strings");
        std::vector<std::string> out;
        for (const auto& e : v) {
            if (!e.is_string()) fail(key, "must be an array of strings");
            out.push_back(e.get<std::string>());
        }
        return out;
    }

    std::optional<ConfigReader> object(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return ConfigReader(obj_.at(key), path(key));
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (!used_.contains(key)) fail(key, "is not a recognised setting");
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ConfigError("config: '" + path(key) + "' " + what);
    }

private:
    std::string path(const std::string& key) const {
        if (where_.empty()) return key;
        return key.empty() ? where_ : where_ + "." + key;
    }

    const json& obj_;
    std::string where_;
    std::set<std::string> used_;
};

// Runs a library call, turning ArgumentError into ConfigError.
template <class Fn>
auto as_config(Fn&& fn) {
    try {
        return fn();
    } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
    }
}

BetaParams read_beta(ConfigReader& r, const std::string& key, const BetaParams& fallback) {
    auto sub = r.object(key);
    if (!sub) return fallback;
    const double a = sub->number("alpha", fallback.alpha());
    const double b = sub->number("beta", fallback.beta());
    sub->finish();
    return as_config([&] { return BetaParams(a, b); });
}

// Common simulation keys; `extra` reads command-specific ones.
SimConfig read_sim_config(ConfigReader& r, SimConfig base) {
    base.pretrain_params = read_beta(r, "pretrain", base.pretrain_params);
    base.target_params = read_beta(r, "target", base.target_params);
    base.n_samples = r.unsigned_int("n_samples", base.n_samples);
    base.generations = r.unsigned_int("generations", base.generations);
    base.mode = as_config([&] { return parse_fit_mode(r.string("mode", std::string(to_string(base.mode)))); });
    base.mitigation = as_config(
        [&] { return parse_mitigation(r.string("mitigation", std::string(to_string(base.mitigation)))); });
    base.preserve_fraction = r.number("preserve_fraction", base.preserve_fraction);
    base.seed.master_seed = r.unsigned_int("seed", base.seed.master_seed);
    base.seed.stream_label = r.string("stream", base.seed.stream_label);
    if (auto fit = r.object("fit")) {
        base.fit_options.tol_step = fit->number("tol_step", base.fit_options.tol_step);
        base.fit_options.tol_grad = fit->number("tol_grad", base.fit_options.tol_grad);
        base.fit_options.max_iters = fit->unsigned_int("max_iters", base.fit_options.max_iters);
        fit->finish();
    }
    return base;
}

json beta_json(const BetaParams& p) { return {{"alpha", p.alpha()}, {"beta", p.beta()}}; }

json sim_config_json(const SimConfig& c) {
    return {{"pretrain", beta_json(c.pretrain_params)},
            {"target", beta_json(c.target_params)},
            {"n_samples", c.n_samples},
            {"generations", c.generations},
            {"mode", to_string(c.mode)},
            {"mitigation", to_string(c.mitigation)},
            {"preserve_fraction", c.preserve_fraction},
            {"seed", c.seed.master_seed},
            {"stream", c.seed.stream_label},
            {"fit",
             {{"tol_step", c.fit_options.tol_step},
              {"tol_grad", c.fit_options.tol_grad},
              {"max_iters", c.fit_options.max_iters}}}};
}

template <class Writer>
std::string render(Writer&& writer) {
    std::ostringstream s;
    writer(s);
    return s.str();
}

class Manifest {
public:
    Manifest(std::string command, const GlobalOptions& g)
        : command_(std::move(command)), outputs_(g.out_dir), started_(io::utc_timestamp_now()),
          t0_(std::chrono::steady_clock::now()) {}

    io::OutputSet& outputs() { return outputs_; }

    void finish(const json& config, std::uint64_t master_seed, std::ostream& out) {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        json files = json::array();
        for (const auto& f : outputs_.files()) {
            files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
        }
        const json doc = {{"tool", kToolName},
                          {"version", BIASAMP_VERSION},
                          {"command", command_},
                          {"config", config},
                          {"master_seed", master_seed},
                          {"started_at", started_},
                          {"finished_at", io::utc_timestamp_now()},
                          {"wall_time_s", wall},
                          {"outputs", files}};
        io::write_file_atomic(outputs_.root() / "manifest.json", doc.dump(2) + "\n");
        out << command_ << ": wrote " << outputs_.files().size() << " files and manifest.json to "
            << outputs_.root().string() << '\n';
    }

private:
    std::string command_;
    io::OutputSet outputs_;
    std::string started_;
    std::chrono::steady_clock::time_point t0_;
};

std::string gen_file(int gen) { return gen < 0 ? std::string("pre") : std::to_string(gen); }

// ---- simulate -------------------------------------------------------------

struct SimulateFlags {
    std::optional<std::string> mode, mitigation;
    std::optional<std::size_t> generations, n_samples;
    std::optional<double> preserve_fraction;
};

void apply_sim_flags(SimConfig& c, const SimulateFlags& f, const GlobalOptions& g) {
    if (f.mode) c.mode = as_config([&] { return parse_fit_mode(*f.mode); });
    if (f.mitigation) c.mitigation = as_config([&] { return parse_mitigation(*f.mitigation); });
    if (f.generations) c.generations = *f.generations;
    if (f.n_samples) c.n_samples = *f.n_samples;
    if (f.preserve_fraction) c.preserve_fraction = *f.preserve_fraction;
    if (g.seed) c.seed.master_seed = *g.seed;
    as_config([&] {
        c.validate();
        return 0;
    });
}

int cmd_simulate(const GlobalOptions& g, const SimulateFlags& f, std::ostream& out) {
    const json doc = load_config(g.config_path);
    ConfigReader reader(doc, "");
    SimConfig config = read_sim_config(reader, SimConfig{});
    reader.finish();
    apply_sim_flags(config, f, g);

    Manifest manifest("simulate", g);
    const SimTrace trace = run_sim(config);
    auto& files = manifest.outputs();
    files.write("trace.csv", render([&](std::ostream& s) { write_trace_csv(s, trace); }));
    for (const auto& r : trace.records) {
        files.write("pdf/gen_" + gen_file(r.gen_index) + ".csv",
                    render([&](std::ostream& s) { write_pdf_grid_csv(s, r.fitted); }));
    }
    manifest.finish(sim_config_json(config), config.seed.master_seed, out);
    const auto& last = trace.records.back();
    out << "final generation " << last.gen_index << ": mean " << std::setprecision(6) << last.fitted_mean
        << ", concentration " << last.fitted_concentration << '\n';
    return kOk;
}

// ---- collapse -------------------------------------------------------------

struct CollapseFlags {
    SimulateFlags sim;
    std::optional<std::size_t> replications, threads;
};

int cmd_collapse(const GlobalOptions& g, const CollapseFlags& f, std::ostream& out) {
    const json doc = load_config(g.config_path);
    ConfigReader reader(doc, "");
    SimConfig defaults;
    defaults.n_samples = 200;
    defaults.generations = 50;
    defaults.mode = FitMode::mle;
    defaults.seed.stream_label = "collapse";
    SimConfig config = read_sim_config(reader, defaults);
    std::size_t replications = reader.unsigned_int("replications", 100);
    std::size_t threads = reader.unsigned_int("threads", 0);
    reader.finish();
    apply_sim_flags(config, f.sim, g);
    if (f.replications) replications = *f.replications;
    if (f.threads) threads = *f.threads;
    if (replications < 2) throw ConfigError("collapse: --replications must be at least 2 (got " +
                                            std::to_string(replications) + ")");
    if (config.mode != FitMode::mle) throw ConfigError("collapse: mode must be mle");

    Manifest manifest("collapse", g);
    const CollapseEnsemble ensemble = run_collapse_sim(config, replications, threads);
    auto& files = manifest.outputs();
    const int width = static_cast<int>(std::to_string(replications - 1).size());
    for (std::size_t r = 0; r < ensemble.traces.size(); ++r) {
        std::ostringstream name;
        name << "traces/rep_" << std::setw(std::max(3, width)) << std::setfill('0') << r << ".csv";
        files.write(name.str(), render([&](std::ostream& s) { write_trace_csv(s, ensemble.traces[r]); }));
    }
    files.write("dispersion.csv", render([&](std::ostream& s) { write_dispersion_csv(s, ensemble); }));

    json config_echo = sim_config_json(config);
    config_echo["replications"] = replications;
    const double final_sd = ensemble.dispersion.back().sd_of_means;
    out << "collapse: gen " << ensemble.dispersion.back().gen_index << " dispersion " << final_sd << '\n';

    if (config.mitigation != Mitigation::none) {
        SimConfig baseline = config;
        baseline.mitigation = Mitigation::none;
        const CollapseEnsemble base = run_collapse_sim(baseline, replications, threads);
        files.write("dispersion_baseline.csv", render([&](std::ostream& s) { write_dispersion_csv(s, base); }));
        const double base_sd = base.dispersion.back().sd_of_means;
        const json comparison = {{"mitigation", to_string(config.mitigation)},
                                 {"final_gen", ensemble.dispersion.back().gen_index},
                                 {"final_dispersion", final_sd},
                                 {"baseline_final_dispersion", base_sd},
                                 {"reduced", final_sd < base_sd}};
        files.write("comparison.json", comparison.dump(2) + "\n");
        out << "collapse: baseline dispersion " << base_sd << (final_sd < base_sd ? " (reduced)" : " (not reduced)")
            << '\n';
    }
    manifest.finish(config_echo, config.seed.master_seed, out);
    return kOk;
}

// ---- project --------------------------------------------------------------

struct ProjectFlags {
    std::optional<std::size_t> steps;
    std::optional<double> eta;
    std::optional<std::string> rule;
};

UpdateRule parse_rule(const std::string& s) {
    if (s == "projected") return UpdateRule::projected;
    if (s == "full") return UpdateRule::full_gradient;
    throw ConfigError("config: 'rule' must be 'projected' or 'full' (got '" + s + "')");
}

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

int cmd_project(const GlobalOptions& g, const ProjectFlags& f, std::ostream& out) {
    if (g.config_path.empty()) throw ConfigError("project: --config is required");
    const json doc = load_config(g.config_path);
    ConfigReader reader(doc, "");
    const auto theta0 = reader.vector("theta0");
    const auto u = reader.vector("u");
    if (!theta0) reader.fail("theta0", "is required");
    if (!u) reader.fail("u", "is required");
    ProjectionConfig config;
    config.u = *u;
    config.eta = reader.number("eta", 0.1);
    config.steps = reader.unsigned_int("steps", 10);
    config.rule = parse_rule(reader.string("rule", "projected"));
    auto loss = reader.object("loss");
    if (!loss) reader.fail("loss", "is required");
    const std::string kind = loss->string("kind", "quadratic");
    json loss_echo;
    if (kind == "quadratic") {
        auto target = loss->vector("target");
        if (!target) loss->fail("target", "is required");
        auto scale = loss->vector("scale");
        const Vector s = scale ? *scale : Vector::Ones(target->size());
        config.loss = QuadraticLoss{*target, s};
        loss_echo = {{"kind", kind}, {"target", vector_json(*target)}, {"scale", vector_json(s)}};
    } else if (kind == "linear") {
        auto grad = loss->vector("gradient");
        if (!grad) loss->fail("gradient", "is required");
        config.loss = LinearLoss{*grad};
        loss_echo = {{"kind", kind}, {"gradient", vector_json(*grad)}};
    } else {
        loss->fail("kind", "must be 'quadratic' or 'linear'");
    }
    loss->finish();
    reader.finish();
    if (f.steps) config.steps = *f.steps;
    if (f.eta) config.eta = *f.eta;
    if (f.rule) config.rule = parse_rule(*f.rule);
    as_config([&] {
        config.validate();
        if (theta0->size() != config.u.size()) throw ArgumentError("config: theta0 and u differ in dimension");
        return 0;
    });

    Manifest manifest("project", g);
    const ProjectionTrajectory traj = run_projection_sim(config, *theta0);
    manifest.outputs().write("trajectory.csv", render([&](std::ostream& s) { write_projection_csv(s, traj); }));
    const json echo = {{"theta0", vector_json(*theta0)},
                       {"u", vector_json(config.u)},
                       {"eta", config.eta},
                       {"steps", config.steps},
                       {"rule", config.rule == UpdateRule::projected ? "projected" : "full"},
                       {"loss", loss_echo}};
    manifest.finish(echo, 0, out);
    return kOk;
}

// ---- analyze --------------------------------------------------------------

struct AnalyzeFlags {
    std::string trajectories;
    std::vector<std::string> outcomes;
    std::optional<std::string> lag, mask;
    std::optional<double> threshold;
    bool compare = false;
    bool bh = false;
    std::optional<std::size_t> threads;
};

std::optional<std::size_t> parse_lag(const std::string& s) {
    if (s == "auto") return std::nullopt;
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("--lag must be 'auto' or a non-negative integer (got '" + s + "')");
    }
    return value;
}

int cmd_analyze(const GlobalOptions& g, const AnalyzeFlags& f, std::ostream& out) {
    const json doc = load_config(g.config_path);
    ConfigReader reader(doc, "");
    std::vector<std::string> outcomes = reader.strings("outcomes");
    std::string lag_text = reader.string("lag", "auto");
    double threshold = reader.number("threshold", 0.05);
    std::string mask = reader.string("mask", "");
    bool compare = reader.boolean("compare", false);
    bool bh = reader.boolean("bh", false);
    std::size_t threads = reader.unsigned_int("threads", 0);
    reader.finish();
    if (!f.outcomes.empty()) outcomes = f.outcomes;
    if (f.lag) lag_text = *f.lag;
    if (f.threshold) threshold = *f.threshold;
    if (f.mask) mask = *f.mask;
    compare = compare || f.compare;
    bh = bh || f.bh;
    if (f.threads) threads = *f.threads;
    if (outcomes.empty()) throw ConfigError("analyze: at least one --outcome is required");
    if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("analyze: --threshold must lie in (0, 1]");
    if (compare && outcomes.size() != 2) throw ConfigError("analyze: --compare needs exactly two outcomes");
    const std::optional<std::size_t> lag = parse_lag(lag_text);

    TrajectoryMatrix matrix = load_trajectories(f.trajectories);
    if (!mask.empty()) matrix.set_excluded_transitions(load_transition_mask(mask));

    Manifest manifest("analyze", g);
    std::vector<AnalysisResults> analyses;
    for (const auto& name : outcomes) analyses.push_back(analyze_all(matrix, name, lag, threads));
    const SignificanceReport report = build_significance_report(analyses, threshold, bh, compare);

    auto& files = manifest.outputs();
    for (const auto& a : analyses) {
        files.write("results_" + a.outcome + ".csv", render([&](std::ostream& s) { write_results_csv(s, a); }));
    }
    files.write("report.json", render([&](std::ostream& s) { write_report_json(s, report); }));
    for (const auto& o : report.outcomes) {
        out << "analyze: " << o.outcome << ": " << o.significant.size() << " of " << o.n_testable
            << " testable signals significant\n";
    }
    if (report.overlap) {
        out << "analyze: overlap " << report.overlap->size_intersection << ", jaccard " << report.overlap->jaccard
            << '\n';
    }
    const json echo = {{"trajectories", f.trajectories}, {"outcomes", outcomes},  {"lag", lag_text},
                       {"threshold", threshold},         {"mask", mask},          {"compare", compare},
                       {"bh", bh}};
    manifest.finish(echo, 0, out);
    return kOk;
}

// ---- aggregate ------------------------------------------------------------

struct AggregateFlags {
    std::string labels;
    std::optional<std::string> kind, side;
};

int cmd_aggregate(const GlobalOptions& g, const AggregateFlags& f, std::ostream& out) {
    const json doc = load_config(g.config_path);
    ConfigReader reader(doc, "");
    std::string kind = reader.string("kind", "");
    std::string side = reader.string("side", "right");
    reader.finish();
    if (f.kind) kind = *f.kind;
    if (f.side) side = *f.side;
    if (kind != "bias" && kind != "quality") throw ConfigError("aggregate: --kind must be 'bias' or 'quality'");
    const PoliticalLabel side_label = as_config([&] { return parse_political_label(side); });

    const OutcomeSeries series = kind == "bias" ? build_bias_series(load_article_labels(f.labels), side_label)
                                                : build_quality_series(load_sentence_quality(f.labels));
    Manifest manifest("aggregate", g);
    manifest.outputs().write("outcome.csv", render([&](std::ostream& s) { write_outcome_csv(s, series); }));
    json echo = {{"labels", f.labels}, {"kind", kind}};
    if (kind == "bias") echo["side"] = side;
    manifest.finish(echo, 0, out);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bias amplification and model collapse simulator and trajectory analyzer", kToolName};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", BIASAMP_VERSION);

    GlobalOptions global;
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "Master seed");
    app.add_option("--out-dir", global.out_dir, "Output directory")->capture_default_str();
    app.add_option("--config", global.config_path, "JSON config file");

    auto add_sim_flags = [](CLI::App* sub, SimulateFlags& f) {
        sub->add_option("--mode", f.mode, "wmle or mle");
        sub->add_option("--mitigation", f.mitigation, "none, preservation or accumulation");
        sub->add_option("--generations", f.generations, "Number of synthetic generations");
        sub->add_option("--n-samples", f.n_samples, "Sample size per generation");
        sub->add_option("--preserve-fraction", f.preserve_fraction, "Real fraction kept under preservation");
    };

    SimulateFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "Pretrain / fine-tune / regenerate loop on Beta models");
    add_sim_flags(simulate, sim_flags);

    CollapseFlags collapse_flags;
    auto* collapse = app.add_subcommand("collapse", "Replicated finite-sample runs and their dispersion");
    add_sim_flags(collapse, collapse_flags.sim);
    collapse->add_option("--replications", collapse_flags.replications, "Number of replications");
    collapse->add_option("--threads", collapse_flags.threads, "Worker threads (0 = all cores)");

    ProjectFlags project_flags;
    auto* project = app.add_subcommand("project", "Gradient-descent bias projection trajectory");
    project->add_option("--steps", project_flags.steps, "Number of steps");
    project->add_option("--eta", project_flags.eta, "Learning rate");
    project->add_option("--rule", project_flags.rule, "projected or full");

    AnalyzeFlags analyze_flags;
    auto* analyze = app.add_subcommand("analyze", "Differenced HAC regressions over every signal");
    analyze->add_option("trajectories", analyze_flags.trajectories, "Trajectory CSV")->required();
    analyze->add_option("--outcome", analyze_flags.outcomes, "Outcome column name (repeatable)");
    analyze->add_option("--lag", analyze_flags.lag, "Newey-West lag or 'auto'");
    analyze->add_option("--threshold", analyze_flags.threshold, "Significance threshold");
    analyze->add_option("--mask", analyze_flags.mask, "File listing excluded transitions");
    analyze->add_flag("--compare", analyze_flags.compare, "Report overlap between two outcomes");
    analyze->add_flag("--bh", analyze_flags.bh, "Benjamini-Hochberg instead of a raw threshold");
    analyze->add_option("--threads", analyze_flags.threads, "Worker threads (0 = all cores)");

    AggregateFlags aggregate_flags;
    auto* aggregate = app.add_subcommand("aggregate", "Outcome series from labeled JSONL records");
    aggregate->add_option("labels", aggregate_flags.labels, "JSONL label file")->required();
    aggregate->add_option("--kind", aggregate_flags.kind, "bias or quality");
    aggregate->add_option("--side", aggregate_flags.side, "left, center or right");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << BIASAMP_VERSION << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << kToolName << ": " << e.what() << '\n';
        return kConfigError;
    }
    if (seed_opt->count() > 0) global.seed = seed_value;

    try {
        if (simulate->parsed()) return cmd_simulate(global, sim_flags, out);
        if (collapse->parsed()) return cmd_collapse(global, collapse_flags, out);
        if (project->parsed()) return cmd_project(global, project_flags, out);
        if (analyze->parsed()) return cmd_analyze(global, analyze_flags, out);
        if (aggregate->parsed()) return cmd_aggregate(global, aggregate_flags, out);
    } catch (const ConfigError& e) {
        err << kToolName << ": config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ArgumentError& e) {
        err << kToolName << ": argument error: " << e.what() << '\n';
        return kConfigError;
    } catch (const SimulationError& e) {
        err << kToolName << ": numeric error: " << e.what() << " (" << e.partial_trace().records.size()
            << " generations completed)\n";
        return kNumericError;
    } catch (const DataError& e) {
        err << kToolName << ": data error: " << e.what() << '\n';
        return kDataError;
    } catch (const NumericError& e) {
        err << kToolName << ": numeric error: " << e.what() << '\n';
        return kNumericError;
    } catch (const std::exception& e) {
        err << kToolName << ": error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}

}  // namespace biasamp::cli
