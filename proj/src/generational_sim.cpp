#include "biasamp/generational_sim.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <numeric>
#include <sstream>
#include <thread>

namespace biasamp {

std::string_view to_string(FitMode mode) noexcept { return mode == FitMode::wmle ? "wmle" : "mle"; }

std::string_view to_string(Mitigation mitigation) noexcept {
    switch (mitigation) {
        case Mitigation::none: return "none";
        case Mitigation::preservation: return "preservation";
        case Mitigation::accumulation: return "accumulation";
    }
    return "none";
}

FitMode parse_fit_mode(std::string_view text) {
    if (text == "wmle") return FitMode::wmle;
    if (text == "mle") return FitMode::mle;
    throw ArgumentError("unknown mode '" + std::string(text) + "' (expected wmle or mle)");
}

Mitigation parse_mitigation(std::string_view text) {
    if (text == "none") return Mitigation::none;
    if (text == "preservation") return Mitigation::preservation;
    if (text == "accumulation") return Mitigation::accumulation;
    throw ArgumentError("unknown mitigation '" + std::string(text) +
                        "' (expected none, preservation or accumulation)");
}

void SimConfig::validate() const {
    if (n_samples < 2) throw ArgumentError("n_samples must be at least 2");
    if (!(preserve_fraction >= 0.0 && preserve_fraction <= 1.0)) {
        throw ArgumentError("preserve_fraction must lie in [0, 1]");
    }
    if (fit_options.max_iters == 0) throw ArgumentError("max_iters must be positive");
}

std::vector<std::array<double, 4>> SimTrace::trajectory() const {
    std::vector<std::array<double, 4>> rows;
    rows.reserve(records.size());
    for (const auto& r : records) {
        rows.push_back({r.fitted.alpha(), r.fitted.beta(), r.fitted_mean, r.fitted_concentration});
    }
    return rows;
}

const GenerationRecord& SimTrace::generation(int k) const {
    for (const auto& r : records) {
        if (r.gen_index == k) return r;
    }
    throw ArgumentError("trace has no generation " + std::to_string(k));
}

namespace {

// First k entries of a uniformly random permutation of [0, n).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

std::string mixture_tag(const std::vector<Origin>& origins, const std::string& fallback) {
    bool any_real = false, any_synth = false;
    for (Origin o : origins) {
        any_real = any_real || o == Origin::real;
        any_synth = any_synth || o == Origin::synthetic;
    }
    return any_real && any_synth ? std::string("mixed") : fallback;
}

}  // namespace

Dataset compose_training_set(const Dataset& prev_synth, const Dataset& real,
                             std::span<const Dataset> history, Mitigation mitigation,
                             double preserve_fraction, const SeedSpec& seed) {
    switch (mitigation) {
        case Mitigation::none:
            return prev_synth;
        case Mitigation::preservation: {
            if (real.empty()) throw ArgumentError("preservation requires a non-empty real dataset");
            if (prev_synth.empty()) throw ArgumentError("preservation requires a synthetic dataset");
            if (!(preserve_fraction >= 0.0 && preserve_fraction <= 1.0)) {
                throw ArgumentError("preserve_fraction must lie in [0, 1]");
            }
            const std::size_t n = prev_synth.size();
            const auto k = static_cast<std::size_t>(
                std::llround(preserve_fraction * static_cast<double>(n)));
            Rng rng(seed);
            const auto positions = sample_without_replacement(n, k, rng);
            std::vector<std::size_t> picks;
            if (k <= real.size()) {
                picks = sample_without_replacement(real.size(), k, rng);
            } else {
                picks.resize(k);
                for (auto& p : picks) p = static_cast<std::size_t>(rng.uniform_index(real.size()));
            }
            std::vector<double> values(prev_synth.values().begin(), prev_synth.values().end());
            std::vector<Origin> origins(prev_synth.origins().begin(), prev_synth.origins().end());
            for (std::size_t i = 0; i < k; ++i) {
                values[positions[i]] = real.values()[picks[i]];
                origins[positions[i]] = real.origins()[picks[i]];
            }
            std::string tag = mixture_tag(origins, prev_synth.provenance());
            return Dataset(std::move(values), std::move(origins), std::move(tag));
        }
        case Mitigation::accumulation: {
            std::size_t total = prev_synth.size();
            for (const auto& d : history) total += d.size();
            std::vector<double> values;
            std::vector<Origin> origins;
            values.reserve(total);
            origins.reserve(total);
            for (const auto& d : history) {
                values.insert(values.end(), d.values().begin(), d.values().end());
                origins.insert(origins.end(), d.origins().begin(), d.origins().end());
            }
            values.insert(values.end(), prev_synth.values().begin(), prev_synth.values().end());
            origins.insert(origins.end(), prev_synth.origins().begin(), prev_synth.origins().end());
            if (values.empty()) throw ArgumentError("accumulation of empty datasets");
            std::string tag = mixture_tag(origins, prev_synth.provenance());
            return Dataset(std::move(values), std::move(origins), std::move(tag));
        }
    }
    throw ArgumentError("unknown mitigation policy");
}

namespace {

WeightVector pdf_weights(const BetaParams& model, const Dataset& data) {
    std::vector<double> w(data.size());
    const auto x = data.values();
    for (std::size_t i = 0; i < x.size(); ++i) w[i] = beta_pdf(model, x[i]);
    return WeightVector(std::move(w));
}

GenerationRecord make_record(int gen, const FitResult& fit, const Dataset& data) {
    return GenerationRecord{gen,
                            fit.params,
                            fit.params.mean(),
                            fit.params.concentration(),
                            data.size(),
                            data.count(Origin::real),
                            data.count(Origin::synthetic),
                            fit.iterations};
}

std::string gen_label(int gen) { return gen < 0 ? std::string("pre") : "gen_" + std::to_string(gen); }

}  // namespace

SimTrace run_sim(const SimConfig& config) {
    config.validate();
    SimTrace trace{config, {}};
    trace.records.reserve(config.generations + 2);

    auto fit_checked = [&](int gen, const Dataset& data, const std::optional<WeightVector>& w) {
        FitResult fit = [&] {
            try {
                return w ? fit_wmle(data, *w, config.fit_options) : fit_mle(data, config.fit_options);
            } catch (const DegenerateDataError& e) {
                throw DegenerateDataError("generation " + gen_label(gen) + ": " + e.what());
            }
        }();
        if (!fit.converged) {
            std::ostringstream msg;
            msg << "generation " << gen_label(gen) << ": fit did not converge after "
                << fit.iterations << " iterations (gradient norm " << fit.gradient_norm_at_exit << ")";
            throw SimulationError(msg.str(), gen, trace);
        }
        trace.records.push_back(make_record(gen, fit, data));
        return fit.params;
    };

    const Dataset pretrain = sample_beta(config.pretrain_params, config.n_samples,
                                         config.seed.derive("pretrain"), "real");
    const BetaParams f_pre = fit_checked(-1, pretrain, std::nullopt);

    const Dataset real = sample_beta(config.target_params, config.n_samples,
                                     config.seed.derive("real"), "real");
    const bool weighted = config.mode == FitMode::wmle;
    BetaParams current =
        fit_checked(0, real, weighted ? std::optional(pdf_weights(f_pre, real)) : std::nullopt);

    std::vector<Dataset> history;
    if (config.mitigation == Mitigation::accumulation) history.push_back(real);

    for (int k = 1; k <= static_cast<int>(config.generations); ++k) {
        const std::string prev = gen_label(k - 1);
        Dataset synth = sample_beta(current, config.n_samples, config.seed.derive("synth/" + prev),
                                    "synthetic:" + prev);
        Dataset train = compose_training_set(synth, real, history, config.mitigation,
                                             config.preserve_fraction,
                                             config.seed.derive("compose/" + gen_label(k)));
        current = fit_checked(k, train, weighted ? std::optional(pdf_weights(current, train)) : std::nullopt);
        if (config.mitigation == Mitigation::accumulation) history.push_back(std::move(synth));
    }
    return trace;
}

CollapseEnsemble run_collapse_sim(const SimConfig& config, std::size_t replications,
                                  std::size_t threads) {
    if (replications < 2) {
        throw ArgumentError("collapse ensemble needs at least 2 replications");
    }
    if (config.mode != FitMode::mle) {
        throw ArgumentError("collapse ensemble runs in mle mode");
    }
    config.validate();

    CollapseEnsemble ensemble;
    ensemble.traces.resize(replications);
    std::vector<std::exception_ptr> errors(replications);

    auto run_one = [&](std::size_t r) {
        try {
            SimConfig rc = config;
            rc.seed = config.seed.derive("rep_" + std::to_string(r));
            ensemble.traces[r] = run_sim(rc);
        } catch (...) {
            errors[r] = std::current_exception();
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, replications);
    if (threads <= 1) {
        for (std::size_t r = 0; r < replications; ++r) run_one(r);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t r = t; r < replications; r += threads) run_one(r);
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    const std::size_t gens = config.generations;
    for (std::size_t g = 0; g <= gens; ++g) {
        // records[0] is f_pre, so generation g sits at index g + 1.
        double mean = 0.0;
        for (const auto& t : ensemble.traces) mean += t.records[g + 1].fitted_mean;
        mean /= static_cast<double>(replications);
        double ss = 0.0;
        for (const auto& t : ensemble.traces) {
            const double d = t.records[g + 1].fitted_mean - mean;
            ss += d * d;
        }
        ensemble.dispersion.push_back(GenerationDispersion{
            static_cast<int>(g), mean, std::sqrt(ss / static_cast<double>(replications - 1))});
    }
    return ensemble;
}

namespace {

void put_double(std::ostream& out, double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    out.write(buf, end - buf);
}

}  // namespace

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
    out << "gen,alpha,beta,mean,concentration,n_real,n_synth\n";
    for (const auto& r : trace.records) {
        out << r.gen_index << ',';
        put_double(out, r.fitted.alpha());
        out << ',';
        put_double(out, r.fitted.beta());
        out << ',';
        put_double(out, r.fitted_mean);
        out << ',';
        put_double(out, r.fitted_concentration);
        out << ',' << r.n_real << ',' << r.n_synth << '\n';
    }
}

void write_pdf_grid_csv(std::ostream& out, const BetaParams& params) {
    out << "x,density\n";
    for (std::size_t i = 0; i < kPdfGridPoints; ++i) {
        const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(kPdfGridPoints);
        put_double(out, x);
        out << ',';
        put_double(out, beta_pdf(params, x));
        out << '\n';
    }
}

void write_dispersion_csv(std::ostream& out, const CollapseEnsemble& ensemble) {
    out << "gen,mean_of_means,sd_of_means,replications\n";
    for (const auto& d : ensemble.dispersion) {
        out << d.gen_index << ',';
        put_double(out, d.mean_of_means);
        out << ',';
        put_double(out, d.sd_of_means);
        out << ',' << ensemble.traces.size() << '\n';
    }
}

}  // namespace biasamp
