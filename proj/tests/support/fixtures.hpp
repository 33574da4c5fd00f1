#pragma once

#include <cstdint>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "biasamp/trajectory_analysis.hpp"

namespace fixture {

struct PlantedSpec {
    std::size_t n_signals = 200;
    std::size_t versions = 66;
    // Signals [0, a_end) carry outcome y:a; signals [b_begin, b_end) carry y:b.
    std::size_t a_end = 20;
    std::size_t b_begin = 0;
    std::size_t b_end = 0;
    double snr = 1.0;
    std::uint64_t seed = 20240611;
};

struct Planted {
    biasamp::TrajectoryMatrix matrix;
    std::set<std::string> truth_a;
    std::set<std::string> truth_b;
};

inline std::string signal_name(std::size_t j) {
    // 768 units per block, named like extracted feed-forward outputs.
    char buf[32];
    std::snprintf(buf, sizeof buf, "b%02zu_n%03zu", j / 768, j % 768);
    return buf;
}

inline std::vector<double> cumulate(double start, const std::vector<double>& steps) {
    std::vector<double> out{start};
    for (double d : steps) out.push_back(out.back() + d);
    return out;
}

// Outcomes are random walks; a planted signal's increments are the outcome's
// increments plus noise with standard deviation 1 / snr. Unplanted signals
// are independent random walks with unit increments.
inline Planted make_planted(const PlantedSpec& spec) {
    std::mt19937_64 eng(spec.seed);
    std::normal_distribution<double> z(0.0, 1.0);
    const std::size_t T = spec.versions - 1;
    std::vector<double> da(T), db(T);
    for (auto& v : da) v = z(eng);
    for (auto& v : db) v = z(eng);

    std::vector<std::int64_t> versions(spec.versions);
    for (std::size_t i = 0; i < spec.versions; ++i) versions[i] = static_cast<std::int64_t>(i);
    Planted p{biasamp::TrajectoryMatrix(versions), {}, {}};
    p.matrix.add_outcome({cumulate(0.5, da), "a"});
    p.matrix.add_outcome({cumulate(2.0, db), "b"});

    for (std::size_t j = 0; j < spec.n_signals; ++j) {
        const bool in_a = j < spec.a_end;
        const bool in_b = j >= spec.b_begin && j < spec.b_end;
        const double noise_sd = (in_a || in_b) ? 1.0 / spec.snr : 1.0;
        std::vector<double> dx(T);
        for (std::size_t t = 0; t < T; ++t) {
            dx[t] = noise_sd * z(eng) + (in_a ? da[t] : 0.0) + (in_b ? db[t] : 0.0);
        }
        const std::string name = signal_name(j);
        p.matrix.add_signal({cumulate(0.0, dx), name});
        if (in_a) p.truth_a.insert(name);
        if (in_b) p.truth_b.insert(name);
    }
    return p;
}

// Independent white-noise levels for every signal and one outcome.
inline biasamp::TrajectoryMatrix make_null(std::size_t n_signals, std::size_t versions, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<std::int64_t> ids(versions);
    for (std::size_t i = 0; i < versions; ++i) ids[i] = static_cast<std::int64_t>(i);
    biasamp::TrajectoryMatrix m(ids);
    std::vector<double> y(versions);
    for (auto& v : y) v = z(eng);
    m.add_outcome({y, "y"});
    for (std::size_t j = 0; j < n_signals; ++j) {
        std::vector<double> x(versions);
        for (auto& v : x) v = z(eng);
        m.add_signal({x, signal_name(j)});
    }
    return m;
}

}  // namespace fixture
