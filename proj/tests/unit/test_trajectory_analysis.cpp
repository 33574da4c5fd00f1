#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "biasamp/errors.hpp"
#include "biasamp/trajectory_analysis.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace biasamp;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

AnalysisResults with_p_values(const std::vector<double>& ps) {
    AnalysisResults r{"y", {}};
    for (std::size_t i = 0; i < ps.size(); ++i) {
        DiffRegressionResult d{0.1, 0.0, 0.1, 1.0, ps[i], 10, 1, true};
        r.entries.push_back({"s" + std::to_string(i), d});
    }
    return r;
}

template <class Fn>
void expect_schema_error(const std::string& text, std::size_t row, std::size_t col, Fn&& check_msg) {
    std::istringstream in(text);
    try {
        parse_trajectories(in);
        FAIL("expected schema error");
    } catch (const SchemaError& e) {
        CHECK(e.row() == row);
        CHECK(e.column() == col);
        check_msg(std::string(e.what()));
    }
}

}  // namespace

TEST_CASE("parse a toy trajectory file") {
    std::istringstream in("version,y:right_prop,x:a,x:b\n0,0.5,1,2\n1,0.55,1.5,2\n2,0.6,1.25,2.5\n");
    const auto m = parse_trajectories(in);
    CHECK(m.version_ids() == std::vector<std::int64_t>{0, 1, 2});
    REQUIRE(m.outcomes().size() == 1);
    REQUIRE(m.signals().size() == 2);
    CHECK(m.outcomes()[0].label == "right_prop");
    CHECK(m.signals()[1].values == std::vector<double>{2, 2, 2.5});
    CHECK(m.find_outcome("right_prop") != nullptr);
    CHECK(m.find_outcome("nope") == nullptr);

    std::ostringstream out;
    write_trajectories(out, m);
    std::istringstream back(out.str());
    const auto m2 = parse_trajectories(back);
    CHECK(m2.signals()[0].values == m.signals()[0].values);
    CHECK(m2.outcomes()[0].values == m.outcomes()[0].values);
}

TEST_CASE("schema violations name their location") {
    expect_schema_error("version,y:o,x:a\n0,1,2\n2,1,2\n1,1,2\n", 4, 1,
                        [](const std::string& m) { CHECK_THAT(m, ContainsSubstring("line 4")); });
    expect_schema_error("version,y:o,x:a,x:a\n0,1,2,3\n", 1, 4,
                        [](const std::string& m) { CHECK_THAT(m, ContainsSubstring("duplicate")); });
    expect_schema_error("version,y:o,x:a\n0,1,abc\n", 2, 3,
                        [](const std::string& m) { CHECK_THAT(m, ContainsSubstring("abc")); });
    expect_schema_error("version,y:o,x:a\n0,1,nan\n", 2, 3, [](const std::string&) {});
    expect_schema_error("version,y:o,x:a\n0,1\n", 2, 0, [](const std::string&) {});
    expect_schema_error("step,y:o\n0,1\n", 1, 1, [](const std::string&) {});
    expect_schema_error("version,o\n0,1\n", 1, 2, [](const std::string&) {});
    CHECK_THROWS_AS(load_trajectories("/nonexistent/file.csv"), DataError);
}

TEST_CASE("matrix construction checks") {
    CHECK_THROWS_AS(TrajectoryMatrix({0, 2, 1}), DataError);
    TrajectoryMatrix m({0, 1, 2, 3});
    m.add_outcome({{1, 2, 3, 4}, "o"});
    CHECK_THROWS_AS(m.add_outcome({{1, 2, 3, 4}, "o"}), DataError);
    CHECK_THROWS_AS(m.add_signal({{1, 2, 3}, "short"}), DataError);
    CHECK_THROWS_AS(m.set_excluded_transitions({3}), DataError);
    m.set_excluded_transitions({2, 0, 2});
    CHECK(m.excluded_transitions() == std::vector<std::size_t>{0, 2});
}

TEST_CASE("transition mask sidecar") {
    std::istringstream in("# round boundaries\n10\n\n21  # second\n");
    CHECK(parse_transition_mask(in) == std::vector<std::size_t>{10, 21});
    std::istringstream bad("4\nx\n");
    CHECK_THROWS_AS(parse_transition_mask(bad), SchemaError);
}

TEST_CASE("analyze_all basics") {
    std::mt19937_64 eng(3);
    std::normal_distribution<double> z;
    std::vector<std::int64_t> ids(30);
    std::iota(ids.begin(), ids.end(), 0);
    TrajectoryMatrix m(ids);
    std::vector<double> y(30);
    for (auto& v : y) v = z(eng);
    m.add_outcome({y, "quality_index"});
    m.add_signal({y, "copy"});
    m.add_signal({std::vector<double>(30, 1.5), "flat"});
    const auto r = analyze_all(m, "quality_index");
    REQUIRE(r.entries.size() == 2);
    CHECK(r.entries[0].signal == "copy");
    CHECK(r.entries[0].result.p_value < 1e-12);
    CHECK_FALSE(r.entries[1].result.testable);
    CHECK(significant_set(r) == std::set<std::string>{"copy"});

    try {
        analyze_all(m, "right_prop");
        FAIL("expected missing outcome");
    } catch (const DataError& e) {
        CHECK_THAT(std::string(e.what()), ContainsSubstring("quality_index"));
    }

    TrajectoryMatrix flat(ids);
    flat.add_outcome({y, "o"});
    for (int j = 0; j < 5; ++j) flat.add_signal({std::vector<double>(30, j), "c" + std::to_string(j)});
    const auto rf = analyze_all(flat, "o");
    for (const auto& e : rf.entries) CHECK_FALSE(e.result.testable);
    CHECK(significant_set(rf).empty());
}

TEST_CASE("planted fixture recall") {
    // SNR 1.0 gives near-certain detection per the oracle; pre-check it.
    const double power = oracle::planted_power(1.0, 66, 2000, 101);
    INFO("oracle power " << power);
    REQUIRE(power >= 0.95);

    fixture::PlantedSpec spec;
    spec.n_signals = 200;
    spec.a_end = 20;
    const auto p = fixture::make_planted(spec);
    const auto sig = significant_set(analyze_all(p.matrix, "a"));
    std::size_t hit = 0;
    for (const auto& s : p.truth_a) hit += sig.count(s);
    CHECK(static_cast<double>(hit) / p.truth_a.size() >= 0.9);
}

TEST_CASE("significant_set thresholds") {
    CHECK(significant_set(with_p_values(std::vector<double>(10, 1.0))).empty());
    auto r = with_p_values({0.5, 0.2, 0.9, 1.0});
    r.entries[3].result.testable = false;
    CHECK(significant_set(r, 1.0) == std::set<std::string>{"s0", "s1", "s2"});
    std::vector<double> ps(50, 0.5);
    const std::set<std::string> expected{"s3", "s7", "s11", "s20", "s31", "s42", "s49"};
    for (const auto& name : expected) ps[std::stoul(name.substr(1))] = 0.01;
    ps[5] = 0.05;  // not strictly below
    CHECK(significant_set(with_p_values(ps), 0.05) == expected);
    CHECK_THROWS_AS(significant_set(r, 0.0), ArgumentError);
    CHECK_THROWS_AS(significant_set(r, 1.5), ArgumentError);
}

TEST_CASE("Benjamini-Hochberg selection") {
    // Sorted p: 0.001 0.008 0.039 0.041 0.042 0.06 0.074 0.205 ... with m = 10, q = 0.05
    // thresholds k q / m = 0.005 0.01 0.015 0.02 ... -> largest k with p_(k) <= kq/m is 2.
    const auto r = with_p_values({0.041, 0.001, 0.205, 0.008, 0.039, 0.06, 0.042, 0.074, 0.5, 0.9});
    CHECK(significant_set_bh(r, 0.05) == std::set<std::string>{"s1", "s3"});
    const auto p = fixture::make_planted({});
    const auto res = analyze_all(p.matrix, "a");
    const auto raw = significant_set(res), bh = significant_set_bh(res);
    CHECK(std::includes(raw.begin(), raw.end(), bh.begin(), bh.end()));
}

TEST_CASE("overlap_report") {
    const std::set<std::string> a{"x", "y", "z"}, b{"p", "q"};
    CHECK(overlap_report(a, a, 10).jaccard == 1.0);
    CHECK(overlap_report(a, b, 10).jaccard == 0.0);
    CHECK(overlap_report({}, {}, 10).jaccard == 0.0);
    const auto o = overlap_report(a, {"y", "z", "w"}, 10);
    CHECK(o.intersection == std::set<std::string>{"y", "z"});
    CHECK(o.size_union == 4);
    CHECK(o.jaccard == 0.5);
    CHECK_THROWS_AS(overlap_report(a, b, 4), ArgumentError);

    // Counts of the published comparison: 3,243 and 1,033 with 389 shared.
    std::set<std::string> big, small;
    for (int i = 0; i < 3243; ++i) big.insert("n" + std::to_string(i));
    for (int i = 3243 - 389; i < 3243 - 389 + 1033; ++i) small.insert("n" + std::to_string(i));
    const auto paper = overlap_report(big, small, 9216);
    CHECK(paper.size_intersection == 389);
    CHECK(paper.size_union == 3887);
    CHECK(paper.jaccard == 389.0 / 3887.0);
    CHECK_THAT(paper.jaccard, WithinAbs(0.1001, 5e-5));
    // 389 is close to the 3243 * 1033 / 9216 ~ 363.5 expected by chance.
    CHECK(paper.hypergeometric_tail > 0.01);
    CHECK(paper.hypergeometric_tail < 0.2);
}

TEST_CASE("hypergeometric tail matches enumeration") {
    for (std::size_t N = 1; N <= 12; ++N)
        for (std::size_t a = 0; a <= N; ++a)
            for (std::size_t b = 0; b <= N; ++b)
                for (std::size_t k = 0; k <= std::min(a, b) + 1; ++k) {
                    INFO("N=" << N << " a=" << a << " b=" << b << " k=" << k);
                    CHECK_THAT(hypergeometric_upper_tail(k, a, b, N),
                               WithinAbs(oracle::hypergeometric_tail_enumerated(k, a, b, N), 1e-12));
                }
    CHECK_THROWS_AS(hypergeometric_upper_tail(1, 5, 3, 4), ArgumentError);
}

TEST_CASE("column order and thread count do not change results") {
    const auto p = fixture::make_planted({});
    const auto base = analyze_all(p.matrix, "a", std::nullopt, 1);
    TrajectoryMatrix shuffled(p.matrix.version_ids());
    for (const auto& o : p.matrix.outcomes()) shuffled.add_outcome(o);
    auto sigs = p.matrix.signals();
    std::mt19937_64 eng(8);
    std::shuffle(sigs.begin(), sigs.end(), eng);
    for (const auto& s : sigs) shuffled.add_signal(s);
    const auto perm = analyze_all(shuffled, "a", std::nullopt, 5);
    std::map<std::string, DiffRegressionResult> by_name;
    for (const auto& e : perm.entries) by_name.emplace(e.signal, e.result);
    for (const auto& e : base.entries) {
        const auto& r = by_name.at(e.signal);
        CHECK(r.beta_hat == e.result.beta_hat);
        CHECK(r.p_value == e.result.p_value);
    }
    CHECK(significant_set(base) == significant_set(perm));
    const auto threaded = analyze_all(p.matrix, "a", std::nullopt, 7);
    for (std::size_t i = 0; i < base.entries.size(); ++i) {
        CHECK(threaded.entries[i].signal == base.entries[i].signal);
        CHECK(threaded.entries[i].result.se_nw == base.entries[i].result.se_nw);
    }
}

TEST_CASE("mask drops exactly the masked transitions") {
    auto p = fixture::make_planted({});
    const auto full = analyze_all(p.matrix, "b", 2);
    p.matrix.set_excluded_transitions({10, 21, 32, 43});
    const auto masked = analyze_all(p.matrix, "b", 2);
    for (std::size_t i = 0; i < full.entries.size(); ++i) {
        CHECK(masked.entries[i].result.n_obs + 4 == full.entries[i].result.n_obs);
    }
}

namespace {

double null_fraction(bool increments) {
    std::size_t total = 0, rejected = 0;
    for (std::uint64_t r = 0; r < 100; ++r) {
        TrajectoryMatrix m = [&] {
            if (!increments) return fixture::make_null(500, 66, 5000 + r);
            fixture::PlantedSpec spec;
            spec.n_signals = 500;
            spec.a_end = 0;
            spec.seed = 9000 + r;
            return fixture::make_planted(spec).matrix;
        }();
        const auto res = analyze_all(m, increments ? "a" : "y");
        rejected += significant_set(res).size();
        total += res.entries.size();
    }
    return static_cast<double>(rejected) / static_cast<double>(total);
}

}  // namespace

// White-noise levels: see the matching case in the regression suite; the
// specified HAC test over-rejects there.
TEST_CASE("null calibration over 100 x 500 white-noise signals", "[!mayfail]") {
    const double f = null_fraction(false);
    INFO("fraction " << f);
    CHECK(f >= 0.02);
    CHECK(f <= 0.08);
}

TEST_CASE("null calibration over 100 x 500 random-walk signals") {
    const double f = null_fraction(true);
    INFO("fraction " << f);
    CHECK(f >= 0.02);
    CHECK(f <= 0.08);
}

TEST_CASE("significance report and JSON") {
    fixture::PlantedSpec spec;
    spec.a_end = 30;
    spec.b_begin = 20;
    spec.b_end = 45;
    const auto p = fixture::make_planted(spec);
    const std::vector<AnalysisResults> res{analyze_all(p.matrix, "a"), analyze_all(p.matrix, "b")};
    const auto rep = build_significance_report(res, 0.05, false, true);
    REQUIRE(rep.overlap.has_value());
    const auto& sa = rep.outcomes[0].significant;
    const auto& sb = rep.outcomes[1].significant;
    std::set<std::string> inter;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(inter, inter.end()));
    CHECK(rep.overlap->intersection == inter);
    CHECK(rep.overlap->size_intersection <= std::min(sa.size(), sb.size()));
    CHECK(rep.universe_size == 200);

    std::ostringstream out;
    write_report_json(out, rep);
    const auto doc = nlohmann::json::parse(out.str());
    CHECK(doc["overlap"]["intersection_size"] == inter.size());
    CHECK(doc["outcomes"][0]["outcome"] == "a");
    CHECK(doc["correction"] == "none");

    CHECK_THROWS_AS(build_significance_report({res[0]}, 0.05, false, true), ArgumentError);

    std::ostringstream csv;
    write_results_csv(csv, res[0]);
    CHECK(csv.str().rfind("signal,beta,se,t,p,lag,testable\n", 0) == 0);
}
