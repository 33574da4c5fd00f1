#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <sstream>

#include "biasamp/errors.hpp"
#include "biasamp/metrics_ingestion.hpp"

using namespace biasamp;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

void add_articles(std::vector<ArticleLabelRecord>& out, std::int64_t gen, PoliticalLabel label, int n) {
    for (int i = 0; i < n; ++i) {
        out.push_back({gen, std::string(to_string(label)) + "_" + std::to_string(out.size()), label});
    }
}

void add_article(std::vector<SentenceQualityRecord>& out, std::int64_t gen, const std::string& id,
                 std::initializer_list<QualityCategory> cats) {
    std::size_t i = 0;
    for (auto c : cats) out.push_back({gen, id, i++, c});
}

constexpr auto L = PoliticalLabel::left;
constexpr auto C = PoliticalLabel::center;
constexpr auto R = PoliticalLabel::right;
constexpr auto clean = QualityCategory::clean;
constexpr auto mild = QualityCategory::mild_gibberish;

}  // namespace

TEST_CASE("label and category names") {
    for (auto l : {L, C, R}) CHECK(parse_political_label(to_string(l)) == l);
    for (auto q : {clean, mild, QualityCategory::word_salad, QualityCategory::noise})
        CHECK(parse_quality_category(to_string(q)) == q);
    CHECK(quality_score(clean) == 3);
    CHECK(quality_score(mild) == 2);
    CHECK(quality_score(QualityCategory::word_salad) == 1);
    CHECK(quality_score(QualityCategory::noise) == 0);
    CHECK_THROWS_AS(parse_political_label("far-left"), ArgumentError);
    CHECK_THROWS_AS(parse_quality_category("garbled"), ArgumentError);
}

TEST_CASE("bias proportions") {
    std::vector<ArticleLabelRecord> even;
    add_articles(even, 0, L, 5);
    add_articles(even, 0, C, 5);
    add_articles(even, 0, R, 5);
    const auto e = bias_proportions(even, 0);
    CHECK(e.left == 1.0 / 3);
    CHECK(e.center == 1.0 / 3);
    CHECK(e.right == 1.0 / 3);

    // Pretrained-generator shares of 47.9% center and 46.8% right.
    std::vector<ArticleLabelRecord> pre;
    add_articles(pre, -1, C, 479);
    add_articles(pre, -1, R, 468);
    add_articles(pre, -1, L, 53);
    const auto p = bias_proportions(pre, -1);
    CHECK_THAT(p.center, WithinAbs(0.479, 1e-15));
    CHECK_THAT(p.right, WithinAbs(0.468, 1e-15));
    CHECK_THAT(p.left + p.center + p.right, WithinAbs(1.0, 1e-15));
    CHECK(p.of(R) == p.right);

    std::vector<ArticleLabelRecord> one;
    add_articles(one, 2, R, 1);
    const auto o = bias_proportions(one, 2);
    CHECK(o.left == 0.0);
    CHECK(o.center == 0.0);
    CHECK(o.right == 1.0);
    CHECK_THROWS_AS(bias_proportions(one, 3), NoDataError);
}

TEST_CASE("quality index") {
    std::vector<SentenceQualityRecord> r;
    add_article(r, 0, "a", {clean, clean, clean});
    add_article(r, 0, "b", {clean, clean, mild});
    add_article(r, 0, "c", {QualityCategory::noise});
    CHECK(quality_index(r, 0, "a") == 3.0);
    CHECK(quality_index(r, 0, "b") == 8.0 / 3.0);
    CHECK(quality_index(r, 0, "c") == 0.0);
    CHECK_THROWS_AS(quality_index(r, 0, "zz"), NoDataError);
    CHECK_THROWS_AS(quality_index(r, 1, "a"), NoDataError);
}

TEST_CASE("bias series over generations") {
    // 53.7% right at gen 0 and 67.6% at gen 6; intermediate values made up.
    const int right[] = {537, 600, 676};
    std::vector<ArticleLabelRecord> recs;
    for (int g = 0; g < 3; ++g) {
        add_articles(recs, g, R, right[g]);
        add_articles(recs, g, C, (1000 - right[g]) / 2);
        add_articles(recs, g, L, 1000 - right[g] - (1000 - right[g]) / 2);
    }
    const auto s = build_bias_series(recs, R);
    CHECK(s.generations == std::vector<std::int64_t>{0, 1, 2});
    CHECK(s.series.label == "right_prop");
    REQUIRE(s.series.values.size() == 3);
    CHECK_THAT(s.series.values[0], WithinAbs(0.537, 1e-15));
    CHECK_THAT(s.series.values[1], WithinAbs(0.600, 1e-15));
    CHECK_THAT(s.series.values[2], WithinAbs(0.676, 1e-15));

    // Record order does not matter.
    auto shuffled = recs;
    std::mt19937_64 eng(5);
    std::shuffle(shuffled.begin(), shuffled.end(), eng);
    CHECK(build_bias_series(shuffled, R).series.values == s.series.values);

    std::ostringstream out;
    write_outcome_csv(out, s);
    CHECK(out.str().rfind("version,y:right_prop\n0,0.537", 0) == 0);
}

TEST_CASE("quality series weights articles equally") {
    std::vector<SentenceQualityRecord> r;
    for (int g = 0; g < 4; ++g) {
        add_article(r, g, "x", {clean, clean});
        add_article(r, g, "y", {clean});
    }
    const auto s = build_quality_series(r);
    CHECK(s.series.values == std::vector<double>(4, 3.0));

    // A long clean article and a short noisy one: mean of 3 and 0, not the
    // sentence-weighted 30/11.
    std::vector<SentenceQualityRecord> w;
    add_article(w, 0, "long", {clean, clean, clean, clean, clean, clean, clean, clean, clean, clean});
    add_article(w, 0, "short", {QualityCategory::noise});
    CHECK(build_quality_series(w).series.values[0] == 1.5);
}

TEST_CASE("coverage gaps and empty input") {
    std::vector<ArticleLabelRecord> recs;
    for (int g : {0, 1, 2, 4, 5}) add_articles(recs, g, C, 2);
    try {
        build_bias_series(recs, C);
        FAIL("expected a gap error");
    } catch (const DataError& e) {
        CHECK_THAT(std::string(e.what()), ContainsSubstring("missing generations: 3"));
    }
    CHECK_THROWS_AS(build_bias_series({}, C), NoDataError);
    CHECK_THROWS_AS(build_quality_series({}), NoDataError);
}

TEST_CASE("JSON-lines readers") {
    std::istringstream good(
        "{\"generation\": 0, \"article_id\": \"a1\", \"label\": \"right\"}\n"
        "\n"
        "{\"generation\": 0, \"article_id\": \"a2\", \"label\": \"left\"}\n");
    const auto recs = parse_article_labels(good);
    REQUIRE(recs.size() == 2);
    CHECK(recs[1].label == L);

    auto expect_line = [](const std::string& text, std::size_t line, bool quality) {
        std::istringstream in(text);
        try {
            if (quality) {
                parse_sentence_quality(in);
            } else {
                parse_article_labels(in);
            }
            FAIL("expected schema error");
        } catch (const SchemaError& e) {
            CHECK(e.row() == line);
            CHECK_THAT(std::string(e.what()), ContainsSubstring("line " + std::to_string(line)));
        }
    };
    const std::string ok = "{\"generation\": 1, \"article_id\": \"a\", \"label\": \"center\"}\n";
    expect_line(ok + "{\"generation\": 1, \"article_id\": \"b\"}\n", 2, false);
    expect_line(ok + ok, 2, false);
    expect_line(ok + "{\"generation\": \"1\", \"article_id\": \"b\", \"label\": \"left\"}\n", 2, false);
    expect_line(ok + "{\"generation\": 1, \"article_id\": \"b\", \"label\": \"up\"}\n", 2, false);
    expect_line("not json\n", 1, false);
    expect_line("[1, 2]\n", 1, false);

    std::istringstream q(
        "{\"generation\": 2, \"article_id\": \"a\", \"sentence_index\": 0, \"category\": \"word_salad\"}\n");
    const auto qs = parse_sentence_quality(q);
    REQUIRE(qs.size() == 1);
    CHECK(qs[0].category == QualityCategory::word_salad);
    expect_line("{\"generation\": 2, \"article_id\": \"a\", \"sentence_index\": -1, \"category\": \"clean\"}\n", 1,
                true);
    CHECK_THROWS_AS(load_article_labels("/nonexistent/labels.jsonl"), DataError);
}
