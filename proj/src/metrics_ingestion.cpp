#include "biasamp/metrics_ingestion.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "biasamp/errors.hpp"

namespace biasamp {

std::string_view to_string(PoliticalLabel label) noexcept {
    switch (label) {
        case PoliticalLabel::left: return "left";
        case PoliticalLabel::center: return "center";
        case PoliticalLabel::right: return "right";
    }
    return "left";
}

std::string_view to_string(QualityCategory category) noexcept {
    switch (category) {
        case QualityCategory::clean: return "clean";
        case QualityCategory::mild_gibberish: return "mild_gibberish";
        case QualityCategory::word_salad: return "word_salad";
        case QualityCategory::noise: return "noise";
    }
    return "noise";
}

PoliticalLabel parse_political_label(std::string_view text) {
    if (text == "left") return PoliticalLabel::left;
    if (text == "center") return PoliticalLabel::center;
    if (text == "right") return PoliticalLabel::right;
    throw ArgumentError("unknown political label '" + std::string(text) + "' (expected left, center or right)");
}

QualityCategory parse_quality_category(std::string_view text) {
    if (text == "clean") return QualityCategory::clean;
    if (text == "mild_gibberish") return QualityCategory::mild_gibberish;
    if (text == "word_salad") return QualityCategory::word_salad;
    if (text == "noise") return QualityCategory::noise;
    throw ArgumentError("unknown quality category '" + std::string(text) +
                        "' (expected clean, mild_gibberish, word_salad or noise)");
}

int quality_score(QualityCategory category) noexcept {
    switch (category) {
        case QualityCategory::clean: return 3;
        case QualityCategory::mild_gibberish: return 2;
        case QualityCategory::word_salad: return 1;
        case QualityCategory::noise: return 0;
    }
    return 0;
}

double BiasProportions::of(PoliticalLabel side) const noexcept {
    switch (side) {
        case PoliticalLabel::left: return left;
        case PoliticalLabel::center: return center;
        case PoliticalLabel::right: return right;
    }
    return 0.0;
}

namespace {

using nlohmann::json;

[[noreturn]] void line_fail(const std::string& what, std::size_t line_no) {
    throw SchemaError("labels: " + what + " (line " + std::to_string(line_no) + ")", line_no, 0);
}

// Calls fn(json, line_no) for each non-blank line.
template <class Fn>
void for_each_json_line(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json doc;
        try {
            doc = json::parse(line);
        } catch (const json::parse_error& e) {
            line_fail(std::string("invalid JSON: ") + e.what(), line_no);
        }
        if (!doc.is_object()) line_fail("record must be a JSON object", line_no);
        try {
            fn(doc, line_no);
        } catch (const json::exception& e) {
            line_fail(e.what(), line_no);
        } catch (const ArgumentError& e) {
            line_fail(e.what(), line_no);
        }
    }
}

const json& field(const json& doc, const char* name, std::size_t line_no) {
    const auto it = doc.find(name);
    if (it == doc.end()) line_fail(std::string("missing field '") + name + "'", line_no);
    return *it;
}

std::int64_t int_field(const json& doc, const char* name, std::size_t line_no) {
    const json& v = field(doc, name, line_no);
    if (!v.is_number_integer()) line_fail(std::string("field '") + name + "' must be an integer", line_no);
    return v.get<std::int64_t>();
}

std::string string_field(const json& doc, const char* name, std::size_t line_no) {
    const json& v = field(doc, name, line_no);
    if (!v.is_string()) line_fail(std::string("field '") + name + "' must be a string", line_no);
    return v.get<std::string>();
}

}  // namespace

std::vector<ArticleLabelRecord> parse_article_labels(std::istream& in) {
    std::vector<ArticleLabelRecord> out;
    std::set<std::pair<std::int64_t, std::string>> seen;
    for_each_json_line(in, [&](const json& doc, std::size_t line_no) {
        ArticleLabelRecord r{int_field(doc, "generation", line_no), string_field(doc, "article_id", line_no),
                             parse_political_label(string_field(doc, "label", line_no))};
        if (!seen.emplace(r.generation, r.article_id).second) {
            line_fail("duplicate article '" + r.article_id + "' in generation " + std::to_string(r.generation),
                      line_no);
        }
        out.push_back(std::move(r));
    });
    return out;
}

std::vector<SentenceQualityRecord> parse_sentence_quality(std::istream& in) {
    std::vector<SentenceQualityRecord> out;
    for_each_json_line(in, [&](const json& doc, std::size_t line_no) {
        const std::int64_t idx = int_field(doc, "sentence_index", line_no);
        if (idx < 0) line_fail("sentence_index must be non-negative", line_no);
        out.push_back(SentenceQualityRecord{int_field(doc, "generation", line_no),
                                            string_field(doc, "article_id", line_no),
                                            static_cast<std::size_t>(idx),
                                            parse_quality_category(string_field(doc, "category", line_no))});
    });
    return out;
}

std::vector<ArticleLabelRecord> load_article_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open labels file " + path.string());
    return parse_article_labels(in);
}

std::vector<SentenceQualityRecord> load_sentence_quality(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open labels file " + path.string());
    return parse_sentence_quality(in);
}

BiasProportions bias_proportions(const std::vector<ArticleLabelRecord>& records, std::int64_t generation) {
    std::size_t counts[3] = {0, 0, 0};
    for (const auto& r : records) {
        if (r.generation == generation) ++counts[static_cast<int>(r.label)];
    }
    const std::size_t n = counts[0] + counts[1] + counts[2];
    if (n == 0) throw NoDataError("no article labels for generation " + std::to_string(generation));
    const double total = static_cast<double>(n);
    return {static_cast<double>(counts[0]) / total, static_cast<double>(counts[1]) / total,
            static_cast<double>(counts[2]) / total};
}

double quality_index(const std::vector<SentenceQualityRecord>& records, std::int64_t generation,
                     const std::string& article_id) {
    long long sum = 0;
    std::size_t n = 0;
    for (const auto& r : records) {
        if (r.generation == generation && r.article_id == article_id) {
            sum += quality_score(r.category);
            ++n;
        }
    }
    if (n == 0) {
        throw NoDataError("no sentences for article '" + article_id + "' in generation " +
                          std::to_string(generation));
    }
    return static_cast<double>(sum) / static_cast<double>(n);
}

namespace {

std::vector<std::int64_t> contiguous_range(const std::set<std::int64_t>& present) {
    if (present.empty()) throw NoDataError("no records");
    std::vector<std::int64_t> gens;
    std::string missing;
    for (std::int64_t g = *present.begin(); g <= *present.rbegin(); ++g) {
        if (present.contains(g)) {
            gens.push_back(g);
        } else {
            missing += (missing.empty() ? "" : ", ") + std::to_string(g);
        }
    }
    if (!missing.empty()) throw DataError("generation coverage has gaps; missing generations: " + missing);
    return gens;
}

}  // namespace

OutcomeSeries build_bias_series(const std::vector<ArticleLabelRecord>& records, PoliticalLabel side) {
    std::map<std::int64_t, std::array<std::size_t, 3>> counts;
    for (const auto& r : records) ++counts[r.generation][static_cast<int>(r.label)];
    std::set<std::int64_t> present;
    for (const auto& [g, c] : counts) present.insert(g);
    OutcomeSeries out{contiguous_range(present), Series{{}, std::string(to_string(side)) + "_prop"}};
    for (std::int64_t g : out.generations) {
        const auto& c = counts[g];
        const double total = static_cast<double>(c[0] + c[1] + c[2]);
        out.series.values.push_back(static_cast<double>(c[static_cast<int>(side)]) / total);
    }
    return out;
}

OutcomeSeries build_quality_series(const std::vector<SentenceQualityRecord>& records) {
    // generation -> article -> (score sum, sentence count)
    std::map<std::int64_t, std::map<std::string, std::pair<long long, std::size_t>>> acc;
    for (const auto& r : records) {
        auto& slot = acc[r.generation][r.article_id];
        slot.first += quality_score(r.category);
        ++slot.second;
    }
    std::set<std::int64_t> present;
    for (const auto& [g, a] : acc) present.insert(g);
    OutcomeSeries out{contiguous_range(present), Series{{}, "quality_index"}};
    for (std::int64_t g : out.generations) {
        double sum = 0.0;
        for (const auto& [id, s] : acc[g]) sum += static_cast<double>(s.first) / static_cast<double>(s.second);
        out.series.values.push_back(sum / static_cast<double>(acc[g].size()));
    }
    return out;
}

void write_outcome_csv(std::ostream& out, const OutcomeSeries& series) {
    out << "version,y:" << series.series.label << '\n';
    char buf[32];
    for (std::size_t i = 0; i < series.generations.size(); ++i) {
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, series.series.values[i],
                                       std::chars_format::general, 17);
        out << series.generations[i] << ',';
        out.write(buf, end - buf);
        out << '\n';
    }
}

}  // namespace biasamp
