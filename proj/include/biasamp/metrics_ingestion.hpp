#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "biasamp/hac_regression.hpp"

namespace biasamp {

enum class PoliticalLabel { left, center, right };
enum class QualityCategory { clean, mild_gibberish, word_salad, noise };

std::string_view to_string(PoliticalLabel label) noexcept;
std::string_view to_string(QualityCategory category) noexcept;
PoliticalLabel parse_political_label(std::string_view text);
QualityCategory parse_quality_category(std::string_view text);

/// 3 for clean down to 0 for noise.
int quality_score(QualityCategory category) noexcept;

struct ArticleLabelRecord {
    std::int64_t generation;
    std::string article_id;
    PoliticalLabel label;
};

struct SentenceQualityRecord {
    std::int64_t generation;
    std::string article_id;
    std::size_t sentence_index;
    QualityCategory category;
};

/// JSON-lines readers. Field names: generation, article_id, label /
/// generation, article_id, sentence_index, category. Errors name the line.
std::vector<ArticleLabelRecord> parse_article_labels(std::istream& in);
std::vector<SentenceQualityRecord> parse_sentence_quality(std::istream& in);
std::vector<ArticleLabelRecord> load_article_labels(const std::filesystem::path& path);
std::vector<SentenceQualityRecord> load_sentence_quality(const std::filesystem::path& path);

struct BiasProportions {
    double left;
    double center;
    double right;

    double of(PoliticalLabel side) const noexcept;
};

BiasProportions bias_proportions(const std::vector<ArticleLabelRecord>& records, std::int64_t generation);

/// Mean sentence score of one article.
double quality_index(const std::vector<SentenceQualityRecord>& records, std::int64_t generation,
                     const std::string& article_id);

/// Per-generation outcome over a contiguous generation range.
struct OutcomeSeries {
    std::vector<std::int64_t> generations;
    Series series;
};

/// Proportion of `side` per generation.
OutcomeSeries build_bias_series(const std::vector<ArticleLabelRecord>& records, PoliticalLabel side);

/// Mean over articles of per-article quality indices, per generation.
OutcomeSeries build_quality_series(const std::vector<SentenceQualityRecord>& records);

/// `version,y:<label>` rows, ready to join into a trajectory file.
void write_outcome_csv(std::ostream& out, const OutcomeSeries& series);

}  // namespace biasamp
