#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ironylab/corpus.hpp"
#include "ironylab/embedding.hpp"

namespace ironylab {

// --- detection ----------------------------------------------------------

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  bool precision_degenerate = false;  // no predictions of this class
  bool recall_degenerate = false;     // no gold items of this class
  std::size_t support = 0;
};

struct ClassificationReport {
  ClassMetrics ironic;
  ClassMetrics non_ironic;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;  // with Ironic as the positive class
  bool degenerate = false;

  std::size_t size() const noexcept { return tp + fp + fn + tn; }
};

ClassificationReport classification_report(std::span<const Label> preds, std::span<const Label> golds);

// --- readability --------------------------------------------------------

struct ReadabilityCounts {
  std::size_t words = 0;
  std::size_t sentences = 0;
  std::size_t syllables = 0;
};

// Vowel groups (aeiouy) in the lowercased letters, minus a silent final "e"
// (kept after "l"), at least one.
std::size_t count_syllables(std::string_view word);
ReadabilityCounts readability_counts(std::string_view text);

// 206.835 - 1.015 * words/sentences - 84.6 * syllables/words, unclamped.
// Throws NoWords.
double flesch_reading_ease(std::string_view text);

// Population standard deviation. Throws TooFewScores below two values.
double std_dev(std::span<const double> scores);
double mean(std::span<const double> values);

// fre_mean/100 + human_mean/3. Throws HumanScoreOutOfRange unless
// human_mean is in [0, 3].
double b_measure(double fre_mean, double human_mean);

// --- human rubric -------------------------------------------------------

inline constexpr std::size_t kRubricCriteria = 3;

struct RubricAnnotation {
  std::string item_id;
  std::string annotator_id;
  std::vector<int> criteria;  // contextual accuracy, internal consistency, clarity
};

// Sum of the criteria. Throws MalformedAnnotation unless there are exactly
// three 0/1 values.
int rubric_score(const RubricAnnotation& a);

struct HumanAggregate {
  std::map<std::string, double> item_scores;  // mean over annotators
  std::optional<double> mean;                 // empty when nothing is annotated
};

HumanAggregate human_aggregate(std::span<const RubricAnnotation> annotations);

struct ReasoningReport {
  std::size_t reasons = 0;
  std::optional<double> fre_mean;  // F
  std::optional<double> fre_std;   // S, needs two reasons
  std::optional<double> human_mean;  // H
  std::optional<double> b;           // B, only with H
  bool human_pending = true;
};

// Reasons that contain no words are skipped.
ReasoningReport reasoning_report(std::span<const std::string> reasons, const std::optional<double>& human_mean);

// --- similarity ---------------------------------------------------------

// dot(a,b) / (|a| |b|), clamped to [-1, 1]. Throws DimensionMismatch or
// ZeroVector.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

inline constexpr std::size_t kHistogramBins = 10;

struct RangeBounds {
  double moderate = 0.6;          // [0, moderate) is "notable"
  double almost_identical = 0.8;  // [almost_identical, 1] is "almost identical"
};

struct ThreeRangeCounts {
  std::size_t notable = 0;
  std::size_t moderate = 0;
  std::size_t almost_identical = 0;

  bool operator==(const ThreeRangeCounts&) const = default;
};

// Negative scores count as 0 in these views and set *clipped.
std::array<std::size_t, kHistogramBins> histogram(std::span<const double> scores, bool* clipped = nullptr);
ThreeRangeCounts three_range(std::span<const double> scores, const RangeBounds& bounds = {}, bool* clipped = nullptr);

struct SimilarityTriple {
  std::string item_id;
  double literal_intended = 0.0;
  double literal_understanding = 0.0;
  double intended_understanding = 0.0;
};

struct UnderstandingItem {
  std::string item_id;
  std::string literal;  // the statement itself
  std::optional<std::string> intended;
  std::optional<std::string> rephrase;  // the model's understanding
};

struct SimilarityReport {
  std::vector<std::string> item_ids;
  std::vector<double> scores;  // cosine(rephrase, intended), unclipped
  std::array<std::size_t, kHistogramBins> histogram{};
  ThreeRangeCounts three_range;
  std::vector<SimilarityTriple> triples;
  std::size_t missing_rephrase = 0;
  std::size_t missing_intended = 0;
  bool clipped_negative = false;
  std::string embedder;
};

// Items lacking a rephrase or an intended meaning are skipped and counted.
// Embedding failures surface as EmbedderUnavailable.
SimilarityReport understanding_scores(std::span<const UnderstandingItem> items, Embedder& embedder,
                                      const RangeBounds& bounds = {});

}  // namespace ironylab
