#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ironylab/corpus.hpp"

namespace ironylab {

// Closed vocabulary; the string forms are written to result logs.
enum class ParseNote {
  NoJson,                  // "no-json"
  CoercedString,           // "coerced-string"
  EmptyOutput,             // "empty-output"
  ThresholdOverridesJson,  // "threshold-overrides-json"
  FenceStripped,           // "fence-stripped"
  QuoteNormalized,         // "quote-normalized"
  JsonLabelFallback,       // "json-label-fallback": probability prompt answered with JSON only
};

std::string_view to_string(ParseNote n) noexcept;
std::optional<ParseNote> parse_note_from_string(std::string_view s);

inline constexpr double kDefaultThreshold = 0.7;

struct TaskOutput {
  std::optional<Label> label;
  std::optional<double> probability;
  std::optional<std::string> reason;
  std::optional<std::string> rephrase;
  std::string raw;
  std::vector<ParseNote> parse_notes;

  bool operator==(const TaskOutput&) const = default;
};

struct LabelExtraction {
  std::optional<Label> label;
  std::vector<ParseNote> notes;
};

struct ProbabilityExtraction {
  std::optional<double> probability;
  std::optional<Label> label;
};

struct Sections {
  std::optional<std::string> reason;
  std::optional<std::string> rephrase;
};

// Strips markdown code fences and folds typographic quotes to ASCII.
std::string preprocess(std::string_view raw, std::vector<ParseNote>* notes = nullptr);

// Last well-formed JSON object carrying an "irony" key wins.
LabelExtraction extract_label(std::string_view raw);

// Canonical form of a label, {"irony": 0|1}.
std::string serialize_label(Label label);

// First number in [0,1] after a score cue ("score", "probability",
// "likelihood") or under such a key inside a JSON object. Ironic iff p >= threshold.
// With no score but a JSON label, probability is empty and the JSON label
// is returned.
ProbabilityExtraction extract_probability(std::string_view raw, double threshold = kDefaultThreshold);

Sections extract_sections(std::string_view raw);

TaskOutput normalize(std::string_view raw, bool expects_probability, double threshold = kDefaultThreshold);

}  // namespace ironylab
