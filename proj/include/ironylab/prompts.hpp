#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ironylab/corpus.hpp"

namespace ironylab {

enum class Strategy {
  IdadpClarify,
  IdadpFeature,
  IdadpProbabilistic,
  ZeroCot,
  AutoCot,
  Ape,
  Ps,
  PsPlus,
  Plain,
};

std::string_view to_string(Strategy s) noexcept;
std::optional<Strategy> strategy_from_string(std::string_view name);

inline constexpr std::string_view kInputSlot = "[input_comment]";

// A prompt is a short preamble (holding the input slot) followed by a
// numbered "Steps to follow:" list. text() is the canonical serialization
// used for golden files, hashing and rendering.
struct PromptTemplate {
  std::string name;
  Strategy strategy = Strategy::Plain;
  std::vector<std::string> preamble;
  std::vector<std::string> steps;
  bool expects_probability = false;

  std::string text() const;
  bool operator==(const PromptTemplate&) const = default;
};

// Single slot, final step asks for the {"irony": 1/0} JSON shape.
bool satisfies_invariants(const PromptTemplate& t);

struct Feature {
  std::string name;         // e.g. "discrepancy"
  std::string description;  // e.g. "between what is said and what is meant"

  // "discrepancy between what is said and what is meant"
  std::string phrase() const;
  bool operator==(const Feature&) const = default;
};

struct KnowledgeBundle {
  std::string definition;
  std::vector<Feature> features;
  std::vector<std::string> procedure;

  bool operator==(const KnowledgeBundle&) const = default;
};

// Throws InvalidKnowledge when a field is empty or an entry runs past two
// sentences.
void validate(const KnowledgeBundle& k);

struct Exemplar {
  std::string text;
  std::string reasoning;
  Label label = Label::NonIronic;

  bool operator==(const Exemplar&) const = default;
};

inline constexpr std::size_t kAutoCotExemplars = 6;

// The four interaction patterns used to elicit irony knowledge, as
// (pattern-name, prompt-text) pairs.
std::vector<std::pair<std::string, std::string>> knowledge_extraction_prompts();

KnowledgeBundle default_knowledge();

// Builds a bundle from the model's answers to knowledge_extraction_prompts(),
// keyed by pattern name. Missing or unusable answers fall back to the
// matching default_knowledge() field.
KnowledgeBundle parse_extracted_knowledge(const std::vector<std::pair<std::string, std::string>>& answers);

// Clarify, feature and probabilistic prompts, in that order.
std::vector<PromptTemplate> idadp_prompts(const KnowledgeBundle& knowledge, double threshold = 0.7);

// Zero-CoT, Auto-CoT, APE, PS, PS+ or Plain. Auto-CoT requires exactly six
// exemplars (MissingExemplars otherwise); other strategies ignore them.
PromptTemplate baseline_prompt(Strategy strategy, std::span<const Exemplar> exemplars = {});

// Auto-CoT with "[Example k]" placeholders, for the exported catalog.
PromptTemplate auto_cot_skeleton();

// All nine templates with frozen knowledge and placeholder exemplars.
std::vector<PromptTemplate> catalog();

// Writes <name>.txt per template plus manifest.json.
void export_catalog(const std::filesystem::path& dir);

std::string render(const PromptTemplate& t, std::string_view statement_text);
inline std::string render(const PromptTemplate& t, const StatementRecord& s) { return render(t, s.text); }

}  // namespace ironylab
