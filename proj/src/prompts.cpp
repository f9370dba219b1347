#include "ironylab/prompts.hpp"

#include <charconv>
#include <fstream>

#include <json.hpp>

#include "ironylab/error.hpp"
#include "ironylab/text.hpp"

namespace ironylab {

namespace {

constexpr std::string_view kHeader = "Determine whether [input_comment] include irony.";
constexpr std::string_view kStepsHeading = "Steps to follow:";
constexpr std::string_view kThinkStepByStep = "Let's think step by step.";
constexpr std::string_view kReasonStep = "Please write the reason why you think this statement has irony.";
constexpr std::string_view kRephraseStep = "Please rephrase this statement without the irony with a new line.";
constexpr std::string_view kJsonStep =
    "the result in only a JSON format where the key is \"irony\" and the value is 1 for irony, 0 for No-irony.";

PromptTemplate make(std::string name, Strategy strategy, std::vector<std::string> preamble,
                    std::vector<std::string> lead_steps, bool with_reasoning = true) {
  PromptTemplate t;
  t.name = std::move(name);
  t.strategy = strategy;
  t.preamble = std::move(preamble);
  t.steps = std::move(lead_steps);
  if (with_reasoning) {
    t.steps.emplace_back(kReasonStep);
    t.steps.emplace_back(kRephraseStep);
  }
  t.steps.emplace_back(kJsonStep);
  return t;
}

std::string format_threshold(double threshold) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, threshold);
  return std::string(buf, res.ptr);
}

std::string single_line(std::string_view s) {
  std::string out;
  for (const auto token : text::split_whitespace(s)) {
    if (!out.empty()) out.push_back(' ');
    out.append(token);
  }
  return out;
}

// Exemplar text must never introduce a second input slot.
std::string defuse_slot(std::string s) {
  std::size_t pos = 0;
  while ((pos = s.find(kInputSlot, pos)) != std::string::npos) {
    s.replace(pos, kInputSlot.size(), "[input comment]");
  }
  return s;
}

std::string exemplar_step(std::size_t index, const Exemplar& e) {
  return "Example " + std::to_string(index) + ": Statement: " + text::quote(defuse_slot(e.text)) +
         " Reasoning: " + defuse_slot(single_line(e.reasoning)) + " Result: {\"irony\": " +
         std::to_string(to_int(e.label)) + "}";
}

PromptTemplate auto_cot_with(std::vector<std::string> example_steps) {
  std::vector<std::string> steps{"Study the following samples."};
  for (auto& s : example_steps) steps.push_back(std::move(s));
  steps.emplace_back(kThinkStepByStep);
  return make("auto-cot", Strategy::AutoCot, {std::string(kHeader)}, std::move(steps));
}

}  // namespace

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::IdadpClarify: return "idadp-clarify";
    case Strategy::IdadpFeature: return "idadp-feature";
    case Strategy::IdadpProbabilistic: return "idadp-probabilistic";
    case Strategy::ZeroCot: return "zero-cot";
    case Strategy::AutoCot: return "auto-cot";
    case Strategy::Ape: return "ape";
    case Strategy::Ps: return "ps";
    case Strategy::PsPlus: return "ps-plus";
    case Strategy::Plain: return "plain";
  }
  return "plain";
}

std::optional<Strategy> strategy_from_string(std::string_view name) {
  for (Strategy s : {Strategy::IdadpClarify, Strategy::IdadpFeature, Strategy::IdadpProbabilistic, Strategy::ZeroCot,
                     Strategy::AutoCot, Strategy::Ape, Strategy::Ps, Strategy::PsPlus, Strategy::Plain}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::string PromptTemplate::text() const {
  std::string out;
  for (const auto& line : preamble) {
    out += line;
    out += '\n';
  }
  out += kStepsHeading;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    out += '\n';
    out += std::to_string(i + 1);
    out += ". ";
    out += steps[i];
  }
  return out;
}

bool satisfies_invariants(const PromptTemplate& t) {
  const std::string body = t.text();
  const std::size_t first = body.find(kInputSlot);
  if (first == std::string::npos || body.find(kInputSlot, first + 1) != std::string::npos) return false;
  if (t.steps.empty()) return false;
  const std::string& last = t.steps.back();
  return last.find("JSON") != std::string::npos && last.find("\"irony\"") != std::string::npos;
}

std::string Feature::phrase() const { return name.empty() ? description : name + " " + description; }

std::vector<PromptTemplate> idadp_prompts(const KnowledgeBundle& knowledge, double threshold) {
  validate(knowledge);
  if (knowledge.features.size() < 2) {
    throw Error(ErrorCode::InvalidKnowledge, "the feature prompt needs two irony features");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "threshold must lie in (0, 1)");
  }
  const std::vector<std::string> preamble{std::string(kHeader), "Let's think step by step"};

  std::vector<PromptTemplate> out;
  out.push_back(make("idadp-clarify", Strategy::IdadpClarify, preamble,
                     {"Identify the irony: Determine which part of the sentence conveys the opposite of what is meant.",
                      "Clarify the intent: Express the actual meaning directly"}));
  out.push_back(make("idadp-feature", Strategy::IdadpFeature, preamble,
                     {"The text is not ironic if the statement does not contain a " +
                          knowledge.features[0].phrase() + ".",
                      "The text is not ironic if There is no unexpected outcome or " +
                          knowledge.features[1].phrase() + "."}));
  PromptTemplate prob = make("idadp-probabilistic", Strategy::IdadpProbabilistic, preamble,
                             {"Please provide a probabilistic score ranging from 0 to 1, representing the likelihood "
                              "that the text is ironic.",
                              "The threshold for irony detection is set to " + format_threshold(threshold) + "."});
  prob.expects_probability = true;
  out.push_back(std::move(prob));
  return out;
}

PromptTemplate baseline_prompt(Strategy strategy, std::span<const Exemplar> exemplars) {
  const std::vector<std::string> header{std::string(kHeader)};
  switch (strategy) {
    case Strategy::ZeroCot:
      return make("zero-cot", Strategy::ZeroCot, header, {std::string(kThinkStepByStep)});
    case Strategy::AutoCot: {
      if (exemplars.size() != kAutoCotExemplars) {
        throw Error(ErrorCode::MissingExemplars, "Auto-CoT needs exactly 6 exemplars, got " +
                                                     std::to_string(exemplars.size()));
      }
      std::vector<std::string> steps;
      for (std::size_t i = 0; i < exemplars.size(); ++i) steps.push_back(exemplar_step(i + 1, exemplars[i]));
      return auto_cot_with(std::move(steps));
    }
    case Strategy::Ape:
      return make("ape", Strategy::Ape, header,
                  {"Let's work this out in a step-by-step way to be sure we have the right answer."});
    case Strategy::Ps:
      return make("ps", Strategy::Ps, header,
                  {"Let's first understand the problem and devise a plan to solve the problem",
                   "let's carry out the plan and solve the problem step by step."});
    case Strategy::PsPlus:
      return make("ps-plus", Strategy::PsPlus, header,
                  {"Let's first understand the problem and check if contains a discrepancy between what is said and "
                   "what is meant",
                   "let's carry out the plan and pay attention to finding ironic words or phases.",
                   "solve the problem step by step."});
    case Strategy::Plain:
      return make("plain", Strategy::Plain, {"Determine whether [input_comment] includes irony."}, {},
                  /*with_reasoning=*/false);
    case Strategy::IdadpClarify:
    case Strategy::IdadpFeature:
    case Strategy::IdadpProbabilistic:
      break;
  }
  throw Error(ErrorCode::InvalidConfig, std::string(to_string(strategy)) + " is not a baseline strategy");
}

PromptTemplate auto_cot_skeleton() {
  std::vector<std::string> steps;
  for (std::size_t i = 1; i <= kAutoCotExemplars; ++i) steps.push_back("[Example " + std::to_string(i) + "]");
  return auto_cot_with(std::move(steps));
}

std::vector<PromptTemplate> catalog() {
  std::vector<PromptTemplate> all = idadp_prompts(default_knowledge());
  all.push_back(baseline_prompt(Strategy::ZeroCot));
  all.push_back(auto_cot_skeleton());
  for (Strategy s : {Strategy::Ape, Strategy::Ps, Strategy::PsPlus, Strategy::Plain}) all.push_back(baseline_prompt(s));
  return all;
}

void export_catalog(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest = nlohmann::json::array();
  for (const auto& t : catalog()) {
    const std::string file = t.name + ".txt";
    text::write_file_atomic(dir / file, t.text() + "\n");
    manifest.push_back({{"name", t.name},
                        {"strategy", std::string(to_string(t.strategy))},
                        {"expects_probability", t.expects_probability},
                        {"file", file}});
  }
  text::write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string render(const PromptTemplate& t, std::string_view statement_text) {
  std::string body = t.text();
  const std::size_t pos = body.find(kInputSlot);
  if (pos == std::string::npos) return body;
  body.replace(pos, kInputSlot.size(), text::quote(statement_text));
  return body;
}

}  // namespace ironylab
