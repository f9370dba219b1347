#include <algorithm>
#include <cctype>

#include "ironylab/error.hpp"
#include "ironylab/prompts.hpp"
#include "ironylab/text.hpp"

namespace ironylab {

namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

// Splits on runs of .!? followed by whitespace or end of text. Closing
// quotes directly after the terminator stay with the sentence.
std::vector<std::string> sentences(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!is_terminator(s[i])) continue;
    std::size_t j = i;
    while (j < s.size() && is_terminator(s[j])) ++j;
    while (j < s.size() && (s[j] == '"' || s[j] == '\'' || s[j] == ')')) ++j;
    if (j == s.size() || std::isspace(static_cast<unsigned char>(s[j]))) {
      const auto piece = text::trim(s.substr(start, j - start));
      if (!piece.empty()) out.emplace_back(piece);
      start = j;
    }
    i = j == 0 ? 0 : j - 1;
  }
  const auto tail = text::trim(s.substr(std::min(start, s.size())));
  if (!tail.empty()) out.emplace_back(tail);
  return out;
}

std::string first_sentences(std::string_view s, std::size_t n) {
  const auto parts = sentences(s);
  std::string out;
  for (std::size_t i = 0; i < parts.size() && i < n; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += parts[i];
  }
  return out;
}

std::string strip_markdown(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '*' || s[i] == '`') continue;
    out.push_back(s[i]);
  }
  return std::string(text::trim(out));
}

// Returns the body of an enumerated or bulleted line, or nullopt for prose.
std::optional<std::string> list_item(std::string_view line) {
  line = text::trim(line);
  std::size_t i = 0;
  if (line.starts_with("- ") || line.starts_with("* ") || line.starts_with("\xE2\x80\xA2")) {
    i = line.starts_with("\xE2\x80\xA2") ? 3 : 2;
  } else {
    if (text::find_ci(line, "step ") == 0) i = 5;
    const std::size_t digits_start = i;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i == digits_start || i >= line.size() || (line[i] != '.' && line[i] != ')' && line[i] != ':')) {
      return std::nullopt;
    }
    ++i;
  }
  std::string body = strip_markdown(line.substr(i));
  if (body.empty() || body.back() == ':') return std::nullopt;
  return body;
}

std::vector<std::string> list_items(std::string_view answer) {
  std::vector<std::string> items;
  std::size_t pos = 0;
  while (pos <= answer.size()) {
    std::size_t nl = answer.find('\n', pos);
    if (nl == std::string_view::npos) nl = answer.size();
    if (auto item = list_item(answer.substr(pos, nl - pos))) items.push_back(std::move(*item));
    pos = nl + 1;
  }
  return items;
}

Feature to_feature(std::string item) {
  item = first_sentences(item, 1);
  while (!item.empty() && (is_terminator(item.back()) || item.back() == ',')) item.pop_back();
  Feature f;
  const auto colon = item.find(':');
  if (colon != std::string::npos && colon > 0 && colon < 40) {
    f.name = text::to_lower_ascii(text::trim(std::string_view(item).substr(0, colon)));
    f.description = std::string(text::trim(std::string_view(item).substr(colon + 1)));
  } else {
    f.description = item;
    if (!f.description.empty() && std::isupper(static_cast<unsigned char>(f.description[0]))) {
      f.description[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(f.description[0])));
    }
  }
  return f;
}

const std::string* find_answer(const std::vector<std::pair<std::string, std::string>>& answers,
                               std::string_view pattern) {
  for (const auto& [name, answer] : answers) {
    if (name == pattern && !text::trim(answer).empty()) return &answer;
  }
  return nullptr;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> knowledge_extraction_prompts() {
  return {
      {"flipped_interaction", "I would like you to ask me questions to identify irony correctly."},
      {"persona", "Act as an annotator to label irony datasets."},
      {"question_refinement",
       "I will ask your help to identify irony in a statement. My question is 'Is there irony in the statement?' "
       "suggests a better version of the question to use."},
      {"recipe", "provide a complete sequence of steps to identify an irony in a statement."},
  };
}

KnowledgeBundle default_knowledge() {
  KnowledgeBundle k;
  k.definition = "Irony expresses the opposite of its literal meaning or contrast with the context.";
  k.features = {
      {"discrepancy", "between what is said and what is meant"},
      {"contrast", "between expectation and reality presented in the statement"},
  };
  k.procedure = {
      "Is the following statement ironic?",
      "Provide the statement along with relevant context to enhance understanding.",
      "What is the literal meaning?",
      "Does the literal meaning match the actual situation?",
      "Determine whether the statement is ironic based on the previous analyses.",
  };
  return k;
}

void validate(const KnowledgeBundle& k) {
  auto check = [](std::string_view field, std::string_view value) {
    if (text::trim(value).empty()) throw Error(ErrorCode::InvalidKnowledge, std::string(field) + " is empty");
    if (sentences(value).size() > 2) {
      throw Error(ErrorCode::InvalidKnowledge, std::string(field) + " is longer than two sentences");
    }
  };
  check("definition", k.definition);
  if (k.features.empty()) throw Error(ErrorCode::InvalidKnowledge, "features list is empty");
  if (k.procedure.empty()) throw Error(ErrorCode::InvalidKnowledge, "procedure is empty");
  for (const auto& f : k.features) check("feature", f.phrase());
  for (const auto& step : k.procedure) check("procedure step", step);
}

KnowledgeBundle parse_extracted_knowledge(const std::vector<std::pair<std::string, std::string>>& answers) {
  KnowledgeBundle k = default_knowledge();

  if (const auto* persona = find_answer(answers, "persona")) {
    // Prefer a sentence that actually talks about irony; annotator personas
    // often open with pleasantries.
    const auto parts = sentences(strip_markdown(*persona));
    auto it = std::find_if(parts.begin(), parts.end(), [](const std::string& s) { return text::contains_ci(s, "iron"); });
    if (it == parts.end() && !parts.empty()) it = parts.begin();
    if (it != parts.end()) k.definition = *it;
  }

  if (const auto* flipped = find_answer(answers, "flipped_interaction")) {
    std::vector<Feature> features;
    for (auto& item : list_items(*flipped)) {
      Feature f = to_feature(std::move(item));
      if (!f.description.empty()) features.push_back(std::move(f));
      if (features.size() == 2) break;
    }
    if (features.size() == 2) k.features = std::move(features);
  }

  std::vector<std::string> procedure;
  if (const auto* refined = find_answer(answers, "question_refinement")) {
    const auto parts = sentences(strip_markdown(*refined));
    auto it = std::find_if(parts.begin(), parts.end(), [](const std::string& s) { return s.ends_with("?"); });
    if (it != parts.end()) procedure.push_back(*it);
  }
  if (const auto* recipe = find_answer(answers, "recipe")) {
    for (auto& item : list_items(*recipe)) {
      if (procedure.size() == 5) break;
      procedure.push_back(first_sentences(item, 2));
    }
  }
  if (!procedure.empty()) k.procedure = std::move(procedure);

  validate(k);
  return k;
}

}  // namespace ironylab
