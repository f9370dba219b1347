#include <algorithm>
#include <cmath>

#include "ironylab/metrics.hpp"
#include "ironylab/text.hpp"

namespace ironylab {

namespace {

bool is_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::size_t count_syllables(std::string_view word) {
  std::string w;
  for (char c : word) {
    if (is_letter(c)) w.push_back(static_cast<char>(c | 0x20));
  }
  std::size_t groups = 0;
  bool prev = false;
  for (char c : w) {
    const bool v = is_vowel(c);
    if (v && !prev) ++groups;
    prev = v;
  }
  if (w.size() >= 2 && w.back() == 'e' && w[w.size() - 2] != 'l' && groups > 0) --groups;
  return std::max<std::size_t>(groups, 1);
}

ReadabilityCounts readability_counts(std::string_view t) {
  ReadabilityCounts c;
  for (auto tok : text::split_whitespace(t)) {
    bool letter = false;
    for (char ch : tok) letter = letter || is_letter(ch);
    if (!letter) continue;
    ++c.words;
    c.syllables += count_syllables(tok);
  }
  bool in_run = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const char ch = t[i];
    const bool decimal_point = ch == '.' && i > 0 && i + 1 < t.size() && is_digit(t[i - 1]) && is_digit(t[i + 1]);
    const bool terminator = (ch == '.' || ch == '!' || ch == '?') && !decimal_point;
    if (terminator && !in_run) ++c.sentences;
    in_run = terminator;
  }
  c.sentences = std::max<std::size_t>(c.sentences, 1);
  return c;
}

double flesch_reading_ease(std::string_view t) {
  const ReadabilityCounts c = readability_counts(t);
  if (c.words == 0) throw Error(ErrorCode::NoWords, "text has no words");
  const double w = static_cast<double>(c.words);
  return 206.835 - 1.015 * (w / static_cast<double>(c.sentences)) - 84.6 * (static_cast<double>(c.syllables) / w);
}

}  // namespace ironylab
