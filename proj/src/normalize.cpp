#include "ironylab/normalize.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include <json.hpp>

#include "ironylab/text.hpp"

namespace ironylab {

using nlohmann::json;

std::string_view to_string(ParseNote n) noexcept {
  switch (n) {
    case ParseNote::NoJson: return "no-json";
    case ParseNote::CoercedString: return "coerced-string";
    case ParseNote::EmptyOutput: return "empty-output";
    case ParseNote::ThresholdOverridesJson: return "threshold-overrides-json";
    case ParseNote::FenceStripped: return "fence-stripped";
    case ParseNote::QuoteNormalized: return "quote-normalized";
    case ParseNote::JsonLabelFallback: return "json-label-fallback";
  }
  return "no-json";
}

std::optional<ParseNote> parse_note_from_string(std::string_view s) {
  for (auto n : {ParseNote::NoJson, ParseNote::CoercedString, ParseNote::EmptyOutput, ParseNote::ThresholdOverridesJson,
                 ParseNote::FenceStripped, ParseNote::QuoteNormalized, ParseNote::JsonLabelFallback}) {
    if (to_string(n) == s) return n;
  }
  return std::nullopt;
}

namespace {

void add_note(std::vector<ParseNote>& notes, ParseNote n) {
  if (std::find(notes.begin(), notes.end(), n) == notes.end()) notes.push_back(n);
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

struct JsonCandidate {
  std::size_t begin = 0;
  std::size_t end = 0;  // one past the closing brace
  json value;
  bool requoted = false;
};

// Every balanced {...} substring that parses as a JSON object, in order of
// its opening brace.
std::vector<JsonCandidate> json_objects(std::string_view s) {
  constexpr std::size_t kMaxObject = 4096;
  std::vector<JsonCandidate> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '{') continue;
    int depth = 0;
    bool in_string = false;
    std::size_t close = std::string_view::npos;
    for (std::size_t j = i; j < s.size() && j - i < kMaxObject; ++j) {
      const char c = s[j];
      if (in_string) {
        if (c == '\\') {
          ++j;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) {
          close = j;
          break;
        }
      }
    }
    if (close == std::string_view::npos) continue;
    const std::string_view body = s.substr(i, close - i + 1);
    JsonCandidate cand{i, close + 1, json::parse(body, nullptr, false), false};
    if (cand.value.is_discarded() && body.find('\'') != std::string_view::npos &&
        body.find('"') == std::string_view::npos) {
      std::string swapped(body);
      std::replace(swapped.begin(), swapped.end(), '\'', '"');
      cand.value = json::parse(swapped, nullptr, false);
      cand.requoted = true;
    }
    if (!cand.value.is_discarded() && cand.value.is_object()) out.push_back(std::move(cand));
  }
  return out;
}

const json* irony_value(const json& obj) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (text::to_lower_ascii(text::trim(it.key())) == "irony") return &it.value();
  }
  return nullptr;
}

struct LabelScan {
  std::optional<Label> label;
  std::vector<ParseNote> notes;
  std::optional<std::size_t> json_begin;  // start of the deciding object
  std::size_t json_end = 0;
  std::optional<std::string> json_reason;  // {"reason": "...", "irony": 0}
  std::optional<double> fractional;       // {"irony": 0.85}
};

LabelScan scan_label(std::string_view s) {
  LabelScan out;
  const JsonCandidate* last = nullptr;
  const json* value = nullptr;
  const auto objects = json_objects(s);
  for (const auto& c : objects) {
    if (const json* v = irony_value(c.value)) {
      last = &c;
      value = v;
    }
  }
  if (!last) {
    add_note(out.notes, ParseNote::NoJson);
    return out;
  }
  out.json_begin = last->begin;
  out.json_end = last->end;
  for (auto it = last->value.begin(); it != last->value.end(); ++it) {
    const std::string key = text::to_lower_ascii(text::trim(it.key()));
    if ((key == "reason" || key == "reasoning" || key == "explanation") && it->is_string()) {
      const std::string_view r = text::trim(it->get_ref<const std::string&>());
      if (!r.empty()) out.json_reason = std::string(r);
      break;
    }
  }
  if (last->requoted) add_note(out.notes, ParseNote::QuoteNormalized);
  if (value->is_number()) {
    const double d = value->get<double>();
    if (d == 1.0) {
      out.label = Label::Ironic;
    } else if (d == 0.0) {
      out.label = Label::NonIronic;
    } else if (d > 0.0 && d < 1.0) {
      out.fractional = d;
    }
  } else if (value->is_string()) {
    const std::string_view v = text::trim(value->get_ref<const std::string&>());
    if (v == "1" || v == "0") {
      out.label = v == "1" ? Label::Ironic : Label::NonIronic;
      add_note(out.notes, ParseNote::CoercedString);
    }
  }
  if (!out.label) add_note(out.notes, ParseNote::NoJson);
  return out;
}

// --- probability ----------------------------------------------------------

constexpr std::array<std::string_view, 3> kScoreCues{"score", "probability", "likelihood"};

struct Number {
  double value = 0.0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

std::optional<Number> read_number(std::string_view s, std::size_t pos) {
  std::size_t i = pos;
  while (i < s.size() && is_digit(s[i])) ++i;
  if (i < s.size() && s[i] == '.' && i + 1 < s.size() && is_digit(s[i + 1])) {
    ++i;
    while (i < s.size() && is_digit(s[i])) ++i;
  }
  if (i == pos) return std::nullopt;
  double v = 0.0;
  std::string token(s.substr(pos, i - pos));
  if (token.front() == '.') token.insert(token.begin(), '0');
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc()) return std::nullopt;
  return Number{v, pos, i};
}

std::size_t skip_spaces(std::string_view s, std::size_t i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return i;
}

// Scans one line segment for the first admissible score.
std::optional<double> score_in(std::string_view seg) {
  std::size_t i = 0;
  while (i < seg.size()) {
    const bool starts = is_digit(seg[i]) || (seg[i] == '.' && i + 1 < seg.size() && is_digit(seg[i + 1]));
    const bool glued = i > 0 && (is_alpha(seg[i - 1]) || is_digit(seg[i - 1]) || seg[i - 1] == '.');
    if (!starts || glued) {
      ++i;
      continue;
    }
    auto num = read_number(seg, i);
    if (!num) {
      ++i;
      continue;
    }
    double value = num->value;
    std::size_t next = num->end;
    std::size_t k = skip_spaces(seg, next);
    // "0 to 1", "0-1": a range, not a score.
    bool range = false;
    if (seg.substr(k, 3) == "to ") {
      range = true;
      k = skip_spaces(seg, k + 3);
    } else if (k < seg.size() && seg[k] == '-') {
      range = true;
      k = skip_spaces(seg, k + 1);
    } else if (seg.substr(k, 3) == "\xE2\x80\x93") {
      range = true;
      k = skip_spaces(seg, k + 3);
    }
    if (range) {
      if (auto hi = read_number(seg, k)) {
        i = hi->end;
        continue;
      }
    }
    if (k < seg.size() && seg[k] == '%') {
      value /= 100.0;
    } else if (k < seg.size() && seg[k] == '/') {
      auto den = read_number(seg, skip_spaces(seg, k + 1));
      if (den && den->value > 0.0) {
        value /= den->value;
        next = den->end;
      }
    }
    const std::string before = text::to_lower_ascii(seg.substr(0, num->begin));
    std::string_view tail = text::trim(before);
    const bool label_value = tail.ends_with("\"irony\":") || tail.ends_with("'irony':");
    if (!label_value && before.find("threshold") == std::string::npos && value >= 0.0 && value <= 1.0) return value;
    i = next;
  }
  return std::nullopt;
}

bool has_digit(std::string_view s) { return std::any_of(s.begin(), s.end(), is_digit); }

std::optional<double> scan_probability(std::string_view s) {
  const std::string lower = text::to_lower_ascii(s);
  std::size_t from = 0;
  while (true) {
    std::size_t cue = std::string::npos;
    std::size_t cue_len = 0;
    for (auto c : kScoreCues) {
      const auto p = lower.find(c, from);
      if (p < cue) {
        cue = p;
        cue_len = c.size();
      }
    }
    if (cue == std::string::npos) return std::nullopt;
    const std::size_t seg_begin = cue + cue_len;
    std::size_t eol = s.find('\n', seg_begin);
    if (eol == std::string_view::npos) eol = s.size();
    std::string_view seg = s.substr(seg_begin, eol - seg_begin);
    if (!has_digit(seg) && eol < s.size()) {
      // "Probability score:\n0.85"
      std::size_t next = eol + 1;
      while (next < s.size()) {
        std::size_t e = s.find('\n', next);
        if (e == std::string_view::npos) e = s.size();
        if (!text::trim(s.substr(next, e - next)).empty()) {
          seg = s.substr(next, e - next);
          break;
        }
        next = e + 1;
      }
    }
    if (auto p = score_in(seg)) return p;
    from = seg_begin;
  }
}

// --- sections -------------------------------------------------------------

struct Line {
  std::string label;    // lowercased text before a leading colon, if any
  std::string content;  // text after the label (or the whole line)
  std::string full;     // marker-stripped line
  bool blank = false;
};

std::string_view strip_list_marker(std::string_view s) {
  s = text::trim(s);
  while (!s.empty() && (s.front() == '#' || s.front() == '>')) s = text::trim(s.substr(1));
  if (s.starts_with("- ") || s.starts_with("* ") || s.starts_with("+ ")) return text::trim(s.substr(2));
  if (s.starts_with("\xE2\x80\xA2")) return text::trim(s.substr(3));
  std::size_t i = 0;
  const std::string lower = text::to_lower_ascii(s.substr(0, std::min<std::size_t>(s.size(), 8)));
  if (lower.starts_with("step ")) {
    i = 5;
    std::size_t d = i;
    while (d < s.size() && is_digit(s[d])) ++d;
    if (d > i && d < s.size() && (s[d] == ':' || s[d] == '.' || s[d] == ')')) return text::trim(s.substr(d + 1));
    return s;
  }
  while (i < s.size() && is_digit(s[i])) ++i;
  if (i > 0 && i < 4 && i + 1 < s.size() && (s[i] == '.' || s[i] == ')') && s[i + 1] == ' ') {
    return text::trim(s.substr(i + 1));
  }
  return s;
}

std::string strip_bold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '*' && i + 1 < s.size() && s[i + 1] == '*') {
      ++i;
      continue;
    }
    out.push_back(s[i]);
  }
  return std::string(text::trim(out));
}

Line classify(std::string_view raw_line) {
  Line line;
  const std::string stripped = strip_bold(strip_list_marker(raw_line));
  line.full = stripped;
  line.content = stripped;
  line.blank = stripped.empty();
  const std::size_t colon = stripped.find(':');
  if (colon != std::string::npos && colon > 0 && colon <= 40) {
    const std::string_view head = std::string_view(stripped).substr(0, colon);
    const bool wordy = std::all_of(head.begin(), head.end(), [](char c) {
      return is_alpha(c) || is_digit(c) || c == ' ' || c == '-' || c == '_' || c == '(' || c == ')';
    });
    if (wordy && text::split_whitespace(head).size() <= 5) {
      line.label = text::to_lower_ascii(text::trim(head));
      line.content = std::string(text::trim(std::string_view(stripped).substr(colon + 1)));
    }
  }
  return line;
}

bool is_rephrase_cue(std::string_view lower) {
  return lower.find("rephras") != std::string_view::npos || lower.find("without the irony") != std::string_view::npos ||
         lower.find("without irony") != std::string_view::npos || lower.find("non-ironic") != std::string_view::npos ||
         lower.find("non ironic") != std::string_view::npos;
}

bool is_reason_label(std::string_view label) {
  for (std::string_view l : {"reason", "reasoning", "explanation", "rationale", "analysis", "why"}) {
    if (label == l) return true;
  }
  return label.starts_with("reason") || label.ends_with(" reason") || label.ends_with(" reasoning");
}

bool is_marker_label(std::string_view label) {
  static constexpr std::array<std::string_view, 24> kMarkers{
      "statement",   "original statement", "input",        "input comment",     "text",        "comment",
      "result",      "answer",             "final answer", "output",            "json",        "label",
      "irony",       "classification",     "verdict",      "threshold",         "probability", "score",
      "likelihood",  "probabilistic score", "probability score", "likelihood score", "confidence", "irony score"};
  return std::find(kMarkers.begin(), kMarkers.end(), label) != kMarkers.end();
}

bool has_letter(std::string_view s) { return std::any_of(s.begin(), s.end(), is_alpha) || s.find('\xE2') != s.npos; }

std::string unquote(std::string_view s) {
  s = text::trim(s);
  while (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
    s = text::trim(s.substr(1, s.size() - 2));
  }
  return std::string(s);
}

bool standalone_quote(std::string_view s) {
  s = text::trim(s);
  return s.size() >= 3 && s.front() == '"' && s.back() == '"' && s.substr(1, s.size() - 2).find('"') == s.npos;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += '\n';
    out += p;
  }
  return out;
}

enum class Kind { Blank, Marker, Rephrase, RephraseCue, Reason, Body };

Sections sections_of(std::string_view s, std::optional<std::size_t> json_begin) {
  std::string_view body = json_begin ? s.substr(0, *json_begin) : s;
  std::vector<Line> lines;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    std::size_t e = body.find('\n', pos);
    if (e == std::string_view::npos) e = body.size();
    lines.push_back(classify(body.substr(pos, e - pos)));
    pos = e + 1;
  }

  std::vector<Kind> kinds(lines.size(), Kind::Body);
  std::vector<std::string> rephrase;
  bool in_rephrase = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Line& l = lines[i];
    if (l.blank) {
      kinds[i] = Kind::Blank;
      if (!rephrase.empty()) in_rephrase = false;
      continue;
    }
    const std::string lower_label = l.label;
    const std::string lower_full = text::to_lower_ascii(l.full);
    if (!l.label.empty() && is_rephrase_cue(lower_label)) {
      kinds[i] = Kind::RephraseCue;
      in_rephrase = l.content.empty();
      if (!l.content.empty()) rephrase.push_back(unquote(l.content));
      continue;
    }
    if (l.label.empty() && is_rephrase_cue(lower_full) && l.full.find(':') != std::string::npos) {
      // "Rephrased without the irony, it would read: ..."
      kinds[i] = Kind::RephraseCue;
      const std::string after(text::trim(std::string_view(l.full).substr(l.full.find(':') + 1)));
      in_rephrase = after.empty();
      if (!after.empty()) rephrase.push_back(unquote(after));
      continue;
    }
    if (in_rephrase) {
      if (!l.label.empty() && (is_reason_label(l.label) || is_marker_label(l.label))) {
        in_rephrase = false;
      } else {
        kinds[i] = Kind::Rephrase;
        rephrase.push_back(unquote(l.full));
        continue;
      }
    }
    if (!l.label.empty() && is_marker_label(l.label)) {
      kinds[i] = Kind::Marker;
    } else if (!has_letter(l.content)) {
      kinds[i] = Kind::Marker;
    } else if (!l.label.empty() && is_reason_label(l.label)) {
      kinds[i] = Kind::Reason;
    }
  }

  // Blocks of consecutive Body/Reason lines.
  struct Block {
    std::vector<std::size_t> lines;
    bool labeled = false;
    std::size_t bytes = 0;
  };
  std::vector<Block> blocks;
  Block cur;
  auto flush = [&] {
    if (!cur.lines.empty()) blocks.push_back(cur);
    cur = {};
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (kinds[i] == Kind::Reason) {
      flush();
      cur.labeled = true;
    }
    if (kinds[i] == Kind::Body || kinds[i] == Kind::Reason) {
      cur.lines.push_back(i);
      cur.bytes += kinds[i] == Kind::Reason ? lines[i].content.size() : lines[i].full.size();
    } else {
      flush();
    }
  }
  flush();

  Sections out;
  if (rephrase.empty()) {
    // A lone quoted line after the first reasoning block.
    for (std::size_t b = 1; b < blocks.size(); ++b) {
      if (blocks[b].lines.size() == 1 && !blocks[b].labeled && standalone_quote(lines[blocks[b].lines[0]].full)) {
        rephrase.push_back(unquote(lines[blocks[b].lines[0]].full));
        blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(b));
        break;
      }
    }
  }

  const Block* chosen = nullptr;
  for (const auto& b : blocks) {
    if (b.labeled) {
      chosen = &b;
      break;
    }
  }
  if (!chosen) {
    for (const auto& b : blocks) {
      if (!chosen || b.bytes > chosen->bytes) chosen = &b;
    }
  }
  if (chosen) {
    std::vector<std::string> parts;
    for (auto i : chosen->lines) parts.push_back(kinds[i] == Kind::Reason ? lines[i].content : lines[i].full);
    std::string reason = unquote(join(parts));
    if (!reason.empty()) out.reason = std::move(reason);
  }
  std::string r = join(rephrase);
  if (!r.empty()) out.rephrase = std::move(r);
  return out;
}

}  // namespace

std::string preprocess(std::string_view raw, std::vector<ParseNote>* notes) {
  std::string out;
  out.reserve(raw.size());
  bool fences = false;
  bool quotes = false;
  bool open = false;
  for (std::size_t i = 0; i < raw.size();) {
    if (raw.substr(i, 3) == "```") {
      fences = true;
      i += 3;
      if (!open) {
        while (i < raw.size() && (is_alpha(raw[i]) || is_digit(raw[i]) || raw[i] == '-' || raw[i] == '_')) ++i;
      }
      open = !open;
      continue;
    }
    const unsigned char c = static_cast<unsigned char>(raw[i]);
    if (c == 0xE2 && i + 2 < raw.size() && static_cast<unsigned char>(raw[i + 1]) == 0x80) {
      const unsigned char t = static_cast<unsigned char>(raw[i + 2]);
      if (t == 0x9C || t == 0x9D || t == 0x9E || t == 0x9F) {
        out.push_back('"');
        quotes = true;
        i += 3;
        continue;
      }
      if (t == 0x98 || t == 0x99 || t == 0x9A || t == 0x9B) {
        out.push_back('\'');
        quotes = true;
        i += 3;
        continue;
      }
    }
    out.push_back(raw[i]);
    ++i;
  }
  if (notes) {
    if (fences) add_note(*notes, ParseNote::FenceStripped);
    if (quotes) add_note(*notes, ParseNote::QuoteNormalized);
  }
  return out;
}

LabelExtraction extract_label(std::string_view raw) {
  LabelExtraction out;
  const std::string s = preprocess(raw, &out.notes);
  LabelScan scan = scan_label(s);
  out.label = scan.label;
  for (auto n : scan.notes) add_note(out.notes, n);
  return out;
}

std::string serialize_label(Label label) { return label == Label::Ironic ? R"({"irony": 1})" : R"({"irony": 0})"; }

ProbabilityExtraction extract_probability(std::string_view raw, double threshold) {
  const std::string s = preprocess(raw);
  ProbabilityExtraction out;
  const LabelScan scan = scan_label(s);
  out.probability = scan_probability(s);
  if (!out.probability) out.probability = scan.fractional;
  if (out.probability) {
    out.label = *out.probability >= threshold ? Label::Ironic : Label::NonIronic;
  } else {
    out.label = scan.label;
  }
  return out;
}

namespace {

// Reasoning usually precedes the JSON; otherwise take what follows it, then
// a reason key inside the object.
Sections sections_around(std::string_view s, const LabelScan& scan) {
  Sections sec = sections_of(s, scan.json_begin);
  if (scan.json_begin && !sec.reason) {
    Sections after = sections_of(s.substr(scan.json_end), std::nullopt);
    sec.reason = std::move(after.reason);
    if (!sec.rephrase) sec.rephrase = std::move(after.rephrase);
  }
  if (!sec.reason) sec.reason = scan.json_reason;
  return sec;
}

}  // namespace

Sections extract_sections(std::string_view raw) {
  const std::string s = preprocess(raw);
  return sections_around(s, scan_label(s));
}

TaskOutput normalize(std::string_view raw, bool expects_probability, double threshold) {
  TaskOutput out;
  out.raw = std::string(raw);
  if (text::trim(raw).empty()) {
    out.parse_notes.push_back(ParseNote::EmptyOutput);
    return out;
  }
  const std::string s = preprocess(raw, &out.parse_notes);
  const LabelScan scan = scan_label(s);
  for (auto n : scan.notes) add_note(out.parse_notes, n);
  out.label = scan.label;

  if (expects_probability) {
    out.probability = scan_probability(s);
    if (!out.probability) out.probability = scan.fractional;
    if (out.probability) {
      const Label by_threshold = *out.probability >= threshold ? Label::Ironic : Label::NonIronic;
      if (scan.label && *scan.label != by_threshold) add_note(out.parse_notes, ParseNote::ThresholdOverridesJson);
      out.label = by_threshold;
    } else if (scan.label) {
      add_note(out.parse_notes, ParseNote::JsonLabelFallback);
    }
  }

  Sections sec = sections_around(s, scan);
  out.reason = std::move(sec.reason);
  out.rephrase = std::move(sec.rephrase);
  return out;
}

}  // namespace ironylab
