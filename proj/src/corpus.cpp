#include "ironylab/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <unordered_set>

#include <json.hpp>

#include "csv.hpp"
#include "ironylab/error.hpp"
#include "ironylab/text.hpp"

namespace ironylab {

using nlohmann::json;

std::string_view to_string(Label l) noexcept { return l == Label::Ironic ? "Ironic" : "NonIronic"; }

std::optional<CorpusFormat> parse_format(std::string_view name) {
  const std::string n = text::to_lower_ascii(name);
  if (n == "csv") return CorpusFormat::Csv;
  if (n == "tsv") return CorpusFormat::Tsv;
  if (n == "jsonl" || n == "ndjson") return CorpusFormat::Jsonl;
  return std::nullopt;
}

CorpusFormat format_from_extension(const std::filesystem::path& path) {
  const std::string ext = text::to_lower_ascii(path.extension().string());
  if (ext == ".tsv" || ext == ".txt") return CorpusFormat::Tsv;
  if (ext == ".jsonl" || ext == ".ndjson") return CorpusFormat::Jsonl;
  return CorpusFormat::Csv;
}

namespace {

// One raw row, already keyed by column name.
struct RawRow {
  std::size_t index = 0;
  bool malformed = false;
  std::string text, label, intended, id, source;
  bool has_intended = false;
  bool has_id = false;
  bool has_source = false;
};

std::string json_scalar_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == std::floor(d) && std::abs(d) < 1e15) return std::to_string(static_cast<long long>(d));
    return v.dump();
  }
  return {};
}

std::vector<RawRow> read_delimited(const DatasetSpec& spec, std::string_view data) {
  const bool tsv = spec.format == CorpusFormat::Tsv;
  auto rows = csv::parse(data, tsv ? '\t' : ',', /*quoting=*/!tsv);
  if (rows.empty()) throw Error(ErrorCode::EmptyCorpus, spec.path.string() + " has no header row");

  const csv::Row& header = rows.front();
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (text::trim(header[i]) == name) return i;
    }
    return std::nullopt;
  };
  auto required = [&](const std::string& name) {
    auto idx = column(name);
    if (!idx) throw Error(ErrorCode::MissingColumn, "column '" + name + "' not found in " + spec.path.string());
    return *idx;
  };

  const std::size_t text_col = required(spec.text_column);
  const std::size_t label_col = required(spec.label_column);
  std::optional<std::size_t> intended_col, id_col, source_col;
  if (spec.intended_column) intended_col = required(*spec.intended_column);
  if (spec.id_column) id_col = required(*spec.id_column);
  if (spec.source_column) source_col = required(*spec.source_column);

  std::vector<RawRow> out;
  out.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    RawRow raw;
    raw.index = r;
    auto cell = [&](std::size_t i) -> const std::string* { return i < row.size() ? &row[i] : nullptr; };
    const std::string* t = cell(text_col);
    const std::string* l = cell(label_col);
    if (!t || !l) {
      raw.malformed = true;
      out.push_back(std::move(raw));
      continue;
    }
    raw.text = *t;
    raw.label = *l;
    if (intended_col) {
      if (const auto* v = cell(*intended_col)) {
        raw.intended = *v;
        raw.has_intended = true;
      }
    }
    if (id_col) {
      if (const auto* v = cell(*id_col)) {
        raw.id = *v;
        raw.has_id = true;
      }
    }
    if (source_col) {
      if (const auto* v = cell(*source_col)) {
        raw.source = *v;
        raw.has_source = true;
      }
    }
    out.push_back(std::move(raw));
  }
  return out;
}

std::vector<RawRow> read_jsonl(const DatasetSpec& spec, std::string_view data) {
  std::vector<RawRow> out;
  std::size_t line_no = 0;
  bool checked_columns = false;
  std::size_t pos = 0;
  while (pos <= data.size()) {
    std::size_t nl = data.find('\n', pos);
    if (nl == std::string_view::npos) nl = data.size();
    std::string_view line = text::trim(data.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty()) {
      if (nl == data.size()) break;
      continue;
    }
    ++line_no;
    RawRow raw;
    raw.index = line_no;
    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (!obj.is_object()) {
      raw.malformed = true;
      out.push_back(std::move(raw));
      continue;
    }
    if (!checked_columns) {
      // Column presence is judged on the first well-formed object, mirroring
      // a header check for delimited files.
      for (const std::string* col : {&spec.text_column, &spec.label_column}) {
        if (!obj.contains(*col)) throw Error(ErrorCode::MissingColumn, "key '" + *col + "' not found in " + spec.path.string());
      }
      for (const auto* col : {&spec.intended_column, &spec.id_column, &spec.source_column}) {
        if (*col && !obj.contains(**col)) {
          throw Error(ErrorCode::MissingColumn, "key '" + **col + "' not found in " + spec.path.string());
        }
      }
      checked_columns = true;
    }
    auto field = [&](const std::string& key, std::string& dst, bool* present) {
      auto it = obj.find(key);
      if (it == obj.end() || it->is_null()) return false;
      dst = json_scalar_to_string(*it);
      if (present) *present = true;
      return true;
    };
    if (!field(spec.text_column, raw.text, nullptr) || !field(spec.label_column, raw.label, nullptr)) {
      raw.malformed = true;
    }
    if (spec.intended_column) field(*spec.intended_column, raw.intended, &raw.has_intended);
    if (spec.id_column) field(*spec.id_column, raw.id, &raw.has_id);
    if (spec.source_column) field(*spec.source_column, raw.source, &raw.has_source);
    out.push_back(std::move(raw));
    if (nl == data.size()) break;
  }
  return out;
}

std::optional<Label> coerce_label(const DatasetSpec& spec, std::string_view value) {
  const std::string v = text::to_lower_ascii(text::trim(value));
  auto in = [&](const std::vector<std::string>& values) {
    return std::any_of(values.begin(), values.end(),
                       [&](const std::string& candidate) { return text::to_lower_ascii(text::trim(candidate)) == v; });
  };
  if (in(spec.ironic_values)) return Label::Ironic;
  if (in(spec.non_ironic_values)) return Label::NonIronic;
  return std::nullopt;
}

}  // namespace

Corpus load_corpus(const DatasetSpec& spec) {
  if (!std::filesystem::exists(spec.path)) throw Error(ErrorCode::Io, "corpus file not found: " + spec.path.string());
  const std::string data = text::read_file(spec.path);
  std::vector<RawRow> rows =
      spec.format == CorpusFormat::Jsonl ? read_jsonl(spec, data) : read_delimited(spec, data);

  Corpus corpus;
  corpus.name = spec.name;
  std::unordered_set<std::string> seen_ids;
  for (RawRow& raw : rows) {
    if (raw.malformed) {
      corpus.skipped.push_back({raw.index, "malformed-row"});
      continue;
    }
    const std::string_view body = text::trim(raw.text);
    if (body.empty()) {
      corpus.skipped.push_back({raw.index, "empty-text"});
      continue;
    }
    const auto label = coerce_label(spec, raw.label);
    if (!label) {
      if (spec.strict) {
        throw Error(ErrorCode::UnparsableLabel,
                    "row " + std::to_string(raw.index) + " label '" + raw.label + "' is not in the mapping");
      }
      corpus.skipped.push_back({raw.index, "unparsable-label"});
      continue;
    }
    StatementRecord rec;
    rec.id = raw.has_id && !text::trim(raw.id).empty() ? std::string(text::trim(raw.id))
                                                        : spec.name + "-" + std::to_string(raw.index);
    if (!seen_ids.insert(rec.id).second) {
      corpus.skipped.push_back({raw.index, "duplicate-id"});
      continue;
    }
    rec.text = raw.text;
    rec.gold = *label;
    if (raw.has_intended && !text::trim(raw.intended).empty()) rec.intended = std::move(raw.intended);
    rec.source = raw.has_source && !raw.source.empty() ? std::move(raw.source) : spec.name;
    corpus.records.push_back(std::move(rec));
  }
  if (corpus.records.empty()) throw Error(ErrorCode::EmptyCorpus, spec.path.string() + " produced no valid rows");
  return corpus;
}

CorpusStats stats(const Corpus& corpus) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "stats of an empty corpus");
  std::size_t ironic = 0;
  std::size_t tokens = 0;
  for (const auto& r : corpus) {
    ironic += r.gold == Label::Ironic ? 1 : 0;
    tokens += text::count_tokens(r.text);
  }
  const auto n = static_cast<double>(corpus.size());
  return {corpus.size(), static_cast<double>(ironic) / n, static_cast<double>(tokens) / n};
}

namespace {

// Unbiased draw in [0, bound) from the raw engine output. The engine's output
// sequence is fully specified by the standard; distributions are not, so the
// reduction is done here to keep draws identical across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

Corpus sample(const Corpus& corpus, std::size_t n, std::uint64_t seed, bool stratified) {
  if (n == 0 || n > corpus.size()) {
    throw Error(ErrorCode::SampleTooLarge,
                "cannot draw " + std::to_string(n) + " records from a corpus of " + std::to_string(corpus.size()));
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> picked;

  if (!stratified) {
    std::vector<std::size_t> idx(corpus.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    shuffle(idx, rng);
    picked.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n));
  } else {
    std::vector<std::size_t> ironic, plain;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      (corpus.records[i].gold == Label::Ironic ? ironic : plain).push_back(i);
    }
    const double ratio = static_cast<double>(ironic.size()) / static_cast<double>(corpus.size());
    auto want_ironic = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
    want_ironic = std::min(want_ironic, ironic.size());
    if (n - want_ironic > plain.size()) want_ironic = n - plain.size();
    shuffle(ironic, rng);
    shuffle(plain, rng);
    picked.assign(ironic.begin(), ironic.begin() + static_cast<std::ptrdiff_t>(want_ironic));
    picked.insert(picked.end(), plain.begin(), plain.begin() + static_cast<std::ptrdiff_t>(n - want_ironic));
    shuffle(picked, rng);
  }

  Corpus out;
  out.name = corpus.name;
  out.records.reserve(n);
  for (const std::size_t i : picked) out.records.push_back(corpus.records[i]);
  return out;
}

void write_normalized_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& r : corpus) {
    json obj = {{"id", r.id},
                {"text", r.text},
                {"gold", to_int(r.gold)},
                {"intended", r.intended ? json(*r.intended) : json(nullptr)},
                {"source", r.source}};
    out << obj.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

DatasetSpec normalized_spec(std::string name, std::filesystem::path path) {
  DatasetSpec spec;
  spec.name = std::move(name);
  spec.path = std::move(path);
  spec.format = CorpusFormat::Jsonl;
  spec.text_column = "text";
  spec.label_column = "gold";
  spec.intended_column = "intended";
  spec.id_column = "id";
  spec.source_column = "source";
  return spec;
}

}  // namespace ironylab
