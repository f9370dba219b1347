#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ironylab {

enum class Label : std::uint8_t { NonIronic = 0, Ironic = 1 };

inline int to_int(Label l) noexcept { return l == Label::Ironic ? 1 : 0; }
std::string_view to_string(Label l) noexcept;

struct StatementRecord {
  std::string id;
  std::string text;                     // surface form; doubles as the literal meaning
  Label gold = Label::NonIronic;
  std::optional<std::string> intended;  // author-provided non-ironic meaning
  std::string source;

  bool operator==(const StatementRecord&) const = default;
};

enum class CorpusFormat { Csv, Tsv, Jsonl };

std::optional<CorpusFormat> parse_format(std::string_view name);
CorpusFormat format_from_extension(const std::filesystem::path& path);

// Describes one corpus file and how its columns map onto StatementRecord.
// Label values are matched case-insensitively after trimming.
struct DatasetSpec {
  std::string name;
  std::filesystem::path path;
  CorpusFormat format = CorpusFormat::Csv;
  std::string text_column = "text";
  std::string label_column = "label";
  std::optional<std::string> intended_column;
  std::optional<std::string> id_column;
  std::optional<std::string> source_column;
  std::vector<std::string> ironic_values{"1"};
  std::vector<std::string> non_ironic_values{"0"};
  // When set, an unmapped label value raises UnparsableLabel instead of
  // being skipped and reported.
  bool strict = false;
};

struct SkippedRow {
  std::size_t row = 0;  // 1-based data row (header excluded)
  std::string reason;   // "unparsable-label", "empty-text", "duplicate-id", "malformed-row"
};

struct Corpus {
  std::string name;
  std::vector<StatementRecord> records;
  std::vector<SkippedRow> skipped;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
  auto begin() const noexcept { return records.begin(); }
  auto end() const noexcept { return records.end(); }
};

struct CorpusStats {
  std::size_t size = 0;
  double ironic_ratio = 0.0;
  double avg_token_length = 0.0;
};

Corpus load_corpus(const DatasetSpec& spec);
CorpusStats stats(const Corpus& corpus);

// Deterministic draw of `n` records. Stratified draws keep the ironic share
// within one record of round(n * ratio).
Corpus sample(const Corpus& corpus, std::size_t n, std::uint64_t seed, bool stratified = false);

// Normalized JSONL: {"id","text","gold":0|1,"intended":string|null,"source"}.
void write_normalized_jsonl(const Corpus& corpus, std::ostream& out);
DatasetSpec normalized_spec(std::string name, std::filesystem::path path);

}  // namespace ironylab
