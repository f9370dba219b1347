#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ironylab/corpus.hpp"
#include "ironylab/metrics.hpp"
#include "ironylab/result_log.hpp"

namespace ironylab {

inline constexpr int kReportSchemaVersion = 1;

struct DatasetReport {
  std::string dataset;
  std::string strategy;
  std::size_t evaluated = 0;
  std::size_t failed = 0;
  std::size_t abstentions = 0;  // abstaining ballots across all statements
  std::size_t unanimous = 0;
  CorpusStats stats;  // of the evaluated statements
  std::optional<ClassificationReport> detection;
  ReasoningReport reasoning;
  std::optional<SimilarityReport> similarity;
};

// Everything here is a function of the result log, annotations and
// embedder, so repeated runs serialize byte-identically.
struct EvalReport {
  std::string strategy;
  std::string provider;
  std::string model;
  double threshold = 0.7;
  std::uint64_t seed = 0;
  std::optional<std::size_t> limit;
  std::vector<DatasetReport> datasets;
};

// Failed records count towards `failed` only. Similarity is computed when an
// embedder is given and some record carries an intended meaning.
DatasetReport evaluate_records(const std::string& dataset, std::span<const LogRecord> records,
                               std::span<const RubricAnnotation> annotations, Embedder* embedder,
                               const RangeBounds& bounds = {});

nlohmann::json to_json(const DatasetReport& r);
nlohmann::json to_json(const EvalReport& r);
std::string report_json(const EvalReport& r);
// dataset,strategy,P,R,F1,F,S,H,B; blanks where a value is undefined.
std::string report_csv(const EvalReport& r);

}  // namespace ironylab
