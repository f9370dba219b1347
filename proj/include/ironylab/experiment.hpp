#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "ironylab/config.hpp"
#include "ironylab/report.hpp"

namespace ironylab {

struct RunOptions {
  bool resume = false;
  std::shared_ptr<HttpTransport> transport;  // defaults to the real HTTP client
  Sleeper sleeper;                           // defaults to sleeping
  ProgressFn progress;
};

struct RunStats {
  std::size_t live_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t retries = 0;
  std::size_t resumed = 0;   // statements taken from an existing log
  std::size_t executed = 0;  // statements sent through the pipeline
  std::size_t failed = 0;
  std::size_t quarantined = 0;
};

struct RunOutput {
  EvalReport report;
  RunStats stats;
  std::vector<std::filesystem::path> logs;
  std::filesystem::path report_json;
  std::filesystem::path report_csv;
};

std::unique_ptr<Gateway> make_gateway(const ExperimentConfig& config, const RunOptions& options = {});

// <out>/<dataset>__<strategy>.jsonl
std::filesystem::path log_path(const ExperimentConfig& config, const std::string& dataset);

// Asks the four extraction prompts and parses the answers.
KnowledgeBundle extract_knowledge(Gateway& gateway, const ModelSettings& settings);

// Six corpus statements (three per class when possible) with the model's own
// zero-shot reasoning, drawn in a seeded order. Throws MissingExemplars when
// too few usable answers come back.
std::vector<Exemplar> auto_cot_exemplars(const Corpus& corpus, Gateway& gateway, const ModelSettings& settings,
                                         std::uint64_t seed);

// load -> sample -> pipeline -> metrics for every dataset, writing the
// per-dataset logs and report.json / report.csv under config.out_dir. Every
// dataset is loaded and sampled before the first provider call.
RunOutput run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// Same as run_experiment, but statements already in the logs are not
// queried again. Throws SchemaMismatch for a log from another version.
RunOutput resume(const ExperimentConfig& config, RunOptions options = {});

}  // namespace ironylab
