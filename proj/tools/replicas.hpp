#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "ironylab/corpus.hpp"

// Synthetic stand-ins for the six benchmark corpora. Each file has the
// original column layout, row count, ironic share and total whitespace-token
// count, with filler text in place of the real statements.
namespace ironylab::replicas {

struct ReplicaSpec {
  std::string name;
  std::string file;
  CorpusFormat format = CorpusFormat::Csv;
  std::size_t size = 0;
  std::size_t ironic = 0;
  double mean_length = 0.0;  // reference tokens per text; total = round(mean * size)
};

const std::vector<ReplicaSpec>& catalog();

std::size_t total_tokens(const ReplicaSpec& r);

// Writes every replica plus datasets.toml into `dir`. Deterministic.
void write_all(const std::filesystem::path& dir);

}  // namespace ironylab::replicas
