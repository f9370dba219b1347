#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ironylab/corpus.hpp"
#include "ironylab/gateway.hpp"
#include "ironylab/metrics.hpp"
#include "ironylab/pipeline.hpp"

namespace ironylab {

enum class KnowledgeMode { Frozen, Live };

struct EmbeddingSettings {
  bool use_gateway = false;  // otherwise the local hashing embedder
  ProviderKind provider = ProviderKind::OpenAICompat;
  std::string model = "text-embedding-3-small";
};

struct ProviderCredentials {
  std::string openai_key;
  std::string openai_base_url = "https://api.openai.com";
  std::string gemini_key;
  std::string gemini_base_url = "https://generativelanguage.googleapis.com";
};

struct ExperimentConfig {
  std::vector<DatasetSpec> datasets;
  Method strategy = Method::Idadp;
  ModelSettings model;
  ProviderCredentials credentials;
  std::size_t parallelism = 4;
  std::optional<std::size_t> limit;
  std::uint64_t seed = 42;
  bool stratified = true;
  double threshold = kDefaultThreshold;
  KnowledgeMode knowledge = KnowledgeMode::Frozen;
  std::filesystem::path out_dir = "out";
  std::optional<std::filesystem::path> cache_dir;
  std::optional<std::filesystem::path> mock_script;
  std::optional<std::filesystem::path> annotations;
  EmbeddingSettings embedding;
  RangeBounds bounds;
  RetryPolicy retry;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// ${NAME} is replaced by the variable's value (empty when unset).
std::string interpolate_env(std::string_view s, const EnvLookup& env);
EnvLookup process_env();

// Relative paths resolve against `base_dir`. Throws InvalidConfig.
ExperimentConfig parse_config(std::string_view toml_text, const std::filesystem::path& base_dir,
                              const EnvLookup& env = process_env());
ExperimentConfig load_config(const std::filesystem::path& path, const EnvLookup& env = process_env());

// [[dataset]] tables alone, e.g. a shared datasets.toml.
std::vector<DatasetSpec> load_dataset_specs(const std::filesystem::path& path, const EnvLookup& env = process_env());

// Keeps only the named dataset. Throws InvalidConfig when it is unknown.
void select_dataset(ExperimentConfig& config, std::string_view name);

void validate(const ExperimentConfig& config);

}  // namespace ironylab
