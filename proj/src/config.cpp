#include "ironylab/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include <toml.hpp>

#include "ironylab/text.hpp"

namespace ironylab {

namespace fs = std::filesystem;

std::string interpolate_env(std::string_view s, const EnvLookup& env) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '$' && i + 1 < s.size() && s[i + 1] == '{') {
      const std::size_t close = s.find('}', i + 2);
      if (close != std::string_view::npos) {
        const std::string name(s.substr(i + 2, close - i - 2));
        if (auto v = env(name)) out += *v;
        i = close;
        continue;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

namespace {

struct Reader {
  const fs::path& base;
  const EnvLookup& env;

  std::optional<std::string> str(const toml::table& t, std::string_view key) const {
    const auto* node = t.get(key);
    if (!node) return std::nullopt;
    if (auto v = node->value<std::string>()) return interpolate_env(*v, env);
    throw Error(ErrorCode::InvalidConfig, "'" + std::string(key) + "' must be a string");
  }

  std::optional<fs::path> path(const toml::table& t, std::string_view key) const {
    auto s = str(t, key);
    if (!s) return std::nullopt;
    fs::path p(*s);
    return p.is_absolute() ? p : base / p;
  }

  template <typename T>
  std::optional<T> num(const toml::table& t, std::string_view key) const {
    const auto* node = t.get(key);
    if (!node) return std::nullopt;
    if constexpr (std::is_same_v<T, double>) {
      if (auto v = node->value<double>()) return *v;
    } else {
      if (auto v = node->value<std::int64_t>()) {
        if (*v < 0) throw Error(ErrorCode::InvalidConfig, "'" + std::string(key) + "' must not be negative");
        return static_cast<T>(*v);
      }
    }
    throw Error(ErrorCode::InvalidConfig, "'" + std::string(key) + "' must be a number");
  }

  std::optional<bool> flag(const toml::table& t, std::string_view key) const {
    const auto* node = t.get(key);
    if (!node) return std::nullopt;
    if (auto v = node->value<bool>()) return *v;
    throw Error(ErrorCode::InvalidConfig, "'" + std::string(key) + "' must be true or false");
  }

  std::optional<std::vector<std::string>> strings(const toml::table& t, std::string_view key) const {
    const auto* node = t.get(key);
    if (!node) return std::nullopt;
    const auto* arr = node->as_array();
    if (!arr) throw Error(ErrorCode::InvalidConfig, "'" + std::string(key) + "' must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : *arr) {
      auto v = e.value<std::string>();
      if (!v) throw Error(ErrorCode::InvalidConfig, "'" + std::string(key) + "' must be an array of strings");
      out.push_back(*v);
    }
    return out;
  }

  DatasetSpec dataset(const toml::table& t) const {
    DatasetSpec d;
    auto name = str(t, "name");
    auto p = path(t, "path");
    if (!name || !p) throw Error(ErrorCode::InvalidConfig, "every [[dataset]] needs 'name' and 'path'");
    d.name = *name;
    d.path = *p;
    if (auto f = str(t, "format")) {
      auto parsed = parse_format(*f);
      if (!parsed) throw Error(ErrorCode::InvalidConfig, "dataset " + d.name + ": unknown format '" + *f + "'");
      d.format = *parsed;
    } else {
      d.format = format_from_extension(d.path);
    }
    if (auto v = str(t, "text_column")) d.text_column = *v;
    if (auto v = str(t, "label_column")) d.label_column = *v;
    d.intended_column = str(t, "intended_column");
    d.id_column = str(t, "id_column");
    d.source_column = str(t, "source_column");
    if (auto v = strings(t, "ironic_values")) d.ironic_values = *v;
    if (auto v = strings(t, "non_ironic_values")) d.non_ironic_values = *v;
    if (auto v = flag(t, "strict")) d.strict = *v;
    return d;
  }

  std::vector<DatasetSpec> datasets(const toml::table& root) const {
    std::vector<DatasetSpec> out;
    const auto* node = root.get("dataset");
    if (!node) return out;
    const auto* arr = node->as_array();
    if (!arr) throw Error(ErrorCode::InvalidConfig, "'dataset' must be an array of tables ([[dataset]])");
    for (const auto& e : *arr) {
      const auto* t = e.as_table();
      if (!t) throw Error(ErrorCode::InvalidConfig, "'dataset' entries must be tables");
      out.push_back(dataset(*t));
    }
    return out;
  }
};

toml::table parse_toml(std::string_view text, const std::string& where) {
  try {
    return toml::parse(text, where);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << where << ": " << e.description() << " (line " << e.source().begin.line << ")";
    throw Error(ErrorCode::InvalidConfig, msg.str());
  }
}

const toml::table* section(const toml::table& root, std::string_view name) {
  const auto* node = root.get(name);
  if (!node) return nullptr;
  const auto* t = node->as_table();
  if (!t) throw Error(ErrorCode::InvalidConfig, "[" + std::string(name) + "] must be a table");
  return t;
}

}  // namespace

std::vector<DatasetSpec> load_dataset_specs(const fs::path& path, const EnvLookup& env) {
  const toml::table root = parse_toml(text::read_file(path), path.string());
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  return Reader{base, env}.datasets(root);
}

ExperimentConfig parse_config(std::string_view toml_text, const fs::path& base_dir, const EnvLookup& env) {
  const toml::table root = parse_toml(toml_text, "config");
  const Reader r{base_dir, env};
  ExperimentConfig c;

  if (const auto* e = section(root, "experiment")) {
    if (auto v = r.str(*e, "strategy")) {
      auto m = method_from_string(*v);
      if (!m) throw Error(ErrorCode::InvalidConfig, "unknown strategy '" + *v + "'");
      c.strategy = *m;
    }
    if (auto v = r.num<double>(*e, "threshold")) c.threshold = *v;
    if (auto v = r.str(*e, "knowledge")) {
      if (*v == "frozen") c.knowledge = KnowledgeMode::Frozen;
      else if (*v == "live") c.knowledge = KnowledgeMode::Live;
      else throw Error(ErrorCode::InvalidConfig, "knowledge must be 'frozen' or 'live'");
    }
    if (auto v = r.num<std::size_t>(*e, "parallelism")) c.parallelism = *v;
    if (auto v = r.num<std::size_t>(*e, "limit")) c.limit = *v;
    if (auto v = r.num<std::uint64_t>(*e, "seed")) c.seed = *v;
    if (auto v = r.flag(*e, "stratified")) c.stratified = *v;
    if (auto v = r.path(*e, "out")) c.out_dir = *v;
    else c.out_dir = base_dir / "out";
    c.annotations = r.path(*e, "annotations");
    if (auto f = r.path(*e, "datasets_file")) {
      for (auto& d : load_dataset_specs(*f, env)) c.datasets.push_back(std::move(d));
    }
  } else {
    c.out_dir = base_dir / "out";
  }

  if (const auto* m = section(root, "model")) {
    if (auto v = r.str(*m, "provider")) {
      auto p = provider_from_string(*v);
      if (!p) throw Error(ErrorCode::InvalidConfig, "unknown provider '" + *v + "'");
      c.model.provider = *p;
    }
    if (auto v = r.str(*m, "name")) c.model.model = *v;
    if (auto v = r.num<std::size_t>(*m, "max_tokens")) c.model.max_tokens = static_cast<int>(*v);
    if (auto v = r.num<double>(*m, "temperature")) c.model.temperature = *v;
    c.mock_script = r.path(*m, "mock_script");
    if (auto v = r.str(*m, "openai_api_key")) c.credentials.openai_key = *v;
    if (auto v = r.str(*m, "openai_base_url")) c.credentials.openai_base_url = *v;
    if (auto v = r.str(*m, "gemini_api_key")) c.credentials.gemini_key = *v;
    if (auto v = r.str(*m, "gemini_base_url")) c.credentials.gemini_base_url = *v;
  }
  if (c.credentials.openai_key.empty()) c.credentials.openai_key = env("OPENAI_API_KEY").value_or("");
  if (c.credentials.gemini_key.empty()) c.credentials.gemini_key = env("GEMINI_API_KEY").value_or("");
  if (auto base = env("OPENAI_BASE_URL"); base && !base->empty()) {
    if (!section(root, "model") || !section(root, "model")->get("openai_base_url")) c.credentials.openai_base_url = *base;
  }

  if (const auto* cache = section(root, "cache")) c.cache_dir = r.path(*cache, "dir");

  if (const auto* retry = section(root, "retry")) {
    if (auto v = r.num<std::size_t>(*retry, "max_retries")) c.retry.max_retries = static_cast<int>(*v);
    if (auto v = r.num<std::size_t>(*retry, "base_backoff_ms")) c.retry.base_backoff = std::chrono::milliseconds(*v);
    if (auto v = r.num<double>(*retry, "jitter")) c.retry.jitter = *v;
  }

  if (const auto* emb = section(root, "embedding")) {
    if (auto v = r.str(*emb, "mode")) {
      if (*v == "hashing") c.embedding.use_gateway = false;
      else if (*v == "gateway") c.embedding.use_gateway = true;
      else throw Error(ErrorCode::InvalidConfig, "embedding mode must be 'hashing' or 'gateway'");
    }
    if (auto v = r.str(*emb, "provider")) {
      auto p = provider_from_string(*v);
      if (!p) throw Error(ErrorCode::InvalidConfig, "unknown embedding provider '" + *v + "'");
      c.embedding.provider = *p;
    }
    if (auto v = r.str(*emb, "model")) c.embedding.model = *v;
  }

  if (const auto* sim = section(root, "similarity")) {
    if (auto v = r.num<double>(*sim, "moderate")) c.bounds.moderate = *v;
    if (auto v = r.num<double>(*sim, "almost_identical")) c.bounds.almost_identical = *v;
  }

  for (auto& d : r.datasets(root)) c.datasets.push_back(std::move(d));
  validate(c);
  return c;
}

ExperimentConfig load_config(const fs::path& path, const EnvLookup& env) {
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  return parse_config(text::read_file(path), base, env);
}

void select_dataset(ExperimentConfig& config, std::string_view name) {
  std::vector<DatasetSpec> keep;
  for (auto& d : config.datasets) {
    if (d.name == name) keep.push_back(d);
  }
  if (keep.empty()) throw Error(ErrorCode::InvalidConfig, "no dataset named '" + std::string(name) + "' in config");
  config.datasets = std::move(keep);
}

void validate(const ExperimentConfig& c) {
  if (!(c.threshold > 0.0 && c.threshold < 1.0)) throw Error(ErrorCode::InvalidConfig, "threshold must lie in (0, 1)");
  if (c.parallelism == 0) throw Error(ErrorCode::InvalidConfig, "parallelism must be at least 1");
  if (c.limit && *c.limit == 0) throw Error(ErrorCode::InvalidConfig, "limit must be at least 1");
  if (!(c.model.temperature >= 0.0 && c.model.temperature <= 2.0)) {
    throw Error(ErrorCode::InvalidConfig, "temperature must lie in [0, 2]");
  }
  if (c.model.max_tokens <= 0) throw Error(ErrorCode::InvalidConfig, "max_tokens must be positive");
  if (!(c.bounds.moderate > 0.0 && c.bounds.moderate < c.bounds.almost_identical && c.bounds.almost_identical <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "similarity bounds must satisfy 0 < moderate < almost_identical <= 1");
  }
  std::vector<std::string> names;
  for (const auto& d : c.datasets) {
    if (std::find(names.begin(), names.end(), d.name) != names.end()) {
      throw Error(ErrorCode::InvalidConfig, "duplicate dataset name '" + d.name + "'");
    }
    names.push_back(d.name);
  }
}

}  // namespace ironylab
