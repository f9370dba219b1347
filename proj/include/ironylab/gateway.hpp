#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ironylab/error.hpp"

namespace ironylab {

enum class ProviderKind { OpenAICompat, Gemini, Mock };

std::string_view to_string(ProviderKind p) noexcept;
std::optional<ProviderKind> provider_from_string(std::string_view name);

inline constexpr int kDefaultMaxTokens = 300;
inline constexpr double kDefaultTemperature = 0.3;

struct CompletionRequest {
  ProviderKind provider = ProviderKind::Mock;
  std::string model;
  std::string prompt;
  int max_tokens = kDefaultMaxTokens;
  double temperature = kDefaultTemperature;
};

// SHA-256 over a canonical encoding of every request field. Temperature is
// encoded with four fixed decimals so the key is identical across platforms.
std::string request_hash(const CompletionRequest& r);

struct ModelResponse {
  std::string text;
  std::string request_hash;
  bool from_cache = false;
  double latency_ms = 0.0;
  nlohmann::json provider_meta = nlohmann::json::object();
};

// ---------------------------------------------------------------------------
// Transport and providers

struct HttpRequest {
  std::string url;  // absolute, scheme://host[:port]/path[?query]
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Thrown by transports and providers. The gateway maps it onto an ErrorCode
// and decides whether to retry.
class ProviderFailure : public std::runtime_error {
 public:
  enum class Kind { Http, Timeout, Network, Malformed };

  ProviderFailure(Kind kind, int status, const std::string& message)
      : std::runtime_error(message), kind_(kind), status_(status) {}

  Kind kind() const noexcept { return kind_; }
  int status() const noexcept { return status_; }

 private:
  Kind kind_;
  int status_;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  // Returns any HTTP status; throws ProviderFailure(Timeout|Network) when no
  // response arrived.
  virtual HttpResponse post(const HttpRequest& request, std::chrono::milliseconds timeout) = 0;
};

std::shared_ptr<HttpTransport> make_http_transport();

struct Completion {
  std::string text;
  nlohmann::json meta = nlohmann::json::object();
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual Completion complete(const CompletionRequest& request) = 0;
  virtual std::vector<double> embed(const std::string& model, const std::string& text);
};

// OpenAI-compatible POST {base}/v1/chat/completions.
class OpenAICompatProvider : public Provider {
 public:
  OpenAICompatProvider(std::shared_ptr<HttpTransport> transport, std::string api_key,
                       std::string base_url = "https://api.openai.com",
                       std::chrono::milliseconds timeout = std::chrono::seconds(60));

  Completion complete(const CompletionRequest& request) override;
  std::vector<double> embed(const std::string& model, const std::string& text) override;

  static nlohmann::json request_body(const CompletionRequest& request);

 private:
  std::string endpoint(std::string_view path) const;
  HttpResponse send(const std::string& url, const nlohmann::json& body);

  std::shared_ptr<HttpTransport> transport_;
  std::string api_key_;
  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

// Gemini generateContent / embedContent.
class GeminiProvider : public Provider {
 public:
  GeminiProvider(std::shared_ptr<HttpTransport> transport, std::string api_key,
                 std::string base_url = "https://generativelanguage.googleapis.com",
                 std::chrono::milliseconds timeout = std::chrono::seconds(60));

  Completion complete(const CompletionRequest& request) override;
  std::vector<double> embed(const std::string& model, const std::string& text) override;

  static nlohmann::json request_body(const CompletionRequest& request);

 private:
  HttpResponse send(const std::string& url, const nlohmann::json& body);

  std::shared_ptr<HttpTransport> transport_;
  std::string api_key_;
  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

// Canned responses for offline runs. Rules are tried in order; a rule
// matches when every `contains` substring occurs in the prompt (or when its
// `request_hash` equals the request's). Script JSON:
//   {"default": "...", "rules": [{"contains": ["a", "b"], "response": "..."},
//                                {"contains": "c", "error": {"status": 503}},
//                                {"request_hash": "...", "timeout": true}]}
struct MockRule {
  std::vector<std::string> contains;
  std::optional<std::string> request_hash;
  std::optional<std::string> response;
  std::optional<int> error_status;
  bool timeout = false;
};

struct MockScript {
  std::vector<MockRule> rules;
  std::optional<std::string> default_response;

  static MockScript from_json(const nlohmann::json& j);
  static MockScript load(const std::filesystem::path& path);
};

class MockProvider : public Provider {
 public:
  explicit MockProvider(MockScript script = {});

  Completion complete(const CompletionRequest& request) override;
  std::vector<double> embed(const std::string& model, const std::string& text) override;

  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  MockScript script_;
  std::atomic<std::size_t> calls_{0};
};

// ---------------------------------------------------------------------------
// Cache

struct CachedEntry {
  std::string text;
  nlohmann::json provider_meta = nlohmann::json::object();
};

// Content-addressed response store. With a directory, entries are files
// named <hash>.json written atomically; without one, an in-process map.
class ResponseCache {
 public:
  explicit ResponseCache(std::optional<std::filesystem::path> dir = std::nullopt);

  std::optional<CachedEntry> get(const std::string& key) const;
  void put(const std::string& key, const CachedEntry& entry, const nlohmann::json& request_echo = {});

  const std::optional<std::filesystem::path>& directory() const noexcept { return dir_; }

 private:
  std::optional<std::filesystem::path> dir_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, CachedEntry> memory_;
};

// ---------------------------------------------------------------------------
// Gateway

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_backoff{1000};
  double jitter = 0.25;  // +/- fraction of each backoff
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct BatchOutcome {
  std::optional<ModelResponse> response;
  std::optional<Error> error;

  bool ok() const noexcept { return response.has_value(); }
};

struct GatewayStats {
  std::size_t live_calls = 0;  // provider invocations, including retries
  std::size_t cache_hits = 0;
  std::size_t retries = 0;
};

class Gateway {
 public:
  explicit Gateway(std::shared_ptr<ResponseCache> cache = std::make_shared<ResponseCache>(),
                   RetryPolicy retry = {}, Sleeper sleeper = {});

  void register_provider(ProviderKind kind, std::shared_ptr<Provider> provider);
  bool has_provider(ProviderKind kind) const;

  // Thread-safe. Throws Error(AuthError | RateLimited | ProviderError | Timeout).
  ModelResponse complete(const CompletionRequest& request);

  // Order-aligned; at most `parallelism` requests in flight; failures land in
  // their own slot.
  std::vector<BatchOutcome> complete_batch(std::span<const CompletionRequest> requests, std::size_t parallelism);

  // Embedding call with the same cache and retry behaviour, keyed by text.
  std::vector<double> embed(ProviderKind kind, const std::string& model, const std::string& text);

  GatewayStats stats() const;

  // Registers OpenAI-compatible and Gemini providers from OPENAI_API_KEY,
  // OPENAI_BASE_URL and GEMINI_API_KEY, plus the mock provider.
  static std::unique_ptr<Gateway> from_environment(std::optional<std::filesystem::path> cache_dir,
                                                   MockScript mock_script = {},
                                                   std::shared_ptr<HttpTransport> transport = nullptr);

 private:
  template <typename Call>
  auto with_retries(Call&& call) -> decltype(call());

  std::shared_ptr<Provider> provider(ProviderKind kind) const;
  std::chrono::milliseconds backoff(int attempt);

  std::shared_ptr<ResponseCache> cache_;
  RetryPolicy retry_;
  Sleeper sleeper_;
  mutable std::mutex mutex_;
  std::map<ProviderKind, std::shared_ptr<Provider>> providers_;
  std::atomic<std::size_t> live_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
  std::atomic<std::size_t> retries_{0};
  std::mutex rng_mutex_;
  std::uint64_t rng_state_ = 0x9E3779B97F4A7C15ULL;
};

}  // namespace ironylab
