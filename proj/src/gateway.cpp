#include "ironylab/gateway.hpp"

#include <charconv>
#include <cstdlib>
#include <thread>

#include "ironylab/text.hpp"

namespace ironylab {

using nlohmann::json;

std::string_view to_string(ProviderKind p) noexcept {
  switch (p) {
    case ProviderKind::OpenAICompat: return "openai";
    case ProviderKind::Gemini: return "gemini";
    case ProviderKind::Mock: return "mock";
  }
  return "mock";
}

std::optional<ProviderKind> provider_from_string(std::string_view name) {
  const std::string n = text::to_lower_ascii(name);
  if (n == "openai" || n == "openai-compat" || n == "openaicompat") return ProviderKind::OpenAICompat;
  if (n == "gemini") return ProviderKind::Gemini;
  if (n == "mock") return ProviderKind::Mock;
  return std::nullopt;
}

namespace {

std::string fixed4(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 4);
  return std::string(buf, res.ptr);
}

std::string embed_key(ProviderKind kind, const std::string& model, const std::string& text) {
  std::string canon = "ironylab.embed.v1\n";
  canon += to_string(kind);
  canon += '\n';
  canon += model;
  canon += '\n';
  canon += text;
  return text::sha256_hex(canon);
}

void validate(const CompletionRequest& r) {
  if (text::trim(r.prompt).empty()) throw Error(ErrorCode::EmptyInput, "prompt is empty");
  if (!(r.temperature >= 0.0 && r.temperature <= 2.0)) {
    throw Error(ErrorCode::InvalidConfig, "temperature must lie in [0, 2]");
  }
  if (r.max_tokens <= 0) throw Error(ErrorCode::InvalidConfig, "max_tokens must be positive");
}

}  // namespace

std::string request_hash(const CompletionRequest& r) {
  std::string canon = "ironylab.request.v1\n";
  canon += to_string(r.provider);
  canon += '\n';
  canon += r.model;
  canon += '\n';
  canon += std::to_string(r.max_tokens);
  canon += '\n';
  canon += fixed4(r.temperature);
  canon += '\n';
  canon += r.prompt;
  return text::sha256_hex(canon);
}

Gateway::Gateway(std::shared_ptr<ResponseCache> cache, RetryPolicy retry, Sleeper sleeper)
    : cache_(std::move(cache)), retry_(retry), sleeper_(std::move(sleeper)) {
  if (!cache_) cache_ = std::make_shared<ResponseCache>();
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

void Gateway::register_provider(ProviderKind kind, std::shared_ptr<Provider> provider) {
  std::lock_guard lock(mutex_);
  providers_[kind] = std::move(provider);
}

bool Gateway::has_provider(ProviderKind kind) const {
  std::lock_guard lock(mutex_);
  return providers_.count(kind) != 0;
}

std::shared_ptr<Provider> Gateway::provider(ProviderKind kind) const {
  std::lock_guard lock(mutex_);
  auto it = providers_.find(kind);
  if (it == providers_.end()) {
    throw Error(ErrorCode::ProviderError, "no provider registered for " + std::string(to_string(kind)));
  }
  return it->second;
}

std::chrono::milliseconds Gateway::backoff(int attempt) {
  const double base = static_cast<double>(retry_.base_backoff.count()) * static_cast<double>(1LL << attempt);
  double unit;
  {
    // splitmix64; jitter needs no reproducibility, only spread.
    std::lock_guard lock(rng_mutex_);
    std::uint64_t z = (rng_state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    unit = static_cast<double>(z >> 11) * 0x1.0p-53;
  }
  const double factor = 1.0 + retry_.jitter * (2.0 * unit - 1.0);
  return std::chrono::milliseconds(static_cast<long long>(base * factor));
}

template <typename Call>
auto Gateway::with_retries(Call&& call) -> decltype(call()) {
  for (int attempt = 0;; ++attempt) {
    try {
      live_calls_++;
      return call();
    } catch (const ProviderFailure& f) {
      bool retryable = false;
      ErrorCode final_code = ErrorCode::ProviderError;
      switch (f.kind()) {
        case ProviderFailure::Kind::Http:
          if (f.status() == 401 || f.status() == 403) throw Error(ErrorCode::AuthError, f.what());
          if (f.status() == 429) {
            retryable = true;
            final_code = ErrorCode::RateLimited;
          } else if (f.status() >= 500) {
            retryable = true;
          }
          break;
        case ProviderFailure::Kind::Timeout:
          retryable = true;
          final_code = ErrorCode::Timeout;
          break;
        case ProviderFailure::Kind::Network:
          retryable = true;
          break;
        case ProviderFailure::Kind::Malformed:
          break;
      }
      if (!retryable || attempt >= retry_.max_retries) {
        std::string msg = f.what();
        if (retryable) msg += " (after " + std::to_string(attempt) + " retries)";
        throw Error(final_code, msg);
      }
      retries_++;
      sleeper_(backoff(attempt));
    }
  }
}

ModelResponse Gateway::complete(const CompletionRequest& request) {
  validate(request);
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };

  ModelResponse out;
  out.request_hash = request_hash(request);
  if (auto hit = cache_->get(out.request_hash)) {
    cache_hits_++;
    out.text = std::move(hit->text);
    out.provider_meta = std::move(hit->provider_meta);
    out.from_cache = true;
    out.latency_ms = elapsed_ms();
    return out;
  }

  auto p = provider(request.provider);
  Completion c = with_retries([&] { return p->complete(request); });
  json echo = {{"provider", std::string(to_string(request.provider))},
               {"model", request.model},
               {"max_tokens", request.max_tokens},
               {"temperature", request.temperature},
               {"prompt", request.prompt}};
  cache_->put(out.request_hash, {c.text, c.meta}, echo);
  out.text = std::move(c.text);
  out.provider_meta = std::move(c.meta);
  out.latency_ms = elapsed_ms();
  return out;
}

std::vector<BatchOutcome> Gateway::complete_batch(std::span<const CompletionRequest> requests,
                                                  std::size_t parallelism) {
  if (parallelism == 0) throw Error(ErrorCode::InvalidConfig, "parallelism must be at least 1");
  std::vector<BatchOutcome> out(requests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < requests.size(); i = next++) {
      try {
        out[i].response = complete(requests[i]);
      } catch (const Error& e) {
        out[i].error = e;
      } catch (const std::exception& e) {
        out[i].error = Error(ErrorCode::ProviderError, e.what());
      }
    }
  };
  const std::size_t threads = std::min(parallelism, requests.size());
  if (threads <= 1) {
    worker();
    return out;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  return out;
}

std::vector<double> Gateway::embed(ProviderKind kind, const std::string& model, const std::string& text) {
  if (text::trim(text).empty()) throw Error(ErrorCode::EmptyInput, "cannot embed empty text");
  const std::string key = embed_key(kind, model, text);
  if (auto hit = cache_->get(key)) {
    json values = json::parse(hit->text, nullptr, false);
    if (values.is_array()) {
      cache_hits_++;
      return values.get<std::vector<double>>();
    }
  }
  auto p = provider(kind);
  std::vector<double> v = with_retries([&] { return p->embed(model, text); });
  cache_->put(key, {json(v).dump(), json::object()},
              {{"provider", std::string(to_string(kind))}, {"model", model}, {"embed", text}});
  return v;
}

GatewayStats Gateway::stats() const { return {live_calls_.load(), cache_hits_.load(), retries_.load()}; }

std::unique_ptr<Gateway> Gateway::from_environment(std::optional<std::filesystem::path> cache_dir,
                                                   MockScript mock_script,
                                                   std::shared_ptr<HttpTransport> transport) {
  auto env = [](const char* name) -> std::string {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string();
  };
  if (!cache_dir) {
    const std::string dir = env("IRONYLAB_CACHE_DIR");
    if (!dir.empty()) cache_dir = dir;
  }
  auto gw = std::make_unique<Gateway>(std::make_shared<ResponseCache>(cache_dir));
  if (!transport) transport = make_http_transport();
  std::string base = env("OPENAI_BASE_URL");
  if (base.empty()) base = "https://api.openai.com";
  gw->register_provider(ProviderKind::OpenAICompat,
                        std::make_shared<OpenAICompatProvider>(transport, env("OPENAI_API_KEY"), base));
  gw->register_provider(ProviderKind::Gemini, std::make_shared<GeminiProvider>(transport, env("GEMINI_API_KEY")));
  gw->register_provider(ProviderKind::Mock, std::make_shared<MockProvider>(std::move(mock_script)));
  return gw;
}

}  // namespace ironylab
