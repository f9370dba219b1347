#include <fstream>

#include "ironylab/embedding.hpp"
#include "ironylab/gateway.hpp"
#include "ironylab/text.hpp"

namespace ironylab {

using nlohmann::json;

namespace {

std::string trim_slash(std::string s) {
  while (!s.empty() && s.back() == '/') s.pop_back();
  return s;
}

json parse_body(const HttpResponse& r) {
  json body = json::parse(r.body, nullptr, /*allow_exceptions=*/false);
  if (body.is_discarded()) {
    throw ProviderFailure(ProviderFailure::Kind::Malformed, r.status, "response body is not JSON");
  }
  return body;
}

void require_ok(const HttpResponse& r, std::string_view who) {
  if (r.status >= 200 && r.status < 300) return;
  std::string snippet = r.body.substr(0, 300);
  throw ProviderFailure(ProviderFailure::Kind::Http, r.status,
                        std::string(who) + " returned HTTP " + std::to_string(r.status) + ": " + snippet);
}

std::vector<double> to_vector(const json& values) {
  if (!values.is_array()) throw ProviderFailure(ProviderFailure::Kind::Malformed, 200, "embedding is not an array");
  std::vector<double> v;
  v.reserve(values.size());
  for (const auto& x : values) {
    if (!x.is_number()) throw ProviderFailure(ProviderFailure::Kind::Malformed, 200, "embedding has non-numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace

std::vector<double> Provider::embed(const std::string&, const std::string&) {
  throw ProviderFailure(ProviderFailure::Kind::Malformed, 0, "provider does not support embeddings");
}

// --- OpenAI compatible -------------------------------------------------------

OpenAICompatProvider::OpenAICompatProvider(std::shared_ptr<HttpTransport> transport, std::string api_key,
                                           std::string base_url, std::chrono::milliseconds timeout)
    : transport_(std::move(transport)),
      api_key_(std::move(api_key)),
      base_url_(trim_slash(std::move(base_url))),
      timeout_(timeout) {}

std::string OpenAICompatProvider::endpoint(std::string_view path) const {
  // Accept both "https://host" and "https://host/v1" style base URLs.
  if (base_url_.ends_with("/v1")) return base_url_ + std::string(path);
  return base_url_ + "/v1" + std::string(path);
}

json OpenAICompatProvider::request_body(const CompletionRequest& r) {
  return {{"model", r.model},
          {"messages", json::array({{{"role", "user"}, {"content", r.prompt}}})},
          {"max_tokens", r.max_tokens},
          {"temperature", r.temperature}};
}

HttpResponse OpenAICompatProvider::send(const std::string& url, const json& body) {
  if (api_key_.empty()) throw Error(ErrorCode::AuthError, "OPENAI_API_KEY is not set");
  HttpRequest req;
  req.url = url;
  req.headers = {{"Authorization", "Bearer " + api_key_}, {"Content-Type", "application/json"}};
  req.body = body.dump(-1, ' ', false, json::error_handler_t::replace);
  return transport_->post(req, timeout_);
}

Completion OpenAICompatProvider::complete(const CompletionRequest& request) {
  const HttpResponse r = send(endpoint("/chat/completions"), request_body(request));
  require_ok(r, "chat/completions");
  const json body = parse_body(r);
  Completion c;
  try {
    const json& choice = body.at("choices").at(0);
    const json& content = choice.at("message").at("content");
    c.text = content.is_string() ? content.get<std::string>() : std::string();
    c.meta["finish_reason"] = choice.value("finish_reason", json(nullptr));
  } catch (const json::exception& e) {
    throw ProviderFailure(ProviderFailure::Kind::Malformed, r.status, std::string("unexpected response: ") + e.what());
  }
  if (body.contains("usage")) c.meta["usage"] = body["usage"];
  if (body.contains("model")) c.meta["model"] = body["model"];
  return c;
}

std::vector<double> OpenAICompatProvider::embed(const std::string& model, const std::string& text) {
  const HttpResponse r = send(endpoint("/embeddings"), {{"model", model}, {"input", text}});
  require_ok(r, "embeddings");
  const json body = parse_body(r);
  try {
    return to_vector(body.at("data").at(0).at("embedding"));
  } catch (const json::exception& e) {
    throw ProviderFailure(ProviderFailure::Kind::Malformed, r.status, std::string("unexpected response: ") + e.what());
  }
}

// --- Gemini ------------------------------------------------------------------

GeminiProvider::GeminiProvider(std::shared_ptr<HttpTransport> transport, std::string api_key, std::string base_url,
                               std::chrono::milliseconds timeout)
    : transport_(std::move(transport)),
      api_key_(std::move(api_key)),
      base_url_(trim_slash(std::move(base_url))),
      timeout_(timeout) {}

json GeminiProvider::request_body(const CompletionRequest& r) {
  return {{"contents", json::array({{{"role", "user"}, {"parts", json::array({{{"text", r.prompt}}})}}})},
          {"generationConfig", {{"maxOutputTokens", r.max_tokens}, {"temperature", r.temperature}}}};
}

HttpResponse GeminiProvider::send(const std::string& url, const json& body) {
  if (api_key_.empty()) throw Error(ErrorCode::AuthError, "GEMINI_API_KEY is not set");
  HttpRequest req;
  req.url = url;
  req.headers = {{"x-goog-api-key", api_key_}, {"Content-Type", "application/json"}};
  req.body = body.dump(-1, ' ', false, json::error_handler_t::replace);
  return transport_->post(req, timeout_);
}

Completion GeminiProvider::complete(const CompletionRequest& request) {
  const HttpResponse r = send(base_url_ + "/v1beta/models/" + request.model + ":generateContent", request_body(request));
  require_ok(r, "generateContent");
  const json body = parse_body(r);
  Completion c;
  try {
    const json& candidate = body.at("candidates").at(0);
    if (candidate.contains("content") && candidate["content"].contains("parts")) {
      for (const auto& part : candidate["content"]["parts"]) {
        if (part.contains("text") && part["text"].is_string()) c.text += part["text"].get<std::string>();
      }
    }
    c.meta["finish_reason"] = candidate.value("finishReason", json(nullptr));
  } catch (const json::exception& e) {
    throw ProviderFailure(ProviderFailure::Kind::Malformed, r.status, std::string("unexpected response: ") + e.what());
  }
  if (body.contains("usageMetadata")) c.meta["usage"] = body["usageMetadata"];
  return c;
}

std::vector<double> GeminiProvider::embed(const std::string& model, const std::string& text) {
  const json body = {{"model", "models/" + model}, {"content", {{"parts", json::array({{{"text", text}}})}}}};
  const HttpResponse r = send(base_url_ + "/v1beta/models/" + model + ":embedContent", body);
  require_ok(r, "embedContent");
  const json parsed = parse_body(r);
  try {
    return to_vector(parsed.at("embedding").at("values"));
  } catch (const json::exception& e) {
    throw ProviderFailure(ProviderFailure::Kind::Malformed, r.status, std::string("unexpected response: ") + e.what());
  }
}

// --- Mock --------------------------------------------------------------------

MockScript MockScript::from_json(const json& j) {
  MockScript script;
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "mock script must be a JSON object");
  if (j.contains("default") && j["default"].is_string()) script.default_response = j["default"].get<std::string>();
  if (j.contains("rules")) {
    for (const auto& r : j.at("rules")) {
      MockRule rule;
      if (r.contains("contains")) {
        const auto& c = r["contains"];
        if (c.is_string()) {
          rule.contains.push_back(c.get<std::string>());
        } else {
          rule.contains = c.get<std::vector<std::string>>();
        }
      }
      if (r.contains("request_hash")) rule.request_hash = r["request_hash"].get<std::string>();
      if (r.contains("response")) rule.response = r["response"].get<std::string>();
      if (r.contains("error")) rule.error_status = r["error"].value("status", 500);
      rule.timeout = r.value("timeout", false);
      if (rule.contains.empty() && !rule.request_hash) {
        throw Error(ErrorCode::InvalidConfig, "mock rule needs 'contains' or 'request_hash'");
      }
      if (!rule.response && !rule.error_status && !rule.timeout) {
        throw Error(ErrorCode::InvalidConfig, "mock rule needs 'response', 'error' or 'timeout'");
      }
      script.rules.push_back(std::move(rule));
    }
  }
  return script;
}

MockScript MockScript::load(const std::filesystem::path& path) {
  json j = json::parse(text::read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::InvalidConfig, "mock script " + path.string() + " is not valid JSON");
  return from_json(j);
}

MockProvider::MockProvider(MockScript script) : script_(std::move(script)) {}

Completion MockProvider::complete(const CompletionRequest& request) {
  calls_++;
  std::optional<std::string> hash;
  for (const auto& rule : script_.rules) {
    bool match = true;
    if (rule.request_hash) {
      if (!hash) hash = request_hash(request);
      match = *hash == *rule.request_hash;
    }
    for (const auto& needle : rule.contains) {
      if (!match) break;
      match = request.prompt.find(needle) != std::string::npos;
    }
    if (!match) continue;
    if (rule.timeout) throw ProviderFailure(ProviderFailure::Kind::Timeout, 0, "mock timeout");
    if (rule.error_status) {
      throw ProviderFailure(ProviderFailure::Kind::Http, *rule.error_status,
                            "mock error " + std::to_string(*rule.error_status));
    }
    return {*rule.response, {{"provider", "mock"}}};
  }
  if (script_.default_response) return {*script_.default_response, {{"provider", "mock"}, {"default", true}}};
  throw ProviderFailure(ProviderFailure::Kind::Http, 404, "no mock rule matched the prompt");
}

std::vector<double> MockProvider::embed(const std::string&, const std::string& text) {
  calls_++;
  return HashingEmbedder{}.embed(text);
}

}  // namespace ironylab
