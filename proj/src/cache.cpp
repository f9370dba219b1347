#include "ironylab/gateway.hpp"
#include "ironylab/text.hpp"

namespace ironylab {

using nlohmann::json;

ResponseCache::ResponseCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
  if (dir_) std::filesystem::create_directories(*dir_);
}

std::optional<CachedEntry> ResponseCache::get(const std::string& key) const {
  if (!dir_) {
    std::lock_guard lock(mutex_);
    auto it = memory_.find(key);
    if (it == memory_.end()) return std::nullopt;
    return it->second;
  }
  const auto path = *dir_ / (key + ".json");
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  std::string raw;
  try {
    raw = text::read_file(path);
  } catch (const Error&) {
    return std::nullopt;
  }
  json j = json::parse(raw, nullptr, false);
  // A half-written or foreign file is treated as a miss and overwritten later.
  if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) return std::nullopt;
  CachedEntry e;
  e.text = j["text"].get<std::string>();
  if (j.contains("provider_meta")) e.provider_meta = j["provider_meta"];
  return e;
}

void ResponseCache::put(const std::string& key, const CachedEntry& entry, const json& request_echo) {
  if (!dir_) {
    std::lock_guard lock(mutex_);
    memory_[key] = entry;
    return;
  }
  json j = {{"key", key}, {"text", entry.text}, {"provider_meta", entry.provider_meta}};
  if (!request_echo.is_null()) j["request"] = request_echo;
  text::write_file_atomic(*dir_ / (key + ".json"), j.dump(-1, ' ', false, json::error_handler_t::replace));
}

}  // namespace ironylab
