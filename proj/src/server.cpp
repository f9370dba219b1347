#include "ironylab/server.hpp"

#include <charconv>
#include <map>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "ironylab/annotation.hpp"
#include "ironylab/metrics.hpp"
#include "ironylab/result_log.hpp"
#include "ironylab/text.hpp"

namespace ironylab {

using nlohmann::json;

namespace {

std::size_t parse_size(const httplib::Request& req, const char* key, std::size_t fallback) {
  if (!req.has_param(key)) return fallback;
  const std::string v = req.get_param_value(key);
  std::size_t out = fallback;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  return res.ec == std::errc() && res.ptr == v.data() + v.size() ? out : fallback;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(-1, ' ', false, json::error_handler_t::replace), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

// 0 or 1 as a JSON integer; anything else is malformed.
std::optional<int> binary(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || !it->is_number_integer()) return std::nullopt;
  const auto v = it->get<std::int64_t>();
  if (v != 0 && v != 1) return std::nullopt;
  return static_cast<int>(v);
}

}  // namespace

struct AnnotationServer::Impl {
  ServeOptions options;
  std::vector<LogRecord> items;
  std::map<std::string, std::size_t> index;
  std::optional<double> fre_mean;
  std::optional<double> fre_std;
  std::unique_ptr<AnnotationStore> store;
  httplib::Server server;

  explicit Impl(ServeOptions o) : options(std::move(o)) {
    LogContents log = read_log(options.log);
    if (!log.quarantined.empty()) spdlog::warn("ignoring {} corrupt log line(s)", log.quarantined.size());
    std::vector<std::string> reasons;
    for (auto& r : log.records) {
      if (r.failed() || index.contains(r.statement_id)) continue;
      index[r.statement_id] = items.size();
      if (r.reason) reasons.push_back(*r.reason);
      items.push_back(std::move(r));
    }
    const ReasoningReport rr = reasoning_report(reasons, std::nullopt);
    fre_mean = rr.fre_mean;
    fre_std = rr.fre_std;
    std::filesystem::path ann = options.annotations.value_or(std::filesystem::path(options.log.string() + ".annotations.jsonl"));
    store = std::make_unique<AnnotationStore>(ann);
    routes();
  }

  // Items assigned to `annotator`: every k-th item by position when
  // annotators are registered, otherwise all of them.
  std::vector<std::size_t> assigned(const std::string& annotator) const {
    std::vector<std::size_t> out;
    const auto& names = options.annotators;
    const auto slot = std::find(names.begin(), names.end(), annotator);
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (annotator.empty() || slot == names.end() ||
          i % names.size() == static_cast<std::size_t>(slot - names.begin())) {
        out.push_back(i);
      }
    }
    return out;
  }

  json item_view(std::size_t i, const std::string& annotator) const {
    const LogRecord& r = items[i];
    json j = {{"item_id", r.statement_id},
              {"position", i + 1},
              {"total", items.size()},
              {"text", r.text},
              {"reason", r.reason ? json(*r.reason) : json(nullptr)},
              {"rephrase", r.rephrase ? json(*r.rephrase) : json(nullptr)},
              {"model_label", r.final ? json(to_int(*r.final)) : json(nullptr)},
              {"strategy", r.strategy},
              {"source", r.source}};
    if (options.reveal_gold) j["gold"] = to_int(r.gold);
    j["prior"] = nullptr;
    j["version"] = 0;
    if (!annotator.empty()) {
      if (auto prior = store->get(r.statement_id, annotator)) {
        j["prior"] = to_json(*prior);
        j["version"] = prior->version;
      }
    }
    return j;
  }

  json summary() const {
    const auto rubric = store->rubric();
    const HumanAggregate agg = human_aggregate(rubric);
    json j = {{"items", items.size()},
              {"annotated_items", agg.item_scores.size()},
              {"annotations", rubric.size()},
              {"F", fre_mean ? json(*fre_mean) : json(nullptr)},
              {"S", fre_std ? json(*fre_std) : json(nullptr)},
              {"H", agg.mean ? json(*agg.mean) : json(nullptr)},
              {"B", nullptr},
              {"pending", !agg.mean.has_value()}};
    if (agg.mean && fre_mean) j["B"] = b_measure(*fre_mean, *agg.mean);

    // Per source/strategy breakdown.
    std::map<std::pair<std::string, std::string>, std::pair<std::vector<std::string>, std::vector<RubricAnnotation>>> groups;
    for (const auto& r : items) {
      auto& g = groups[{r.source, r.strategy}];
      if (r.reason) g.first.push_back(*r.reason);
    }
    for (const auto& a : rubric) {
      const auto it = index.find(a.item_id);
      if (it == index.end()) continue;
      const auto& r = items[it->second];
      groups[{r.source, r.strategy}].second.push_back(a);
    }
    json list = json::array();
    for (const auto& [key, g] : groups) {
      const auto h = human_aggregate(g.second).mean;
      const ReasoningReport rr = reasoning_report(g.first, h);
      list.push_back({{"dataset", key.first},
                      {"strategy", key.second},
                      {"F", rr.fre_mean ? json(*rr.fre_mean) : json(nullptr)},
                      {"H", rr.human_mean ? json(*rr.human_mean) : json(nullptr)},
                      {"B", rr.b ? json(*rr.b) : json(nullptr)},
                      {"pending", rr.human_pending}});
    }
    j["groups"] = list;
    return j;
  }

  void routes() {
    server.Get("/api/items", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string annotator = req.has_param("annotator") ? req.get_param_value("annotator") : "";
      const auto mine = assigned(annotator);
      const std::size_t offset = parse_size(req, "offset", 0);
      const std::size_t limit = std::min<std::size_t>(parse_size(req, "limit", 50), 1000);
      json list = json::array();
      for (std::size_t k = offset; k < mine.size() && k < offset + limit; ++k) list.push_back(item_view(mine[k], annotator));
      send_json(res, 200, {{"total", mine.size()}, {"offset", offset}, {"limit", limit}, {"items", list}});
    });

    server.Get(R"(/api/items/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto it = index.find(req.matches[1].str());
      if (it == index.end()) return send_error(res, 404, "unknown item");
      const std::string annotator = req.has_param("annotator") ? req.get_param_value("annotator") : "";
      send_json(res, 200, item_view(it->second, annotator));
    });

    server.Post(R"(/api/items/([^/]+)/score)", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1].str();
      if (!index.contains(id)) return send_error(res, 404, "unknown item");
      const json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object()) return send_error(res, 400, "body must be a JSON object");
      std::string annotator;
      for (const char* key : {"annotator_id", "annotator"}) {
        if (body.contains(key) && body[key].is_string()) annotator = body[key].get<std::string>();
      }
      if (text::trim(annotator).empty()) return send_error(res, 422, "annotator_id is required");
      const auto c1 = binary(body, "contextual");
      const auto c2 = binary(body, "consistency");
      const auto c3 = binary(body, "clarity");
      if (!c1 || !c2 || !c3) return send_error(res, 422, "contextual, consistency and clarity must each be 0 or 1");
      std::optional<std::string> remarks;
      if (body.contains("remarks") && !body["remarks"].is_null()) {
        if (!body["remarks"].is_string()) return send_error(res, 422, "remarks must be a string");
        remarks = body["remarks"].get<std::string>();
      }
      std::optional<std::uint64_t> expected;
      if (body.contains("expected_version") && !body["expected_version"].is_null()) {
        if (!body["expected_version"].is_number_unsigned()) return send_error(res, 422, "expected_version must be >= 0");
        expected = body["expected_version"].get<std::uint64_t>();
      }
      std::optional<std::string> nonce;
      if (body.contains("nonce") && body["nonce"].is_string()) nonce = body["nonce"].get<std::string>();

      SubmitResult r;
      try {
        r = store->submit(id, annotator, {*c1, *c2, *c3}, remarks, expected, nonce);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::MalformedAnnotation) return send_error(res, 422, e.what());
        return send_error(res, 500, e.what());
      }
      if (r.status == SubmitStatus::Conflict) {
        json current = r.record.item_id.empty() ? json(nullptr) : to_json(r.record);
        return send_json(res, 409, {{"error", "version conflict"}, {"current", current}});
      }
      const int status = r.status == SubmitStatus::Created ? 201 : 200;
      send_json(res, status, {{"record", to_json(r.record)}, {"duplicate", r.status == SubmitStatus::Duplicate}});
    });

    server.Get(R"(/api/export(\.jsonl)?)", [this](const httplib::Request&, httplib::Response& res) {
      std::string body;
      for (const auto& r : store->current()) body += to_json(r).dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
      res.status = 200;
      res.set_content(body, "application/x-ndjson");
    });

    server.Get("/api/summary", [this](const httplib::Request&, httplib::Response& res) { send_json(res, 200, summary()); });

    if (options.static_dir && std::filesystem::is_directory(*options.static_dir)) {
      server.set_mount_point("/", options.static_dir->string());
    } else {
      server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("ironylab annotation API; no UI bundle configured.\n", "text/plain");
      });
    }
  }
};

AnnotationServer::AnnotationServer(ServeOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) throw Error(ErrorCode::Io, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void AnnotationServer::run() { impl_->server.listen_after_bind(); }

void AnnotationServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace ironylab
