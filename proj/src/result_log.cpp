#include "ironylab/result_log.hpp"

#include <sstream>

#include "ironylab/text.hpp"

namespace ironylab {

using nlohmann::json;

namespace {

json opt(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

json ballot_json(const Ballot& b) { return b ? json(to_int(*b)) : json(nullptr); }

Ballot ballot_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  const int v = j.get<int>();
  if (v != 0 && v != 1) throw Error(ErrorCode::Io, "ballot must be 0, 1 or null");
  return v == 1 ? Label::Ironic : Label::NonIronic;
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<std::string>();
}

std::optional<std::size_t> opt_index(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<std::size_t>();
}

}  // namespace

LogRecord to_log_record(const StatementRecord& s, const IdadpResult& r) {
  LogRecord l;
  l.statement_id = s.id;
  l.strategy = std::string(to_string(r.strategy));
  l.text = s.text;
  l.gold = s.gold;
  l.intended = s.intended;
  l.source = s.source;
  l.ballots = r.vote.ballots;
  l.final = r.vote.final;
  for (const auto& o : r.outputs) {
    l.probability.push_back(o.probability);
    std::vector<std::string> notes;
    for (auto n : o.parse_notes) notes.emplace_back(to_string(n));
    l.parse_notes.push_back(std::move(notes));
    l.raw.push_back(o.raw);
  }
  l.reason = r.reason;
  l.rephrase = r.rephrase;
  l.reason_source = r.reason_source;
  l.rephrase_source = r.rephrase_source;
  l.request_hashes = r.request_hashes;
  l.timestamps = r.timestamps;
  l.errors = r.errors;
  return l;
}

LogRecord failed_record(const StatementRecord& s, Method method, const Error& error) {
  LogRecord l;
  l.statement_id = s.id;
  l.strategy = std::string(to_string(method));
  l.text = s.text;
  l.gold = s.gold;
  l.intended = s.intended;
  l.source = s.source;
  l.error = error.what();
  return l;
}

json to_json(const LogRecord& r) {
  json ballots = json::array();
  for (const auto& b : r.ballots) ballots.push_back(ballot_json(b));
  json probability = json::array();
  for (const auto& p : r.probability) probability.push_back(p ? json(*p) : json(nullptr));
  json errors = json::array();
  for (const auto& e : r.errors) errors.push_back(opt(e));
  return {
      {"schema_version", kLogSchemaVersion},
      {"statement_id", r.statement_id},
      {"strategy", r.strategy},
      {"text", r.text},
      {"gold", to_int(r.gold)},
      {"intended", opt(r.intended)},
      {"source", r.source},
      {"ballots", ballots},
      {"final", r.final ? json(to_int(*r.final)) : json(nullptr)},
      {"probability", probability},
      {"reason", opt(r.reason)},
      {"rephrase", opt(r.rephrase)},
      {"reason_source", r.reason_source ? json(*r.reason_source) : json(nullptr)},
      {"rephrase_source", r.rephrase_source ? json(*r.rephrase_source) : json(nullptr)},
      {"parse_notes", r.parse_notes},
      {"request_hashes", r.request_hashes},
      {"timestamps", r.timestamps},
      {"errors", errors},
      {"raw", r.raw},
      {"error", opt(r.error)},
  };
}

LogRecord log_record_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Io, "log line is not an object");
  const auto version = j.find("schema_version");
  if (version == j.end() || !version->is_number_integer()) throw Error(ErrorCode::Io, "log line lacks schema_version");
  if (version->get<int>() != kLogSchemaVersion) {
    throw Error(ErrorCode::SchemaMismatch, "log schema_version " + std::to_string(version->get<int>()) +
                                               " (expected " + std::to_string(kLogSchemaVersion) + ")");
  }
  try {
    LogRecord r;
    r.statement_id = j.at("statement_id").get<std::string>();
    r.strategy = j.at("strategy").get<std::string>();
    r.text = j.at("text").get<std::string>();
    r.gold = j.at("gold").get<int>() == 1 ? Label::Ironic : Label::NonIronic;
    r.intended = opt_string(j, "intended");
    r.source = j.value("source", std::string());
    for (const auto& b : j.at("ballots")) r.ballots.push_back(ballot_from(b));
    r.final = ballot_from(j.at("final"));
    for (const auto& p : j.at("probability")) {
      r.probability.push_back(p.is_null() ? std::nullopt : std::optional<double>(p.get<double>()));
    }
    r.reason = opt_string(j, "reason");
    r.rephrase = opt_string(j, "rephrase");
    r.reason_source = opt_index(j, "reason_source");
    r.rephrase_source = opt_index(j, "rephrase_source");
    r.parse_notes = j.at("parse_notes").get<std::vector<std::vector<std::string>>>();
    r.request_hashes = j.at("request_hashes").get<std::vector<std::string>>();
    r.timestamps = j.at("timestamps").get<std::vector<std::string>>();
    for (const auto& e : j.at("errors")) r.errors.push_back(e.is_null() ? std::nullopt : std::optional(e.get<std::string>()));
    if (j.contains("raw")) r.raw = j["raw"].get<std::vector<std::string>>();
    r.error = opt_string(j, "error");
    if (!r.error && !r.final) throw Error(ErrorCode::Io, "record without final label or error");
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("malformed log record: ") + e.what());
  }
}

std::string serialize_line(const LogRecord& r) {
  return to_json(r).dump(-1, ' ', false, json::error_handler_t::replace);
}

LogContents read_log(const std::filesystem::path& path) {
  LogContents out;
  std::istringstream in(text::read_file(path));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      out.quarantined.push_back({n, line, "invalid JSON"});
      continue;
    }
    try {
      out.records.push_back(log_record_from_json(j));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SchemaMismatch) throw;
      out.quarantined.push_back({n, line, e.what()});
    }
  }
  return out;
}

LogWriter::LogWriter(const std::filesystem::path& path, bool append) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
  if (!out_) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
}

void LogWriter::write(const LogRecord& r) {
  const std::string line = serialize_line(r) + "\n";
  std::lock_guard lock(mutex_);
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  out_.flush();
  if (!out_) throw Error(ErrorCode::Io, "failed writing result log");
}

void write_log_atomic(const std::filesystem::path& path, const std::vector<LogRecord>& records) {
  std::string body;
  for (const auto& r : records) body += serialize_line(r) + "\n";
  text::write_file_atomic(path, body);
}

}  // namespace ironylab
