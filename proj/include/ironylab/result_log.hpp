#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ironylab/pipeline.hpp"

namespace ironylab {

inline constexpr int kLogSchemaVersion = 1;

// One JSONL line per statement. Failed statements keep `error` set and an
// empty ballot list; they are re-run on resume.
struct LogRecord {
  std::string statement_id;
  std::string strategy;
  std::string text;
  Label gold = Label::NonIronic;
  std::optional<std::string> intended;
  std::string source;

  std::vector<Ballot> ballots;
  std::optional<Label> final;
  std::vector<std::optional<double>> probability;
  std::optional<std::string> reason;
  std::optional<std::string> rephrase;
  std::optional<std::size_t> reason_source;
  std::optional<std::size_t> rephrase_source;
  std::vector<std::vector<std::string>> parse_notes;
  std::vector<std::string> request_hashes;
  std::vector<std::string> timestamps;
  std::vector<std::optional<std::string>> errors;
  std::vector<std::string> raw;
  std::optional<std::string> error;

  bool failed() const noexcept { return error.has_value(); }
  bool operator==(const LogRecord&) const = default;
};

LogRecord to_log_record(const StatementRecord& statement, const IdadpResult& result);
LogRecord failed_record(const StatementRecord& statement, Method method, const Error& error);

nlohmann::json to_json(const LogRecord& r);
// SchemaMismatch on a foreign schema_version, Error(Io) for anything else
// that does not fit.
LogRecord log_record_from_json(const nlohmann::json& j);

struct QuarantinedLine {
  std::size_t line = 0;  // 1-based
  std::string content;
  std::string reason;
};

struct LogContents {
  std::vector<LogRecord> records;
  std::vector<QuarantinedLine> quarantined;
};

// Unparsable lines are quarantined rather than fatal. A well-formed line with
// another schema version throws SchemaMismatch.
LogContents read_log(const std::filesystem::path& path);

std::string serialize_line(const LogRecord& r);

// Appends one line per record, flushed immediately so an interrupted run
// leaves valid JSONL behind.
class LogWriter {
 public:
  LogWriter(const std::filesystem::path& path, bool append);

  void write(const LogRecord& r);

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

// Replaces the file with `records` in the given order.
void write_log_atomic(const std::filesystem::path& path, const std::vector<LogRecord>& records);

}  // namespace ironylab
