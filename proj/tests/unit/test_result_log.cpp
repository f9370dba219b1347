#include <doctest.h>

#include <fstream>

#include "ironylab/error.hpp"
#include "ironylab/result_log.hpp"
#include "ironylab/text.hpp"
#include "test_support.hpp"

using namespace ironylab;
using nlohmann::json;

namespace {

LogRecord sample_record(int i) {
  LogRecord r;
  r.statement_id = "s" + std::to_string(i);
  r.strategy = "idadp";
  r.text = "caf\xC3\xA9 \"quoted\" text " + std::to_string(i);
  r.gold = i % 2 ? Label::Ironic : Label::NonIronic;
  r.intended = i % 2 ? std::optional<std::string>("intended") : std::nullopt;
  r.source = "fixture";
  r.ballots = {Label::Ironic, std::nullopt, Label::NonIronic};
  r.final = Label::NonIronic;
  r.probability = {std::nullopt, std::nullopt, 0.35};
  r.reason = "because";
  r.rephrase = "plainly";
  r.reason_source = 0;
  r.rephrase_source = 2;
  r.parse_notes = {{}, {"no-json"}, {"threshold-overrides-json"}};
  r.request_hashes = {"h1", "h2", "h3"};
  r.timestamps = {"t1", "t2", "t3"};
  r.errors = {std::nullopt, std::nullopt, std::nullopt};
  r.raw = {"a", "b", "c"};
  return r;
}

}  // namespace

TEST_SUITE("result_log") {
  TEST_CASE("json round trip") {
    for (int i = 0; i < 4; ++i) {
      const auto r = sample_record(i);
      CHECK(log_record_from_json(to_json(r)) == r);
      CHECK(to_json(r)["schema_version"] == kLogSchemaVersion);
    }
  }

  TEST_CASE("labels serialize as 1 and 0") {
    const json j = to_json(sample_record(1));
    CHECK(j["gold"] == 1);
    CHECK(j["final"] == 0);
    CHECK(j["ballots"] == json::array({1, nullptr, 0}));
  }

  TEST_CASE("one line per record") {
    const std::string line = serialize_line(sample_record(3));
    CHECK(line.find('\n') == std::string::npos);
  }

  TEST_CASE("failed record") {
    StatementRecord s{"x", "text", Label::Ironic, std::nullopt, "src"};
    const auto r = failed_record(s, Method::Ps, Error(ErrorCode::AllPromptsFailed, "boom"));
    CHECK(r.failed());
    CHECK(r.strategy == "ps");
    CHECK(r.ballots.empty());
    CHECK(log_record_from_json(to_json(r)) == r);
  }

  TEST_CASE("writer plus reader with a torn tail") {
    testing::TempDir dir;
    const auto path = dir / "log.jsonl";
    {
      LogWriter w(path, false);
      for (int i = 0; i < 3; ++i) w.write(sample_record(i));
    }
    {
      std::ofstream out(path, std::ios::app);
      out << "{\"statement_id\": \"s9\", \"stra";
    }
    const auto contents = read_log(path);
    CHECK(contents.records.size() == 3);
    REQUIRE(contents.quarantined.size() == 1);
    CHECK(contents.quarantined[0].line == 4);
  }

  TEST_CASE("foreign schema version") {
    testing::TempDir dir;
    json j = to_json(sample_record(0));
    j["schema_version"] = 99;
    text::write_file_atomic(dir / "log.jsonl", j.dump() + "\n");
    try {
      read_log(dir / "log.jsonl");
      FAIL("expected SchemaMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SchemaMismatch);
    }
  }

  TEST_CASE("atomic rewrite keeps order") {
    testing::TempDir dir;
    std::vector<LogRecord> recs{sample_record(2), sample_record(0), sample_record(1)};
    write_log_atomic(dir / "log.jsonl", recs);
    CHECK(read_log(dir / "log.jsonl").records == recs);
  }
}
