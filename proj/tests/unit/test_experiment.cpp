#include <doctest.h>

#include <fstream>

#include "ironylab/error.hpp"
#include "ironylab/experiment.hpp"
#include "ironylab/text.hpp"
#include "test_support.hpp"

using namespace ironylab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ExperimentConfig e2e_config(const fs::path& out) {
  auto c = load_config(testing::data_dir() / "e2e" / "experiment.toml",
                       [](const std::string&) -> std::optional<std::string> { return std::nullopt; });
  c.out_dir = out;
  return c;
}

json expected() { return json::parse(text::read_file(testing::data_dir() / "e2e" / "expected.json")); }

void truncate_lines(const fs::path& p, std::size_t keep, const std::string& tail = "") {
  std::ifstream in(p);
  std::string kept;
  std::string line;
  for (std::size_t i = 0; i < keep && std::getline(in, line); ++i) kept += line + "\n";
  in.close();
  text::write_file_atomic(p, kept + tail);
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("fixture run matches the hand oracle") {
    testing::TempDir dir;
    const auto out = run_experiment(e2e_config(dir.path()));
    const json want = expected();
    REQUIRE(out.report.datasets.size() == 1);
    const auto& d = out.report.datasets[0];
    CHECK(d.evaluated == want["evaluated"].get<std::size_t>());
    CHECK(d.failed == 0);
    CHECK(d.abstentions == want["abstentions"].get<std::size_t>());
    CHECK(d.unanimous == want["unanimous"].get<std::size_t>());
    REQUIRE(d.detection);
    CHECK(d.detection->tp == want["confusion"]["tp"].get<std::size_t>());
    CHECK(d.detection->fp == want["confusion"]["fp"].get<std::size_t>());
    CHECK(d.detection->fn == want["confusion"]["fn"].get<std::size_t>());
    CHECK(d.detection->tn == want["confusion"]["tn"].get<std::size_t>());
    CHECK(d.detection->micro_f1 == doctest::Approx(want["micro_f1"].get<double>()));
    CHECK(d.detection->macro_precision == doctest::Approx(want["macro_precision"].get<double>()));
    CHECK(d.detection->macro_recall == doctest::Approx(want["macro_recall"].get<double>()));
    CHECK(out.stats.live_calls == want["mock_calls"].get<std::size_t>());
    REQUIRE(d.similarity);
    CHECK(d.similarity->scores.size() == want["similarity_items"].get<std::size_t>());
    CHECK(d.reasoning.human_pending);

    const auto log = read_log(out.logs.at(0));
    REQUIRE(log.records.size() == 10);
    for (const auto& r : log.records) {
      CAPTURE(r.statement_id);
      REQUIRE(r.final);
      CHECK(to_int(*r.final) == want["finals"][r.statement_id].get<int>());
    }
    CHECK(fs::exists(out.report_json));
    CHECK(fs::exists(out.report_csv));
  }

  TEST_CASE("reports are byte identical across runs and parallelism") {
    testing::TempDir a, b;
    auto ca = e2e_config(a.path());
    auto cb = e2e_config(b.path());
    ca.parallelism = 1;
    cb.parallelism = 4;
    run_experiment(ca);
    run_experiment(cb);
    const std::string ja = text::read_file(a / "report.json");
    CHECK(ja == text::read_file(b / "report.json"));
    CHECK(text::read_file(a / "report.csv") == text::read_file(b / "report.csv"));
    run_experiment(ca);
    CHECK(ja == text::read_file(a / "report.json"));
  }

  TEST_CASE("resume after an interrupt reproduces the report") {
    testing::TempDir dir;
    const auto cfg = e2e_config(dir.path());
    const auto first = run_experiment(cfg);
    const std::string report = text::read_file(first.report_json);
    truncate_lines(first.logs[0], 5, "{\"statement_id\": \"s0");
    RunOptions opts;
    const auto again = resume(cfg, opts);
    CHECK(again.stats.resumed == 5);
    CHECK(again.stats.executed == 5);
    CHECK(again.stats.live_calls == 15);
    CHECK(again.stats.quarantined == 1);
    CHECK(fs::exists(fs::path(first.logs[0].string() + ".quarantine")));
    CHECK(text::read_file(again.report_json) == report);
    CHECK(read_log(first.logs[0]).records.size() == 10);
  }

  TEST_CASE("resume on a complete log makes no calls") {
    testing::TempDir dir;
    const auto cfg = e2e_config(dir.path());
    run_experiment(cfg);
    const auto again = resume(cfg);
    CHECK(again.stats.live_calls == 0);
    CHECK(again.stats.resumed == 10);
  }

  TEST_CASE("warm disk cache serves every successful response") {
    testing::TempDir dir, cache;
    auto cfg = e2e_config(dir.path());
    cfg.cache_dir = cache.path();
    const auto cold = run_experiment(cfg);
    CHECK(cold.stats.live_calls == 30);
    const auto warm = run_experiment(cfg);
    // the scripted 400 for s08 is not cached
    CHECK(warm.stats.live_calls == 1);
    CHECK(warm.stats.cache_hits == 29);
    CHECK(text::read_file(warm.report_json) == text::read_file(cold.report_json));
  }

  TEST_CASE("oversized sample fails before any provider call") {
    testing::TempDir dir;
    auto cfg = e2e_config(dir.path());
    auto tiny = cfg.datasets[0];
    tiny.name = "tiny";
    tiny.path = dir / "tiny.csv";
    text::write_file_atomic(tiny.path, "id,text,label,intended\nt1,one line,1,\nt2,two line,0,\n");
    cfg.datasets.push_back(tiny);
    cfg.limit = 5;
    try {
      run_experiment(cfg);
      FAIL("expected SampleTooLarge");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SampleTooLarge);
    }
    CHECK_FALSE(fs::exists(log_path(cfg, "e2e")));
  }

  TEST_CASE("resume refuses a log from another schema") {
    testing::TempDir dir;
    const auto cfg = e2e_config(dir.path());
    const auto first = run_experiment(cfg);
    std::string body = text::read_file(first.logs[0]);
    const auto pos = body.find("\"schema_version\":1");
    REQUIRE(pos != std::string::npos);
    body.replace(pos, 18, "\"schema_version\":7");
    text::write_file_atomic(first.logs[0], body);
    try {
      resume(cfg);
      FAIL("expected SchemaMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SchemaMismatch);
    }
  }

  TEST_CASE("limit draws a stratified sample") {
    testing::TempDir dir;
    auto cfg = e2e_config(dir.path());
    cfg.limit = 4;
    cfg.stratified = true;
    const auto out = run_experiment(cfg);
    CHECK(out.report.datasets[0].evaluated == 4);
    CHECK(out.report.datasets[0].stats.ironic_ratio == doctest::Approx(0.5));
  }

  TEST_CASE("auto-cot exemplars") {
    Corpus c;
    for (int i = 0; i < 12; ++i) {
      c.records.push_back({"r" + std::to_string(i), "statement " + std::to_string(i),
                           i % 2 ? Label::Ironic : Label::NonIronic, std::nullopt, "x"});
    }
    Gateway gw;
    gw.register_provider(ProviderKind::Mock, std::make_shared<MockProvider>(MockScript::from_json(
                                                 {{"default", "Reason: short reason\nover two lines.\n{\"irony\": 1}"}})));
    const auto ex = auto_cot_exemplars(c, gw, {}, 42);
    REQUIRE(ex.size() == 6);
    for (const auto& e : ex) CHECK(e.reasoning.find('\n') == std::string::npos);
    CHECK(ex == auto_cot_exemplars(c, gw, {}, 42));

    Gateway empty;
    empty.register_provider(ProviderKind::Mock, std::make_shared<MockProvider>(MockScript::from_json({{"default", "no idea"}})));
    CHECK_THROWS_AS(auto_cot_exemplars(c, empty, {}, 42), Error);
  }

  TEST_CASE("knowledge extraction with a mock") {
    Gateway gw;
    gw.register_provider(ProviderKind::Mock, std::make_shared<MockProvider>(MockScript::from_json(json::parse(R"({
      "rules": [{"contains": "Act as an annotator", "response": "Irony is a gap between words and meaning."}],
      "default": "Sure."})"))));
    const auto k = extract_knowledge(gw, {});
    CHECK(k.definition == "Irony is a gap between words and meaning.");
    CHECK(gw.stats().live_calls == 4);
  }
}

TEST_SUITE("report") {
  TEST_CASE("csv layout") {
    testing::TempDir dir;
    const auto out = run_experiment(e2e_config(dir.path()));
    const std::string csv = text::read_file(out.report_csv);
    CHECK(csv.starts_with("dataset,strategy,P,R,F1,F,S,H,B\n"));
    CHECK(csv.find("e2e,idadp,0.7083,0.7000,0.7000,") != std::string::npos);
    CHECK(csv.ends_with(",,\n"));
  }

  TEST_CASE("json report carries the schema and settings") {
    testing::TempDir dir;
    const auto out = run_experiment(e2e_config(dir.path()));
    const json j = json::parse(text::read_file(out.report_json));
    CHECK(j["schema_version"] == kReportSchemaVersion);
    CHECK(j["strategy"] == "idadp");
    CHECK(j["provider"] == "mock");
    CHECK(j["datasets"][0]["dataset"] == "e2e");
    CHECK(report_json(out.report) == text::read_file(out.report_json));
  }

  TEST_CASE("annotations fill H and B") {
    testing::TempDir dir;
    const auto out = run_experiment(e2e_config(dir.path()));
    const auto log = read_log(out.logs[0]);
    const std::vector<RubricAnnotation> anns{
        {"s01", "a", {1, 1, 1}}, {"s02", "a", {1, 1, 0}}, {"s03", "a", {1, 0, 0}}, {"s04", "a", {0, 0, 0}},
        {"s05", "a", {1, 1, 1}}};
    HashingEmbedder e;
    const auto d = evaluate_records("e2e", log.records, anns, &e);
    REQUIRE(d.reasoning.human_mean);
    CHECK(*d.reasoning.human_mean == doctest::Approx(1.8));
    CHECK(*d.reasoning.b == doctest::Approx(*d.reasoning.fre_mean / 100 + 0.6));
  }

  TEST_CASE("failed records only count as failed") {
    LogRecord ok;
    ok.statement_id = "a";
    ok.strategy = "idadp";
    ok.text = "one two";
    ok.gold = Label::Ironic;
    ok.ballots = {Label::Ironic};
    ok.final = Label::Ironic;
    ok.reason = "The cat sat on the mat.";
    LogRecord bad = ok;
    bad.statement_id = "b";
    bad.ballots.clear();
    bad.final.reset();
    bad.error = "AllPromptsFailed";
    const std::vector<LogRecord> recs{ok, bad};
    const auto d = evaluate_records("x", recs, {}, nullptr);
    CHECK(d.evaluated == 1);
    CHECK(d.failed == 1);
    CHECK_FALSE(d.similarity);
    CHECK(d.detection->size() == 1);
  }
}
