#include <doctest.h>

#include <fstream>

#include "ironylab/annotation.hpp"
#include "ironylab/error.hpp"
#include "test_support.hpp"

using namespace ironylab;

TEST_SUITE("annotation") {
  TEST_CASE("create, update and history") {
    testing::TempDir dir;
    AnnotationStore store(dir / "ann.jsonl");
    auto r1 = store.submit("s1", "alice", {1, 1, 0}, std::nullopt);
    CHECK(r1.status == SubmitStatus::Created);
    CHECK(r1.record.version == 1);
    CHECK(r1.record.score() == 2);
    auto r2 = store.submit("s1", "alice", {1, 1, 1}, std::string("better"), 1);
    CHECK(r2.status == SubmitStatus::Updated);
    CHECK(r2.record.version == 2);
    CHECK(store.history().size() == 2);
    REQUIRE(store.current().size() == 1);
    CHECK(store.current()[0].criteria == std::vector<int>{1, 1, 1});
    CHECK(store.get("s1", "alice")->remarks == "better");
    CHECK_FALSE(store.get("s1", "bob"));
  }

  TEST_CASE("stale version conflicts") {
    AnnotationStore store;
    store.submit("s1", "alice", {1, 0, 0}, std::nullopt);
    const auto r = store.submit("s1", "alice", {0, 0, 0}, std::nullopt, 0);
    CHECK(r.status == SubmitStatus::Conflict);
    CHECK(r.record.version == 1);
    CHECK(store.history().size() == 1);
  }

  TEST_CASE("repeated nonce is a no-op") {
    AnnotationStore store;
    store.submit("s1", "alice", {1, 0, 0}, std::nullopt, std::nullopt, std::string("n1"));
    const auto r = store.submit("s1", "alice", {1, 0, 0}, std::nullopt, std::nullopt, std::string("n1"));
    CHECK(r.status == SubmitStatus::Duplicate);
    CHECK(store.history().size() == 1);
  }

  TEST_CASE("malformed submissions") {
    AnnotationStore store;
    CHECK_THROWS_AS(store.submit("s1", "alice", {1, 2, 0}, std::nullopt), Error);
    CHECK_THROWS_AS(store.submit("s1", "", {1, 0, 0}, std::nullopt), Error);
    CHECK_THROWS_AS(store.submit("s1", "alice", {1, 0}, std::nullopt), Error);
  }

  TEST_CASE("reload from disk skips torn lines") {
    testing::TempDir dir;
    {
      AnnotationStore store(dir / "ann.jsonl");
      store.submit("s1", "alice", {1, 1, 1}, std::nullopt);
      store.submit("s2", "alice", {0, 0, 0}, std::nullopt);
      store.submit("s1", "alice", {1, 0, 1}, std::nullopt, 1);
    }
    {
      std::ofstream out(dir / "ann.jsonl", std::ios::app);
      out << "{\"item_id\": \"s3\", \"annot";
    }
    AnnotationStore again(dir / "ann.jsonl");
    CHECK(again.history().size() == 3);
    CHECK(again.current().size() == 2);
    CHECK(again.get("s1", "alice")->version == 2);
    const auto rubric = load_rubric(dir / "ann.jsonl");
    CHECK(rubric.size() == 2);
    CHECK(human_aggregate(rubric).mean == doctest::Approx(1.0));
  }

  TEST_CASE("json round trip") {
    AnnotationRecord r{"i", "a", {1, 0, 1}, std::string("ok"), "2026-01-01T00:00:00Z", 3, std::string("n")};
    const auto j = to_json(r);
    CHECK(j["score"] == 2);
    const auto back = annotation_from_json(j);
    CHECK(back.criteria == r.criteria);
    CHECK(back.version == 3);
    CHECK(back.remarks == r.remarks);
  }
}
