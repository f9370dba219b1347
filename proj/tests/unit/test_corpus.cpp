#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ironylab/corpus.hpp"
#include "ironylab/error.hpp"
#include "ironylab/text.hpp"
#include "test_support.hpp"

using namespace ironylab;
using testing::TempDir;

namespace {

DatasetSpec ten_rows_spec() {
  DatasetSpec s;
  s.name = "ten";
  s.path = testing::data_dir() / "corpus" / "ten_rows.csv";
  s.text_column = "tweet";
  s.label_column = "sarcastic";
  s.intended_column = "rephrase";
  return s;
}

Corpus make_corpus(std::size_t ironic, std::size_t plain) {
  Corpus c;
  c.name = "synthetic";
  for (std::size_t i = 0; i < ironic + plain; ++i) {
    StatementRecord r;
    r.id = "r" + std::to_string(i);
    r.text = "text number " + std::to_string(i);
    r.gold = i < ironic ? Label::Ironic : Label::NonIronic;
    r.source = "synthetic";
    c.records.push_back(r);
  }
  return c;
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("malformed labels are skipped and reported") {
    const Corpus c = load_corpus(ten_rows_spec());
    CHECK(c.size() == 8);
    REQUIRE(c.skipped.size() == 2);
    CHECK(c.skipped[0].row == 4);
    CHECK(c.skipped[1].row == 8);
    CHECK(c.skipped[0].reason == "unparsable-label");
    CHECK(c.records[2].text == "Oh great, another meeting");
    CHECK(c.records[5].text == "She said \"perfect timing\" as the bus left");
    REQUIRE(c.records[0].intended);
    CHECK(*c.records[0].intended == "I hate getting stuck in traffic");
    CHECK_FALSE(c.records[1].intended);
    CHECK(c.records[0].source == "ten");
  }

  TEST_CASE("strict mode raises UnparsableLabel") {
    auto spec = ten_rows_spec();
    spec.strict = true;
    try {
      load_corpus(spec);
      FAIL("expected UnparsableLabel");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnparsableLabel);
    }
  }

  TEST_CASE("missing column") {
    auto spec = ten_rows_spec();
    spec.text_column = "nope";
    try {
      load_corpus(spec);
      FAIL("expected MissingColumn");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MissingColumn);
    }
  }

  TEST_CASE("exact 1/0 labels load without skips") {
    TempDir dir;
    text::write_file_atomic(dir / "c.tsv", "text\tlabel\nfirst one\t1\nsecond one\t0\n");
    DatasetSpec s;
    s.name = "plain";
    s.path = dir / "c.tsv";
    s.format = CorpusFormat::Tsv;
    const Corpus c = load_corpus(s);
    CHECK(c.size() == 2);
    CHECK(c.skipped.empty());
    CHECK(stats(c).ironic_ratio == doctest::Approx(0.5));
  }

  TEST_CASE("empty corpus") {
    TempDir dir;
    text::write_file_atomic(dir / "c.csv", "text,label\nfoo,bad\n");
    DatasetSpec s;
    s.name = "e";
    s.path = dir / "c.csv";
    try {
      load_corpus(s);
      FAIL("expected EmptyCorpus");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyCorpus);
    }
  }

  TEST_CASE("jsonl with numeric labels and duplicate ids") {
    TempDir dir;
    text::write_file_atomic(dir / "c.jsonl",
                            "{\"id\": \"a\", \"comment_text\": \"so much fun\", \"label\": 1}\n"
                            "{\"id\": \"b\", \"comment_text\": \"plain text\", \"label\": -1}\n"
                            "{\"id\": \"a\", \"comment_text\": \"again\", \"label\": 1}\n"
                            "not json at all\n");
    DatasetSpec s;
    s.name = "reddit";
    s.path = dir / "c.jsonl";
    s.format = CorpusFormat::Jsonl;
    s.text_column = "comment_text";
    s.id_column = "id";
    s.non_ironic_values = {"-1"};
    const Corpus c = load_corpus(s);
    CHECK(c.size() == 2);
    REQUIRE(c.skipped.size() == 2);
    CHECK(c.skipped[0].reason == "duplicate-id");
    CHECK(c.skipped[1].reason == "malformed-row");
  }

  TEST_CASE("stats arithmetic") {
    Corpus c;
    for (const char* t : {"a b c", "a b c d", "a b c d e"}) c.records.push_back({t, t, Label::NonIronic, {}, "x"});
    c.records[0].gold = Label::Ironic;
    const auto s = stats(c);
    CHECK(s.size == 3);
    CHECK(s.avg_token_length == doctest::Approx(4.0));
    CHECK(s.ironic_ratio == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(stats(Corpus{}), Error);
  }

  TEST_CASE("full draw is a permutation") {
    const Corpus c = make_corpus(7, 13);
    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
      const Corpus s = sample(c, c.size(), seed);
      std::multiset<std::string> ids;
      for (const auto& r : s) ids.insert(r.id);
      CHECK(ids.size() == c.size());
      CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == c.size());
    }
  }

  TEST_CASE("sampling is deterministic") {
    const Corpus c = make_corpus(30, 70);
    CHECK(sample(c, 17, 5).records == sample(c, 17, 5).records);
    CHECK(sample(c, 17, 5).records != sample(c, 17, 6).records);
  }

  TEST_CASE("stratified draw from a balanced corpus") {
    const Corpus c = make_corpus(50, 50);
    const Corpus s = sample(c, 10, 3, true);
    CHECK(std::count_if(s.begin(), s.end(), [](const auto& r) { return r.gold == Label::Ironic; }) == 5);
  }

  TEST_CASE("stratified ratio stays within 1/n") {
    for (std::size_t ironic : {3u, 14u, 27u, 50u}) {
      const Corpus c = make_corpus(ironic, 100 - ironic);
      const double full = stats(c).ironic_ratio;
      for (std::size_t n : {1u, 7u, 10u, 33u, 100u}) {
        const Corpus s = sample(c, n, n * 31 + ironic, true);
        CHECK(std::abs(stats(s).ironic_ratio - full) <= 1.0 / static_cast<double>(n) + 1e-12);
      }
    }
  }

  TEST_CASE("oversized draw") {
    const Corpus c = make_corpus(2, 2);
    CHECK_THROWS_AS(sample(c, 5, 1), Error);
    CHECK_THROWS_AS(sample(c, 0, 1), Error);
  }

  TEST_CASE("normalized jsonl round trip") {
    TempDir dir;
    const Corpus c = load_corpus(ten_rows_spec());
    std::ostringstream out;
    write_normalized_jsonl(c, out);
    text::write_file_atomic(dir / "n.jsonl", out.str());
    const Corpus back = load_corpus(normalized_spec("ten", dir / "n.jsonl"));
    CHECK(back.records == c.records);
  }

  TEST_CASE("loading is order stable") {
    CHECK(load_corpus(ten_rows_spec()).records == load_corpus(ten_rows_spec()).records);
  }

  TEST_CASE("format names") {
    CHECK(parse_format("tsv") == CorpusFormat::Tsv);
    CHECK_FALSE(parse_format("xml"));
    CHECK(format_from_extension("x.jsonl") == CorpusFormat::Jsonl);
  }
}
