#include <doctest.h>

#include "csv.hpp"
#include "ironylab/text.hpp"

using namespace ironylab;

TEST_SUITE("text") {
  TEST_CASE("split on unicode whitespace") {
    CHECK(text::count_tokens("a b  c") == 3);
    CHECK(text::count_tokens("  ") == 0);
    CHECK(text::count_tokens("one\ttwo\nthree") == 3);
    CHECK(text::count_tokens("no\xC2\xA0" "break") == 2);    // U+00A0
    CHECK(text::count_tokens("ideo\xE3\x80\x80" "space") == 2);  // U+3000
  }

  TEST_CASE("code point decoding never stalls on bad bytes") {
    const std::string bad = "\xff\xfe" "a\xe2\x82";
    std::size_t pos = 0, n = 0;
    while (pos < bad.size()) {
      text::next_code_point(bad, pos);
      ++n;
    }
    CHECK(n >= 3);
    CHECK(text::sanitize_utf8(bad).find('a') != std::string::npos);
  }

  TEST_CASE("trim and case helpers") {
    CHECK(text::trim("  x y \n") == "x y");
    CHECK(text::to_lower_ascii("AbC") == "abc");
    CHECK(text::contains_ci("The IRONY key", "irony"));
    CHECK(text::find_ci("aXbx", "x", 2) == 3);
  }

  TEST_CASE("quote is injective on tricky inputs") {
    CHECK(text::quote("a\"b") != text::quote("a\\\"b"));
    CHECK(text::quote("line\nbreak") == "\"line\\nbreak\"");
    CHECK(text::quote("caf\xC3\xA9") == "\"caf\xC3\xA9\"");
  }

  TEST_CASE("sha256 known vector") {
    CHECK(text::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(text::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  }

  TEST_CASE("fnv1a64 known vector") {
    CHECK(text::fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(text::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  }
}

TEST_SUITE("csv") {
  TEST_CASE("quoted fields") {
    auto rows = csv::parse("a,b\n\"x, y\",\"he said \"\"hi\"\"\"\n", ',');
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == "x, y");
    CHECK(rows[1][1] == "he said \"hi\"");
  }

  TEST_CASE("embedded newline and CRLF") {
    auto rows = csv::parse("h1,h2\r\n\"two\nlines\",z\r\n", ',');
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == "two\nlines");
    CHECK(rows[1][1] == "z");
  }

  TEST_CASE("BOM and blank lines") {
    auto rows = csv::parse("\xEF\xBB\xBFid,text\n\n1,hello\n", ',');
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][0] == "id");
  }

  TEST_CASE("tsv without quoting keeps quotes") {
    auto rows = csv::parse("a\tb\n1\t\"quoted\" text\n", '\t', false);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][1] == "\"quoted\" text");
  }
}
