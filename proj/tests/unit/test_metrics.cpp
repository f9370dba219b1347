#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "ironylab/error.hpp"
#include "ironylab/metrics.hpp"

using namespace ironylab;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

double two_pass_std(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

double fre(double words, double sentences, double syllables) {
  return 206.835 - 1.015 * (words / sentences) - 84.6 * (syllables / words);
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("micro f1 equals accuracy and per-class values match a confusion oracle") {
    std::size_t vectors = 0;
    for (std::size_t n = 1; n <= 6; ++n) {
      for (std::size_t pm = 0; pm < (1u << n); ++pm) {
        for (std::size_t gm = 0; gm < (1u << n); ++gm) {
          std::vector<Label> p(n), g(n);
          std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
          for (std::size_t i = 0; i < n; ++i) {
            p[i] = (pm >> i) & 1 ? Label::Ironic : Label::NonIronic;
            g[i] = (gm >> i) & 1 ? Label::Ironic : Label::NonIronic;
            const bool pi = p[i] == Label::Ironic, gi = g[i] == Label::Ironic;
            tp += pi && gi;
            fp += pi && !gi;
            fn += !pi && gi;
            tn += !pi && !gi;
          }
          const auto r = classification_report(p, g);
          ++vectors;
          CHECK(r.micro_f1 == r.accuracy);
          CHECK(r.tp == tp);
          CHECK(r.fp == fp);
          CHECK(r.fn == fn);
          CHECK(r.tn == tn);
          CHECK(r.accuracy == static_cast<double>(tp + tn) / static_cast<double>(n));
          const double pi = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
          const double ri = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
          const double pn = tn + fn ? static_cast<double>(tn) / static_cast<double>(tn + fn) : 0.0;
          const double rn = tn + fp ? static_cast<double>(tn) / static_cast<double>(tn + fp) : 0.0;
          CHECK(r.ironic.precision == doctest::Approx(pi));
          CHECK(r.ironic.recall == doctest::Approx(ri));
          CHECK(r.non_ironic.precision == doctest::Approx(pn));
          CHECK(r.non_ironic.recall == doctest::Approx(rn));
          CHECK(r.ironic.precision_degenerate == (tp + fp == 0));
          CHECK(r.ironic.recall_degenerate == (tp + fn == 0));
          CHECK(r.macro_precision == doctest::Approx((pi + pn) / 2));
          CHECK(r.macro_recall == doctest::Approx((ri + rn) / 2));
        }
      }
    }
    CHECK(vectors == 5460);
  }

  TEST_CASE("report errors") {
    const std::vector<Label> a{Label::Ironic}, b{Label::Ironic, Label::NonIronic}, none;
    CHECK(code_of([&] { classification_report(a, b); }) == ErrorCode::LengthMismatch);
    CHECK(code_of([&] { classification_report(none, none); }) == ErrorCode::EmptyInput);
  }

  TEST_CASE("syllable heuristic") {
    CHECK(count_syllables("cat") == 1);
    CHECK(count_syllables("the") == 1);
    CHECK(count_syllables("table") == 2);
    CHECK(count_syllables("make") == 1);
    CHECK(count_syllables("beautiful") == 3);
    CHECK(count_syllables("rhythm") == 1);
    CHECK(count_syllables("Irony") == 3);
    CHECK(count_syllables("x") == 1);
  }

  TEST_CASE("counts and sentence boundaries") {
    auto c = readability_counts("The cat sat on the mat.");
    CHECK(c.words == 6);
    CHECK(c.sentences == 1);
    CHECK(c.syllables == 6);
    c = readability_counts("Wait... what?! It costs 3.50 dollars");
    CHECK(c.sentences == 2);
    CHECK(c.words == 5);
    CHECK(readability_counts("no terminator at all").sentences == 1);
  }

  TEST_CASE("flesch closed form") {
    CHECK(flesch_reading_ease("The cat sat on the mat.") == doctest::Approx(fre(6, 1, 6)).epsilon(1e-9));
    CHECK(flesch_reading_ease("I like apples. They are sweet.") == doctest::Approx(fre(6, 2, 7)).epsilon(1e-9));
    CHECK(flesch_reading_ease("Beautiful tables make everything wonderful.") ==
          doctest::Approx(fre(5, 1, 3 + 2 + 1 + 4 + 3)).epsilon(1e-9));
    CHECK(code_of([] { flesch_reading_ease("123 ... !!"); }) == ErrorCode::NoWords);
  }

  TEST_CASE("standard deviation against a two pass oracle") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> d(50.0, 15.0);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> v(2 + static_cast<std::size_t>(trial % 40));
      for (auto& x : v) x = d(rng);
      CHECK(std_dev(v) == doctest::Approx(two_pass_std(v)).epsilon(1e-12));
    }
    const std::vector<double> known{2, 4, 4, 4, 5, 5, 7, 9};
    CHECK(std_dev(known) == doctest::Approx(2.0));
    const std::vector<double> one{1.0};
    CHECK(code_of([&] { std_dev(one); }) == ErrorCode::TooFewScores);
  }

  TEST_CASE("std dev is shift invariant and scales with the data") {
    const std::vector<double> v{31.2, 45.5, 12.25, 80.0, 66.6};
    std::vector<double> shifted = v, scaled = v;
    for (auto& x : shifted) x += 1000.0;
    for (auto& x : scaled) x *= 3.0;
    CHECK(std_dev(shifted) == doctest::Approx(std_dev(v)).epsilon(1e-9));
    CHECK(std_dev(scaled) == doctest::Approx(3.0 * std_dev(v)).epsilon(1e-12));
  }

  TEST_CASE("b measure") {
    CHECK(b_measure(49.3, 2.6) == doctest::Approx(49.3 / 100 + 2.6 / 3));
    CHECK(b_measure(0.0, 0.0) == 0.0);
    CHECK(b_measure(100.0, 3.0) == doctest::Approx(2.0));
    CHECK(code_of([] { b_measure(50.0, 3.1); }) == ErrorCode::HumanScoreOutOfRange);
    CHECK(code_of([] { b_measure(50.0, -0.1); }) == ErrorCode::HumanScoreOutOfRange);
  }

  TEST_CASE("rubric scores") {
    CHECK(rubric_score({"i", "a", {1, 1, 1}}) == 3);
    CHECK(rubric_score({"i", "a", {1, 0, 0}}) == 1);
    CHECK(code_of([] { rubric_score({"i", "a", {1, 2, 0}}); }) == ErrorCode::MalformedAnnotation);
    CHECK(code_of([] { rubric_score({"i", "a", {1, 1}}); }) == ErrorCode::MalformedAnnotation);
  }

  TEST_CASE("human aggregate averages per item first") {
    const std::vector<RubricAnnotation> anns{
        {"a", "x", {1, 1, 1}}, {"a", "y", {1, 0, 0}}, {"b", "x", {0, 0, 0}}};
    const auto h = human_aggregate(anns);
    CHECK(h.item_scores.at("a") == doctest::Approx(2.0));
    CHECK(h.item_scores.at("b") == doctest::Approx(0.0));
    REQUIRE(h.mean);
    CHECK(*h.mean == doctest::Approx(1.0));
    CHECK_FALSE(human_aggregate({}).mean);
  }

  TEST_CASE("reasoning report") {
    const std::vector<std::string> reasons{"The cat sat on the mat.", "I like apples. They are sweet.", "  "};
    const auto r = reasoning_report(reasons, std::nullopt);
    CHECK(r.reasons == 2);
    REQUIRE(r.fre_mean);
    CHECK(*r.fre_mean == doctest::Approx((fre(6, 1, 6) + fre(6, 2, 7)) / 2));
    REQUIRE(r.fre_std);
    CHECK(*r.fre_std == doctest::Approx(std::abs(fre(6, 1, 6) - fre(6, 2, 7)) / 2));
    CHECK(r.human_pending);
    CHECK_FALSE(r.b);
    const auto with_h = reasoning_report(reasons, 1.8);
    CHECK(*with_h.b == doctest::Approx(*r.fre_mean / 100 + 0.6));
    CHECK_FALSE(with_h.human_pending);
  }

  TEST_CASE("cosine against a direct oracle") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> d;
    for (std::size_t n : {1u, 3u, 4u, 7u, 16u, 33u, 256u}) {
      std::vector<double> a(n), b(n);
      for (auto& x : a) x = d(rng);
      for (auto& x : b) x = d(rng);
      double dot = 0, na = 0, nb = 0;
      for (std::size_t i = 0; i < n; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
      }
      CHECK(cosine_similarity(a, b) == doctest::Approx(dot / (std::sqrt(na) * std::sqrt(nb))).epsilon(1e-12));
      CHECK(cosine_similarity(a, b) == cosine_similarity(b, a));
      CHECK(cosine_similarity(a, a) == 1.0);
      std::vector<double> scaled = a;
      for (auto& x : scaled) x *= 4.5;
      CHECK(cosine_similarity(scaled, b) == doctest::Approx(cosine_similarity(a, b)).epsilon(1e-12));
      std::vector<double> neg = a;
      for (auto& x : neg) x = -x;
      CHECK(cosine_similarity(a, neg) == doctest::Approx(-1.0));
    }
  }

  TEST_CASE("cosine errors") {
    const std::vector<double> a{1, 2}, b{1, 2, 3}, z{0, 0};
    CHECK(code_of([&] { cosine_similarity(a, b); }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([&] { cosine_similarity(a, z); }) == ErrorCode::ZeroVector);
  }

  TEST_CASE("histogram and three ranges") {
    const std::vector<double> s{0.0, 0.05, 0.1, 0.59, 0.6, 0.79, 0.8, 0.95, 1.0, -0.2};
    bool clipped = false;
    const auto h = histogram(s, &clipped);
    CHECK(clipped);
    CHECK(std::accumulate(h.begin(), h.end(), std::size_t{0}) == s.size());
    CHECK(h[0] == 3);  // 0, 0.05 and the clipped -0.2
    CHECK(h[9] == 2);  // 0.95 and 1.0
    const auto t = three_range(s);
    CHECK(t.notable == 5);
    CHECK(t.moderate == 2);
    CHECK(t.almost_identical == 3);
    const auto custom = three_range(s, RangeBounds{0.5, 0.9});
    CHECK(custom.notable + custom.moderate + custom.almost_identical == s.size());
    CHECK(custom.almost_identical == 2);
  }

  TEST_CASE("three ranges partition random scores") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-0.3, 1.0);
    std::vector<double> s(500);
    for (auto& x : s) x = u(rng);
    const auto t = three_range(s);
    CHECK(t.notable + t.moderate + t.almost_identical == s.size());
  }
}
