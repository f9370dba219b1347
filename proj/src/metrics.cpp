#include "ironylab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "ironylab/kernels.hpp"
#include "ironylab/text.hpp"

namespace ironylab {

namespace {

double ratio(std::size_t num, std::size_t den, bool& degenerate) {
  if (den == 0) {
    degenerate = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ClassificationReport classification_report(std::span<const Label> preds, std::span<const Label> golds) {
  if (preds.size() != golds.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(preds.size()) + " predictions vs " +
                                               std::to_string(golds.size()) + " gold labels");
  }
  if (preds.empty()) throw Error(ErrorCode::EmptyInput, "no predictions to score");
  ClassificationReport r;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] == Label::Ironic;
    const bool g = golds[i] == Label::Ironic;
    if (p && g) ++r.tp;
    else if (p) ++r.fp;
    else if (g) ++r.fn;
    else ++r.tn;
  }
  r.ironic.precision = ratio(r.tp, r.tp + r.fp, r.ironic.precision_degenerate);
  r.ironic.recall = ratio(r.tp, r.tp + r.fn, r.ironic.recall_degenerate);
  r.ironic.support = r.tp + r.fn;
  r.non_ironic.precision = ratio(r.tn, r.tn + r.fn, r.non_ironic.precision_degenerate);
  r.non_ironic.recall = ratio(r.tn, r.tn + r.fp, r.non_ironic.recall_degenerate);
  r.non_ironic.support = r.tn + r.fp;
  r.degenerate = r.ironic.precision_degenerate || r.ironic.recall_degenerate || r.non_ironic.precision_degenerate ||
                 r.non_ironic.recall_degenerate;
  r.macro_precision = (r.ironic.precision + r.non_ironic.precision) / 2.0;
  r.macro_recall = (r.ironic.recall + r.non_ironic.recall) / 2.0;

  // Pooled over both classes: every error is one false positive for the
  // predicted class and one false negative for the gold class.
  const std::size_t correct = r.tp + r.tn;
  const std::size_t wrong = r.fp + r.fn;
  const double pooled_tp = static_cast<double>(correct);
  const double pooled_fp = static_cast<double>(wrong);
  const double pooled_fn = static_cast<double>(wrong);
  r.micro_precision = pooled_tp / (pooled_tp + pooled_fp);
  r.micro_recall = pooled_tp / (pooled_tp + pooled_fn);
  r.micro_f1 = 2.0 * pooled_tp / (2.0 * pooled_tp + pooled_fp + pooled_fn);
  r.accuracy = static_cast<double>(correct) / static_cast<double>(preds.size());
  return r;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "mean of nothing");
  double m = 0.0;
  std::size_t n = 0;
  for (double v : values) m += (v - m) / static_cast<double>(++n);
  return m;
}

double std_dev(std::span<const double> scores) {
  if (scores.size() < 2) throw Error(ErrorCode::TooFewScores, "standard deviation needs at least two scores");
  // Welford
  double m = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  for (double x : scores) {
    ++n;
    const double d = x - m;
    m += d / static_cast<double>(n);
    m2 += d * (x - m);
  }
  return std::sqrt(std::max(0.0, m2 / static_cast<double>(n)));
}

double b_measure(double fre_mean, double human_mean) {
  if (!(human_mean >= 0.0 && human_mean <= 3.0)) {
    throw Error(ErrorCode::HumanScoreOutOfRange, "human mean must lie in [0, 3]");
  }
  return fre_mean / 100.0 + human_mean / 3.0;
}

int rubric_score(const RubricAnnotation& a) {
  if (a.criteria.size() != kRubricCriteria) {
    throw Error(ErrorCode::MalformedAnnotation, "item " + a.item_id + ": expected 3 criteria, got " +
                                                    std::to_string(a.criteria.size()));
  }
  int s = 0;
  for (int c : a.criteria) {
    if (c != 0 && c != 1) throw Error(ErrorCode::MalformedAnnotation, "item " + a.item_id + ": criteria are 0 or 1");
    s += c;
  }
  return s;
}

HumanAggregate human_aggregate(std::span<const RubricAnnotation> annotations) {
  HumanAggregate out;
  std::map<std::string, std::pair<double, std::size_t>> sums;
  for (const auto& a : annotations) {
    auto& [sum, n] = sums[a.item_id];
    sum += rubric_score(a);
    ++n;
  }
  if (sums.empty()) return out;
  std::vector<double> items;
  for (const auto& [id, s] : sums) {
    const double m = s.first / static_cast<double>(s.second);
    out.item_scores[id] = m;
    items.push_back(m);
  }
  out.mean = mean(items);
  return out;
}

ReasoningReport reasoning_report(std::span<const std::string> reasons, const std::optional<double>& human_mean) {
  ReasoningReport r;
  std::vector<double> fre;
  for (const auto& reason : reasons) {
    if (readability_counts(reason).words == 0) continue;
    fre.push_back(flesch_reading_ease(reason));
  }
  r.reasons = fre.size();
  if (!fre.empty()) r.fre_mean = mean(fre);
  if (fre.size() >= 2) r.fre_std = std_dev(fre);
  if (human_mean) {
    r.human_mean = human_mean;
    r.human_pending = false;
    if (r.fre_mean) r.b = b_measure(*r.fre_mean, *human_mean);
  }
  return r;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "vector dimensions differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  const kernels::DotNorms d = kernels::dot_norms(a.data(), b.data(), a.size());
  if (d.aa == 0.0 || d.bb == 0.0) throw Error(ErrorCode::ZeroVector, "cosine of a zero vector");
  double denom = std::sqrt(d.aa * d.bb);
  if (!std::isfinite(denom) || denom == 0.0) denom = std::sqrt(d.aa) * std::sqrt(d.bb);
  return std::clamp(d.dot / denom, -1.0, 1.0);
}

std::array<std::size_t, kHistogramBins> histogram(std::span<const double> scores, bool* clipped) {
  std::array<std::size_t, kHistogramBins> bins{};
  for (double s : scores) {
    if (s < 0.0) {
      if (clipped) *clipped = true;
      s = 0.0;
    }
    auto idx = static_cast<std::size_t>(std::floor(s * static_cast<double>(kHistogramBins)));
    bins[std::min(idx, kHistogramBins - 1)]++;
  }
  return bins;
}

ThreeRangeCounts three_range(std::span<const double> scores, const RangeBounds& bounds, bool* clipped) {
  ThreeRangeCounts c;
  for (double s : scores) {
    if (s < 0.0) {
      if (clipped) *clipped = true;
      s = 0.0;
    }
    if (s < bounds.moderate) ++c.notable;
    else if (s < bounds.almost_identical) ++c.moderate;
    else ++c.almost_identical;
  }
  return c;
}

SimilarityReport understanding_scores(std::span<const UnderstandingItem> items, Embedder& embedder,
                                      const RangeBounds& bounds) {
  SimilarityReport r;
  r.embedder = embedder.name();
  std::unordered_map<std::string, Embedding> memo;
  auto vec = [&](const std::string& s) -> const Embedding& {
    auto it = memo.find(s);
    if (it != memo.end()) return it->second;
    try {
      return memo.emplace(s, embed(s, embedder)).first->second;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::EmbedderUnavailable) throw;
      throw Error(ErrorCode::EmbedderUnavailable, std::string("embedding failed: ") + e.what());
    }
  };
  for (const auto& item : items) {
    if (!item.intended || text::trim(*item.intended).empty()) {
      ++r.missing_intended;
      continue;
    }
    if (!item.rephrase || text::trim(*item.rephrase).empty()) {
      ++r.missing_rephrase;
      continue;
    }
    const Embedding& understanding = vec(*item.rephrase);
    const Embedding& intended = vec(*item.intended);
    const Embedding& literal = vec(item.literal);
    const double score = cosine_similarity(understanding, intended);
    r.item_ids.push_back(item.item_id);
    r.scores.push_back(score);
    r.triples.push_back({item.item_id, cosine_similarity(literal, intended), cosine_similarity(literal, understanding),
                         score});
  }
  r.histogram = histogram(r.scores, &r.clipped_negative);
  r.three_range = three_range(r.scores, bounds, &r.clipped_negative);
  return r;
}

}  // namespace ironylab
