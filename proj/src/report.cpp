#include "ironylab/report.hpp"

#include <charconv>
#include <set>

#include "ironylab/text.hpp"

namespace ironylab {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string fixed(const std::optional<double>& v, int digits) {
  if (!v) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, *v, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

json class_json(const ClassMetrics& m) {
  return {{"precision", m.precision},
          {"recall", m.recall},
          {"precision_degenerate", m.precision_degenerate},
          {"recall_degenerate", m.recall_degenerate},
          {"support", m.support}};
}

}  // namespace

DatasetReport evaluate_records(const std::string& dataset, std::span<const LogRecord> records,
                               std::span<const RubricAnnotation> annotations, Embedder* embedder,
                               const RangeBounds& bounds) {
  DatasetReport r;
  r.dataset = dataset;
  Corpus evaluated;
  evaluated.name = dataset;
  std::vector<Label> preds, golds;
  std::vector<std::string> reasons;
  std::vector<UnderstandingItem> understanding;
  std::set<std::string> ids;
  for (const auto& rec : records) {
    if (r.strategy.empty()) r.strategy = rec.strategy;
    if (rec.failed() || !rec.final) {
      ++r.failed;
      continue;
    }
    ++r.evaluated;
    ids.insert(rec.statement_id);
    evaluated.records.push_back({rec.statement_id, rec.text, rec.gold, rec.intended, rec.source});
    preds.push_back(*rec.final);
    golds.push_back(rec.gold);
    for (const auto& b : rec.ballots) r.abstentions += b ? 0 : 1;
    const bool all_same = std::all_of(rec.ballots.begin(), rec.ballots.end(), [&](const Ballot& b) { return b == rec.final; });
    if (all_same && !rec.ballots.empty()) ++r.unanimous;
    if (rec.reason) reasons.push_back(*rec.reason);
    if (rec.intended) understanding.push_back({rec.statement_id, rec.text, rec.intended, rec.rephrase});
  }
  if (!evaluated.empty()) {
    r.stats = stats(evaluated);
    r.detection = classification_report(preds, golds);
  }

  std::vector<RubricAnnotation> mine;
  for (const auto& a : annotations) {
    if (ids.contains(a.item_id)) mine.push_back(a);
  }
  r.reasoning = reasoning_report(reasons, human_aggregate(mine).mean);

  if (embedder && !understanding.empty()) r.similarity = understanding_scores(understanding, *embedder, bounds);
  return r;
}

json to_json(const DatasetReport& r) {
  json j = {{"dataset", r.dataset},
            {"strategy", r.strategy},
            {"evaluated", r.evaluated},
            {"failed", r.failed},
            {"abstentions", r.abstentions},
            {"unanimous", r.unanimous},
            {"stats",
             {{"size", r.stats.size},
              {"ironic_ratio", r.stats.ironic_ratio},
              {"avg_token_length", r.stats.avg_token_length}}}};
  if (r.detection) {
    const auto& d = *r.detection;
    j["detection"] = {{"macro_precision", d.macro_precision},
                      {"macro_recall", d.macro_recall},
                      {"micro_f1", d.micro_f1},
                      {"accuracy", d.accuracy},
                      {"ironic", class_json(d.ironic)},
                      {"non_ironic", class_json(d.non_ironic)},
                      {"confusion", {{"tp", d.tp}, {"fp", d.fp}, {"fn", d.fn}, {"tn", d.tn}}},
                      {"degenerate", d.degenerate}};
  } else {
    j["detection"] = nullptr;
  }
  j["reasoning"] = {{"reasons", r.reasoning.reasons},
                    {"F", opt(r.reasoning.fre_mean)},
                    {"S", opt(r.reasoning.fre_std)},
                    {"H", opt(r.reasoning.human_mean)},
                    {"B", opt(r.reasoning.b)},
                    {"human_pending", r.reasoning.human_pending}};
  if (r.similarity) {
    const auto& s = *r.similarity;
    json triples = json::array();
    for (const auto& t : s.triples) {
      triples.push_back({{"item_id", t.item_id},
                         {"literal_intended", t.literal_intended},
                         {"literal_understanding", t.literal_understanding},
                         {"intended_understanding", t.intended_understanding}});
    }
    j["similarity"] = {{"embedder", s.embedder},
                       {"item_ids", s.item_ids},
                       {"scores", s.scores},
                       {"histogram", s.histogram},
                       {"three_range",
                        {{"notable", s.three_range.notable},
                         {"moderate", s.three_range.moderate},
                         {"almost_identical", s.three_range.almost_identical}}},
                       {"triples", triples},
                       {"missing_rephrase", s.missing_rephrase},
                       {"missing_intended", s.missing_intended},
                       {"clipped_negative", s.clipped_negative}};
  } else {
    j["similarity"] = nullptr;
  }
  return j;
}

json to_json(const EvalReport& r) {
  json datasets = json::array();
  for (const auto& d : r.datasets) datasets.push_back(to_json(d));
  return {{"schema_version", kReportSchemaVersion},
          {"strategy", r.strategy},
          {"provider", r.provider},
          {"model", r.model},
          {"threshold", r.threshold},
          {"seed", r.seed},
          {"limit", r.limit ? json(*r.limit) : json(nullptr)},
          {"datasets", datasets}};
}

std::string report_json(const EvalReport& r) {
  return to_json(r).dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

std::string report_csv(const EvalReport& r) {
  std::string out = "dataset,strategy,P,R,F1,F,S,H,B\n";
  for (const auto& d : r.datasets) {
    std::optional<double> p, rec, f1;
    if (d.detection) {
      p = d.detection->macro_precision;
      rec = d.detection->macro_recall;
      f1 = d.detection->micro_f1;
    }
    out += d.dataset + "," + d.strategy + "," + fixed(p, 4) + "," + fixed(rec, 4) + "," + fixed(f1, 4) + "," +
           fixed(d.reasoning.fre_mean, 2) + "," + fixed(d.reasoning.fre_std, 2) + "," +
           fixed(d.reasoning.human_mean, 2) + "," + fixed(d.reasoning.b, 2) + "\n";
  }
  return out;
}

}  // namespace ironylab
