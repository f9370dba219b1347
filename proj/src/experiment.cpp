#include "ironylab/experiment.hpp"

#include <fstream>
#include <map>
#include <set>

#include <spdlog/spdlog.h>

#include "ironylab/annotation.hpp"
#include "ironylab/text.hpp"

namespace ironylab {

namespace fs = std::filesystem;

std::unique_ptr<Gateway> make_gateway(const ExperimentConfig& c, const RunOptions& o) {
  auto cache = std::make_shared<ResponseCache>(c.cache_dir);
  auto gw = std::make_unique<Gateway>(cache, c.retry, o.sleeper);
  auto transport = o.transport ? o.transport : make_http_transport();
  gw->register_provider(ProviderKind::OpenAICompat, std::make_shared<OpenAICompatProvider>(
                                                        transport, c.credentials.openai_key, c.credentials.openai_base_url));
  gw->register_provider(ProviderKind::Gemini, std::make_shared<GeminiProvider>(transport, c.credentials.gemini_key,
                                                                               c.credentials.gemini_base_url));
  MockScript script;
  if (c.mock_script) script = MockScript::load(*c.mock_script);
  gw->register_provider(ProviderKind::Mock, std::make_shared<MockProvider>(std::move(script)));
  return gw;
}

fs::path log_path(const ExperimentConfig& c, const std::string& dataset) {
  return c.out_dir / (dataset + "__" + std::string(to_string(c.strategy)) + ".jsonl");
}

KnowledgeBundle extract_knowledge(Gateway& gateway, const ModelSettings& s) {
  std::vector<std::pair<std::string, std::string>> answers;
  for (const auto& [pattern, prompt] : knowledge_extraction_prompts()) {
    CompletionRequest req{s.provider, s.model, prompt, s.max_tokens, s.temperature};
    answers.emplace_back(pattern, gateway.complete(req).text);
  }
  return parse_extracted_knowledge(answers);
}

std::vector<Exemplar> auto_cot_exemplars(const Corpus& corpus, Gateway& gateway, const ModelSettings& s,
                                         std::uint64_t seed) {
  if (corpus.empty()) throw Error(ErrorCode::MissingExemplars, "no statements to draw exemplars from");
  const Corpus order = sample(corpus, corpus.size(), seed ^ 0xA5A5A5A5ULL);
  const PromptTemplate zero_cot = baseline_prompt(Strategy::ZeroCot);
  const std::size_t per_class = kAutoCotExemplars / 2;
  std::vector<Exemplar> picked;
  std::map<Label, std::size_t> taken;
  const std::size_t max_attempts = std::min<std::size_t>(order.size(), 60);
  for (std::size_t i = 0; i < max_attempts && picked.size() < kAutoCotExemplars; ++i) {
    const auto& rec = order.records[i];
    // Keep the classes balanced while both still have room.
    if (taken[rec.gold] >= per_class && order.size() > kAutoCotExemplars) continue;
    CompletionRequest req{s.provider, s.model, render(zero_cot, rec), s.max_tokens, s.temperature};
    TaskOutput out;
    try {
      out = normalize(gateway.complete(req).text, false);
    } catch (const Error& e) {
      spdlog::warn("auto-cot exemplar {} skipped: {}", rec.id, e.what());
      continue;
    }
    if (!out.label || !out.reason) continue;
    std::string reasoning = *out.reason;
    for (auto& ch : reasoning) {
      if (ch == '\n' || ch == '\r') ch = ' ';
    }
    picked.push_back({rec.text, reasoning, *out.label});
    ++taken[rec.gold];
  }
  if (picked.size() != kAutoCotExemplars) {
    throw Error(ErrorCode::MissingExemplars, "only " + std::to_string(picked.size()) + " usable exemplars");
  }
  return picked;
}

namespace {

struct Prepared {
  DatasetSpec spec;
  Corpus evaluated;
  Corpus full;
};

std::unique_ptr<Embedder> make_embedder(const ExperimentConfig& c, Gateway& gateway) {
  if (c.embedding.use_gateway) return std::make_unique<GatewayEmbedder>(gateway, c.embedding.provider, c.embedding.model);
  return std::make_unique<HashingEmbedder>();
}

}  // namespace

RunOutput run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  validate(config);
  if (config.datasets.empty()) throw Error(ErrorCode::InvalidConfig, "config lists no datasets");

  // Everything that can fail without a network call happens first.
  std::vector<Prepared> prepared;
  for (const auto& spec : config.datasets) {
    Prepared p;
    p.spec = spec;
    p.full = load_corpus(spec);
    if (!p.full.skipped.empty()) {
      spdlog::warn("{}: skipped {} malformed row(s)", spec.name, p.full.skipped.size());
    }
    p.evaluated = config.limit ? sample(p.full, *config.limit, config.seed, config.stratified) : p.full;
    prepared.push_back(std::move(p));
  }
  std::vector<RubricAnnotation> annotations;
  if (config.annotations && fs::exists(*config.annotations)) annotations = load_rubric(*config.annotations);
  fs::create_directories(config.out_dir);

  auto gateway = make_gateway(config, options);
  RunOutput out;
  out.report.strategy = std::string(to_string(config.strategy));
  out.report.provider = std::string(to_string(config.model.provider));
  out.report.model = config.model.model;
  out.report.threshold = config.threshold;
  out.report.seed = config.seed;
  out.report.limit = config.limit;

  KnowledgeBundle knowledge = default_knowledge();
  if (config.strategy == Method::Idadp && config.knowledge == KnowledgeMode::Live) {
    knowledge = extract_knowledge(*gateway, config.model);
  }
  auto embedder = make_embedder(config, *gateway);

  for (const auto& p : prepared) {
    std::vector<Exemplar> exemplars;
    if (config.strategy == Method::AutoCot) exemplars = auto_cot_exemplars(p.full, *gateway, config.model, config.seed);
    const StrategyPlan plan = make_plan(config.strategy, knowledge, exemplars, config.threshold);
    const fs::path log = log_path(config, p.spec.name);

    std::map<std::string, LogRecord> done;
    if (options.resume && fs::exists(log)) {
      LogContents existing = read_log(log);
      if (!existing.quarantined.empty()) {
        std::string body;
        for (const auto& q : existing.quarantined) body += q.content + "\n";
        fs::path qpath = log;
        qpath += ".quarantine";
        std::ofstream(qpath, std::ios::binary | std::ios::app) << body;
        out.stats.quarantined += existing.quarantined.size();
        spdlog::warn("{}: quarantined {} corrupt log line(s) into {}", p.spec.name, existing.quarantined.size(),
                     qpath.string());
      }
      for (auto& r : existing.records) {
        if (!r.failed() && r.strategy == to_string(config.strategy)) done[r.statement_id] = std::move(r);
      }
    }

    std::vector<StatementRecord> todo;
    std::vector<LogRecord> kept;
    for (const auto& rec : p.evaluated) {
      auto it = done.find(rec.id);
      if (it != done.end()) {
        kept.push_back(it->second);
      } else {
        todo.push_back(rec);
      }
    }
    out.stats.resumed += kept.size();
    // Start from a clean file holding only the reusable records, then append.
    write_log_atomic(log, kept);
    {
      LogWriter writer(log, /*append=*/true);
      auto on_done = [&](std::size_t n, std::size_t total, const StatementRecord& s, const StatementOutcome& o) {
        if (o.ok()) {
          done[s.id] = to_log_record(s, *o.result);
        } else {
          done[s.id] = failed_record(s, config.strategy, *o.error);
          spdlog::warn("{}: statement {} failed: {}", p.spec.name, s.id, o.error->what());
        }
        writer.write(done[s.id]);
        if (options.progress) options.progress(n, total, s, o);
      };
      const auto outcomes = run_corpus(todo, plan, *gateway, config.model, config.parallelism, on_done);
      out.stats.executed += outcomes.size();
      for (const auto& o : outcomes) out.stats.failed += o.ok() ? 0 : 1;
    }

    std::vector<LogRecord> ordered;
    ordered.reserve(p.evaluated.size());
    for (const auto& rec : p.evaluated) ordered.push_back(done.at(rec.id));
    write_log_atomic(log, ordered);
    out.logs.push_back(log);
    out.report.datasets.push_back(evaluate_records(p.spec.name, ordered, annotations, embedder.get(), config.bounds));
  }

  const GatewayStats gs = gateway->stats();
  out.stats.live_calls = gs.live_calls;
  out.stats.cache_hits = gs.cache_hits;
  out.stats.retries = gs.retries;
  out.report_json = config.out_dir / "report.json";
  out.report_csv = config.out_dir / "report.csv";
  text::write_file_atomic(out.report_json, report_json(out.report));
  text::write_file_atomic(out.report_csv, report_csv(out.report));
  return out;
}

RunOutput resume(const ExperimentConfig& config, RunOptions options) {
  options.resume = true;
  return run_experiment(config, options);
}

}  // namespace ironylab
