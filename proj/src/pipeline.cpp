#include "ironylab/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "ironylab/text.hpp"

namespace ironylab {

VoteResult vote(std::span<const Ballot> ballots) {
  if (ballots.empty()) throw Error(ErrorCode::EmptyInput, "vote needs at least one ballot");
  VoteResult r;
  r.ballots.assign(ballots.begin(), ballots.end());
  std::size_t ironic = 0;
  std::size_t non_ironic = 0;
  for (const auto& b : ballots) {
    if (!b) {
      ++r.abstentions;
    } else if (*b == Label::Ironic) {
      ++ironic;
    } else {
      ++non_ironic;
    }
  }
  r.final = ironic > non_ironic ? Label::Ironic : Label::NonIronic;
  r.unanimous = r.abstentions == 0 && (ironic == 0 || non_ironic == 0);
  return r;
}

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::Idadp: return "idadp";
    case Method::ZeroCot: return "zero-cot";
    case Method::AutoCot: return "auto-cot";
    case Method::Ape: return "ape";
    case Method::Ps: return "ps";
    case Method::PsPlus: return "ps-plus";
    case Method::Plain: return "plain";
  }
  return "idadp";
}

std::optional<Method> method_from_string(std::string_view name) {
  const std::string n = text::to_lower_ascii(text::trim(name));
  for (auto m : {Method::Idadp, Method::ZeroCot, Method::AutoCot, Method::Ape, Method::Ps, Method::PsPlus,
                 Method::Plain}) {
    if (to_string(m) == n) return m;
  }
  if (n == "ps+") return Method::PsPlus;
  if (n == "zeroshot-cot" || n == "zero-shot-cot") return Method::ZeroCot;
  return std::nullopt;
}

StrategyPlan make_plan(Method method, const KnowledgeBundle& knowledge, std::span<const Exemplar> exemplars,
                       double threshold) {
  StrategyPlan plan;
  plan.method = method;
  plan.threshold = threshold;
  switch (method) {
    case Method::Idadp: plan.prompts = idadp_prompts(knowledge, threshold); break;
    case Method::ZeroCot: plan.prompts = {baseline_prompt(Strategy::ZeroCot)}; break;
    case Method::AutoCot: plan.prompts = {baseline_prompt(Strategy::AutoCot, exemplars)}; break;
    case Method::Ape: plan.prompts = {baseline_prompt(Strategy::Ape)}; break;
    case Method::Ps: plan.prompts = {baseline_prompt(Strategy::Ps)}; break;
    case Method::PsPlus: plan.prompts = {baseline_prompt(Strategy::PsPlus)}; break;
    case Method::Plain: plan.prompts = {baseline_prompt(Strategy::Plain)}; break;
  }
  return plan;
}

namespace {

// First output agreeing with the final label that carries the field, else
// the first output carrying it at all.
std::optional<std::size_t> pick(const IdadpResult& r, const std::optional<std::string> TaskOutput::*field) {
  std::optional<std::size_t> any;
  for (std::size_t i = 0; i < r.outputs.size(); ++i) {
    const auto& value = r.outputs[i].*field;
    if (!value || value->empty()) continue;
    if (r.vote.ballots[i] == r.vote.final) return i;
    if (!any) any = i;
  }
  return any;
}

}  // namespace

IdadpResult run_statement(const StatementRecord& statement, const StrategyPlan& plan, Gateway& gateway,
                          const ModelSettings& settings) {
  IdadpResult r;
  r.statement_id = statement.id;
  r.strategy = plan.method;
  std::vector<Ballot> ballots;
  std::size_t failures = 0;
  std::string last_error;
  for (const auto& tmpl : plan.prompts) {
    CompletionRequest req;
    req.provider = settings.provider;
    req.model = settings.model;
    req.prompt = render(tmpl, statement);
    req.max_tokens = settings.max_tokens;
    req.temperature = settings.temperature;
    r.request_hashes.push_back(request_hash(req));
    r.timestamps.push_back(text::utc_timestamp());
    try {
      ModelResponse resp = gateway.complete(req);
      if (resp.from_cache) ++r.cache_hits;
      r.outputs.push_back(normalize(resp.text, tmpl.expects_probability, plan.threshold));
      r.errors.emplace_back(std::nullopt);
    } catch (const Error& e) {
      ++failures;
      last_error = e.what();
      TaskOutput empty;
      r.outputs.push_back(std::move(empty));
      r.errors.emplace_back(e.what());
    }
    ballots.push_back(r.outputs.back().label);
  }
  if (failures == plan.prompts.size()) {
    throw Error(ErrorCode::AllPromptsFailed, "statement " + statement.id + ": " + last_error);
  }
  r.vote = vote(ballots);
  r.reason_source = pick(r, &TaskOutput::reason);
  r.rephrase_source = pick(r, &TaskOutput::rephrase);
  if (r.reason_source) r.reason = r.outputs[*r.reason_source].reason;
  if (r.rephrase_source) r.rephrase = r.outputs[*r.rephrase_source].rephrase;
  return r;
}

std::vector<StatementOutcome> run_corpus(std::span<const StatementRecord> statements, const StrategyPlan& plan,
                                         Gateway& gateway, const ModelSettings& settings, std::size_t parallelism,
                                         const ProgressFn& progress) {
  std::vector<StatementOutcome> out(statements.size());
  if (statements.empty()) return out;
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex progress_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= statements.size()) return;
      StatementOutcome o;
      try {
        o.result = run_statement(statements[i], plan, gateway, settings);
      } catch (const Error& e) {
        o.error = e;
      } catch (const std::exception& e) {
        o.error = Error(ErrorCode::ProviderError, e.what());
      }
      std::lock_guard lock(progress_mutex);
      out[i] = std::move(o);
      ++done;
      if (progress) progress(done, statements.size(), statements[i], out[i]);
    }
  };

  const std::size_t n = std::clamp<std::size_t>(parallelism, 1, statements.size());
  if (n == 1) {
    worker();
    return out;
  }
  {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  return out;
}

}  // namespace ironylab
