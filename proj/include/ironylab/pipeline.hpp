#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ironylab/corpus.hpp"
#include "ironylab/gateway.hpp"
#include "ironylab/normalize.hpp"
#include "ironylab/prompts.hpp"

namespace ironylab {

using Ballot = std::optional<Label>;

struct VoteResult {
  Label final = Label::NonIronic;
  std::vector<Ballot> ballots;
  std::size_t abstentions = 0;
  bool unanimous = false;

  bool operator==(const VoteResult&) const = default;
};

// Strict majority over the non-abstaining ballots. A tie, or no ballots cast,
// resolves to NonIronic. Unanimous means nobody abstained and all agree.
VoteResult vote(std::span<const Ballot> ballots);

enum class Method { Idadp, ZeroCot, AutoCot, Ape, Ps, PsPlus, Plain };

std::string_view to_string(Method m) noexcept;
std::optional<Method> method_from_string(std::string_view name);

struct StrategyPlan {
  Method method = Method::Idadp;
  std::vector<PromptTemplate> prompts;
  double threshold = kDefaultThreshold;
};

// IDADP gets its three prompts; every baseline a single one. Auto-CoT needs
// six exemplars.
StrategyPlan make_plan(Method method, const KnowledgeBundle& knowledge, std::span<const Exemplar> exemplars = {},
                       double threshold = kDefaultThreshold);

struct ModelSettings {
  ProviderKind provider = ProviderKind::Mock;
  std::string model = "mock";
  int max_tokens = kDefaultMaxTokens;
  double temperature = kDefaultTemperature;
};

struct IdadpResult {
  std::string statement_id;
  Method strategy = Method::Idadp;
  VoteResult vote;
  std::vector<TaskOutput> outputs;
  std::optional<std::string> reason;
  std::optional<std::string> rephrase;
  std::optional<std::size_t> reason_source;  // index into outputs
  std::optional<std::size_t> rephrase_source;
  std::vector<std::string> request_hashes;
  std::vector<std::string> timestamps;
  std::vector<std::optional<std::string>> errors;  // per prompt
  std::size_t cache_hits = 0;
};

// Renders, completes and normalizes every prompt of the plan in order, then
// votes. A failed completion becomes an abstaining ballot with its error
// recorded; AllPromptsFailed when none succeeded.
IdadpResult run_statement(const StatementRecord& statement, const StrategyPlan& plan, Gateway& gateway,
                          const ModelSettings& settings);

struct StatementOutcome {
  std::optional<IdadpResult> result;
  std::optional<Error> error;

  bool ok() const noexcept { return result.has_value(); }
};

// (completed, total, outcome of the statement just finished). Serialized.
using ProgressFn = std::function<void(std::size_t, std::size_t, const StatementRecord&, const StatementOutcome&)>;

// Outcomes are aligned with `statements`; up to `parallelism` statements are
// in flight at once.
std::vector<StatementOutcome> run_corpus(std::span<const StatementRecord> statements, const StrategyPlan& plan,
                                         Gateway& gateway, const ModelSettings& settings, std::size_t parallelism,
                                         const ProgressFn& progress = {});

}  // namespace ironylab
