#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ironylab {

enum class ErrorCode {
  MissingColumn,
  UnparsableLabel,
  EmptyCorpus,
  SampleTooLarge,
  MissingExemplars,
  InvalidKnowledge,
  AuthError,
  RateLimited,
  ProviderError,
  Timeout,
  LengthMismatch,
  EmptyInput,
  NoWords,
  TooFewScores,
  HumanScoreOutOfRange,
  MalformedAnnotation,
  ZeroVector,
  DimensionMismatch,
  MissingRephrase,
  EmbedderUnavailable,
  AllPromptsFailed,
  SchemaMismatch,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure surfaced by the library carries one of the codes above so
// callers can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ironylab
