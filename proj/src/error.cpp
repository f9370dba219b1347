#include "ironylab/error.hpp"

namespace ironylab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnparsableLabel: return "UnparsableLabel";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::SampleTooLarge: return "SampleTooLarge";
    case ErrorCode::MissingExemplars: return "MissingExemplars";
    case ErrorCode::InvalidKnowledge: return "InvalidKnowledge";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NoWords: return "NoWords";
    case ErrorCode::TooFewScores: return "TooFewScores";
    case ErrorCode::HumanScoreOutOfRange: return "HumanScoreOutOfRange";
    case ErrorCode::MalformedAnnotation: return "MalformedAnnotation";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MissingRephrase: return "MissingRephrase";
    case ErrorCode::EmbedderUnavailable: return "EmbedderUnavailable";
    case ErrorCode::AllPromptsFailed: return "AllPromptsFailed";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace ironylab
