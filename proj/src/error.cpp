#include "claimtree/error.hpp"

namespace claimtree {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::DuplicateDocId: return "DuplicateDocId";
    case ErrorCode::UnreadableFile: return "UnreadableFile";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::UnknownTask: return "UnknownTask";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::MissingFixture: return "MissingFixture";
    case ErrorCode::EmptyAspectList: return "EmptyAspectList";
    case ErrorCode::TooFewSubaspects: return "TooFewSubaspects";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::EmptyKeywordSet: return "EmptyKeywordSet";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::NoCoarseAspects: return "NoCoarseAspects";
    case ErrorCode::JudgeFailure: return "JudgeFailure";
    case ErrorCode::UnknownFormat: return "UnknownFormat";
    case ErrorCode::FingerprintMismatch: return "FingerprintMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace claimtree
