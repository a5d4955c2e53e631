#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace claimtree {

enum class ErrorCode {
  MissingField,
  DuplicateDocId,
  UnreadableFile,
  EmptyDocument,
  InvalidArgument,
  ProviderUnavailable,
  Timeout,
  DimensionMismatch,
  ZeroVector,
  EmptyIndex,
  UnknownTask,
  SchemaViolation,
  MissingFixture,
  EmptyAspectList,
  TooFewSubaspects,
  EmptyList,
  EmptyKeywordSet,
  EmptyPool,
  NoCoarseAspects,
  JudgeFailure,
  UnknownFormat,
  FingerprintMismatch,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace claimtree
