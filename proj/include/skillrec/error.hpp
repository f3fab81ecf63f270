#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace skillrec {

enum class ErrorCode {
  kSingleClassCorpus,
  kEmptyTestSet,
  kEmptyCorpus,
  kProviderUnavailable,
  kDimensionMismatch,
  kInvalidRank,
  kEmptyInput,
  kParseError,
  kUnknownSkill,
  kUnknownUser,
  kUnknownVideo,
  kDuplicateTarget,
  kNotActiveRecommendation,
  kNonFiniteLoss,
  kNoCandidates,
  kSkillMastered,
  kRatingOutOfRange,
  kBadRequest,
  kIoError,
};

std::string_view error_code_name(ErrorCode code);

/// HTTP status used when the error crosses the service boundary.
int http_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace skillrec
