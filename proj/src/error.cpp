#include "skillrec/error.hpp"

namespace skillrec {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSingleClassCorpus: return "SingleClassCorpus";
    case ErrorCode::kEmptyTestSet: return "EmptyTestSet";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidRank: return "InvalidRank";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnknownSkill: return "UnknownSkill";
    case ErrorCode::kUnknownUser: return "UnknownUser";
    case ErrorCode::kUnknownVideo: return "UnknownVideo";
    case ErrorCode::kDuplicateTarget: return "DuplicateTarget";
    case ErrorCode::kNotActiveRecommendation: return "NotActiveRecommendation";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kSkillMastered: return "SkillMastered";
    case ErrorCode::kRatingOutOfRange: return "RatingOutOfRange";
    case ErrorCode::kBadRequest: return "BadRequest";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadRequest:
    case ErrorCode::kParseError:
      return 400;
    case ErrorCode::kUnknownSkill:
    case ErrorCode::kUnknownUser:
    case ErrorCode::kUnknownVideo:
      return 404;
    case ErrorCode::kDuplicateTarget:
    case ErrorCode::kSkillMastered:
    case ErrorCode::kNotActiveRecommendation:
      return 409;
    case ErrorCode::kNoCandidates:
      return 410;
    case ErrorCode::kRatingOutOfRange:
      return 422;
    default:
      return 500;
  }
}

}  // namespace skillrec
