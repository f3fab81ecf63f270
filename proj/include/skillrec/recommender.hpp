#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "skillrec/types.hpp"

namespace skillrec {

struct RatingEvent {
  std::string user_id;
  std::string video_id;
  std::string skill;
  FeatureVectorX x = FeatureVectorX::Zero();
  double y = 0.0;  ///< satisfaction in [0, 1]
  std::int64_t timestamp = 0;

  bool operator==(const RatingEvent&) const = default;
};

void to_json(nlohmann::json& j, const RatingEvent& e);
void from_json(const nlohmann::json& j, RatingEvent& e);

/// (stars - 1) / 4 for stars in 1..5; throws RatingOutOfRange otherwise.
double satisfaction_from_stars(int stars);

/// Residuals with |r| at or below this count as exactly zero (sign(0) = 0).
inline constexpr double kKinkTolerance = 1e-12;

/// sum_i |P.X_i - Y_i|
double loss(const PreferenceMatrixP& p, std::span<const RatingEvent> events);

/// sum_i sign(P.X_i - Y_i) X_i with sign(0) = 0.
PreferenceMatrixP loss_subgradient(const PreferenceMatrixP& p, std::span<const RatingEvent> events);

struct DescentConfig {
  double learning_rate = 0.05;
  int epochs = 200;
  double tolerance = 1e-8;  ///< early stop when an accepted step changes the loss by less
};

/// Full-batch subgradient descent on the summed absolute residual. A step
/// that would raise the loss is rejected and the step size halved, so the
/// loss never increases between epochs. Throws NonFiniteLoss on non-finite
/// X or Y.
PreferenceMatrixP fit_preferences(const PreferenceMatrixP& p0, std::span<const RatingEvent> events,
                                  const DescentConfig& config = {},
                                  std::vector<double>* loss_trace = nullptr);

/// Context attributes compared for cold start.
struct LearnerContext {
  std::string occupation;
  std::string location;
  std::string education;

  /// True when at least one attribute is equal and non-empty.
  bool shares_attribute(const LearnerContext& other) const;

  bool operator==(const LearnerContext&) const = default;
};

struct Peer {
  LearnerContext context;
  PreferenceMatrixP p;
};

/// Mean P of peers sharing at least one attribute; uniform 0.25 when none match.
PreferenceMatrixP init_preferences(const LearnerContext& user, std::span<const Peer> peers);

struct Candidate {
  std::string video_id;
  FeatureVectorX x;
};

struct RankedCandidate {
  std::string video_id;
  FeatureVectorX x;
  double score = 0.0;  ///< cosine(X, P)
};

/// Sorted by cosine(X, P) descending, ties by ascending video id; excluded
/// ids removed. Throws NoCandidates when nothing remains.
std::vector<RankedCandidate> rank_candidates(const PreferenceMatrixP& p,
                                             std::span<const Candidate> candidates,
                                             const std::set<std::string>& exclude = {});

}  // namespace skillrec
