#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "skillrec/catalog.hpp"
#include "skillrec/recommender.hpp"

namespace skillrec {

/// Recommendation vectors for every catalog video, bucketed by (skill, level).
class VideoFeatureIndex {
 public:
  struct Entry {
    const VideoRecord* video = nullptr;
    FeatureVectorX x;
  };

  VideoFeatureIndex() = default;
  /// `fit_probability` supplies the second X component for each video.
  VideoFeatureIndex(const Catalog& catalog,
                    const std::function<double(const VideoRecord&)>& fit_probability);

  const Entry* find(const std::string& video_id) const;
  /// Empty when the (skill, level) bucket has no videos.
  const std::vector<Candidate>& candidates(const std::string& skill, Level level) const;

 private:
  std::unordered_map<std::string, Entry> entries_;
  std::map<std::pair<std::string, int>, std::vector<Candidate>> buckets_;
};

struct SkillTarget {
  Level level = Level::kBeginner;
  bool mastered = false;

  bool operator==(const SkillTarget&) const = default;
};

struct LearnerProfile {
  std::string id;
  LearnerContext context;
  std::map<std::string, SkillTarget> targets;
  PreferenceMatrixP p = uniform_preferences();
  PreferenceMatrixP p_init = uniform_preferences();  ///< cold-start P; refits start here
  std::vector<RatingEvent> history;
  std::set<std::string> skipped;

  bool operator==(const LearnerProfile&) const = default;
};

void to_json(nlohmann::json& j, const LearnerProfile& p);
void from_json(const nlohmann::json& j, LearnerProfile& p);

/// Rating threshold on Y for advancing a level (4 stars).
inline constexpr double kAdvanceThreshold = 0.75;

/// Level update after a rating: Y >= threshold advances one level, or marks
/// the skill mastered when already advanced.
SkillTarget progress(SkillTarget target, double satisfaction);

/// Throws DuplicateTarget if the skill is already a target.
LearnerProfile add_target(const LearnerProfile& profile, const std::string& skill, Level level);

/// Top-ranked video for `skill` at the learner's current level, excluding
/// rated and skipped videos. Throws UnknownSkill (not a target),
/// SkillMastered, NoCandidates.
RankedCandidate next_recommendation(const LearnerProfile& profile, const std::string& skill,
                                    const VideoFeatureIndex& index);

/// Records Y = (stars-1)/4 for the active recommendation `video_id`, refits P
/// over the full history and applies level progression. Throws UnknownVideo,
/// RatingOutOfRange, NotActiveRecommendation.
LearnerProfile record_rating(const LearnerProfile& profile, const std::string& video_id, int stars,
                             const VideoFeatureIndex& index, const DescentConfig& descent = {},
                             std::int64_t timestamp = 0);

/// As record_rating with the satisfaction Y in [0, 1] given directly.
LearnerProfile record_satisfaction(const LearnerProfile& profile, const std::string& video_id,
                                   double satisfaction, const VideoFeatureIndex& index,
                                   const DescentConfig& descent = {}, std::int64_t timestamp = 0);

/// Adds `video_id` to the skipped set. Re-skipping is a no-op. Throws
/// UnknownVideo, NotActiveRecommendation.
LearnerProfile skip_recommendation(const LearnerProfile& profile, const std::string& video_id,
                                   const VideoFeatureIndex& index);

/// fit_preferences(p_init, history): the P every profile must carry.
PreferenceMatrixP replay_preferences(const LearnerProfile& profile, const DescentConfig& descent = {});

}  // namespace skillrec
