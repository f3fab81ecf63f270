#include "skillrec/learner.hpp"

#include <cmath>

#include "skillrec/error.hpp"

namespace skillrec {
namespace {

const std::vector<Candidate> kNoCandidates;

std::vector<double> as_vector(const PreferenceMatrixP& p) {
  return {p.data(), p.data() + p.size()};
}

PreferenceMatrixP as_preferences(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 4) throw Error(ErrorCode::kParseError, "preference vector must have 4 components");
  return Eigen::Map<const PreferenceMatrixP>(v.data());
}

// The video must be the current top recommendation of its skill.
const VideoFeatureIndex::Entry& require_active(const LearnerProfile& profile,
                                               const std::string& video_id,
                                               const VideoFeatureIndex& index) {
  const auto* entry = index.find(video_id);
  if (!entry) throw Error(ErrorCode::kUnknownVideo, "unknown video '" + video_id + "'");
  const auto& skill = entry->video->target_skill;
  auto target = profile.targets.find(skill);
  const bool active = target != profile.targets.end() && !target->second.mastered &&
                      [&] {
                        try {
                          return next_recommendation(profile, skill, index).video_id == video_id;
                        } catch (const Error&) {
                          return false;
                        }
                      }();
  if (!active) {
    throw Error(ErrorCode::kNotActiveRecommendation,
                "video '" + video_id + "' is not the active recommendation for '" + skill + "'");
  }
  return *entry;
}

}  // namespace

VideoFeatureIndex::VideoFeatureIndex(const Catalog& catalog,
                                     const std::function<double(const VideoRecord&)>& fit_probability) {
  for (const auto& v : catalog.records()) {
    const auto x = build_feature_vector_x(v, catalog.group(v.target_skill), fit_probability(v));
    entries_.emplace(v.id, Entry{&v, x});
    buckets_[{v.target_skill, static_cast<int>(v.level)}].push_back({v.id, x});
  }
}

const VideoFeatureIndex::Entry* VideoFeatureIndex::find(const std::string& video_id) const {
  auto it = entries_.find(video_id);
  return it == entries_.end() ? nullptr : &it->second;
}

const std::vector<Candidate>& VideoFeatureIndex::candidates(const std::string& skill, Level level) const {
  auto it = buckets_.find({skill, static_cast<int>(level)});
  return it == buckets_.end() ? kNoCandidates : it->second;
}

void to_json(nlohmann::json& j, const LearnerProfile& p) {
  nlohmann::json targets = nlohmann::json::object();
  for (const auto& [skill, t] : p.targets) {
    targets[skill] = {{"level", to_string(t.level)}, {"mastered", t.mastered}};
  }
  j = {{"id", p.id},
       {"occupation", p.context.occupation},
       {"location", p.context.location},
       {"education", p.context.education},
       {"targets", targets},
       {"P", as_vector(p.p)},
       {"P_init", as_vector(p.p_init)},
       {"history", p.history},
       {"skipped", p.skipped}};
}

void from_json(const nlohmann::json& j, LearnerProfile& p) {
  p.id = j.at("id").get<std::string>();
  p.context.occupation = j.at("occupation").get<std::string>();
  p.context.location = j.at("location").get<std::string>();
  p.context.education = j.at("education").get<std::string>();
  p.targets.clear();
  for (const auto& [skill, t] : j.at("targets").items()) {
    p.targets[skill] = {parse_level(t.at("level").get<std::string>()), t.at("mastered").get<bool>()};
  }
  p.p = as_preferences(j.at("P"));
  p.p_init = as_preferences(j.at("P_init"));
  p.history = j.at("history").get<std::vector<RatingEvent>>();
  p.skipped = j.at("skipped").get<std::set<std::string>>();
}

SkillTarget progress(SkillTarget target, double satisfaction) {
  if (target.mastered || satisfaction < kAdvanceThreshold) return target;
  if (target.level == Level::kAdvanced) {
    target.mastered = true;
  } else {
    target.level = static_cast<Level>(static_cast<int>(target.level) + 1);
  }
  return target;
}

LearnerProfile add_target(const LearnerProfile& profile, const std::string& skill, Level level) {
  if (profile.targets.contains(skill)) {
    throw Error(ErrorCode::kDuplicateTarget, "skill '" + skill + "' is already a target");
  }
  LearnerProfile out = profile;
  out.targets[skill] = {level, false};
  return out;
}

RankedCandidate next_recommendation(const LearnerProfile& profile, const std::string& skill,
                                    const VideoFeatureIndex& index) {
  auto target = profile.targets.find(skill);
  if (target == profile.targets.end()) {
    throw Error(ErrorCode::kUnknownSkill, "skill '" + skill + "' is not a target of this learner");
  }
  if (target->second.mastered) {
    throw Error(ErrorCode::kSkillMastered, "skill '" + skill + "' is already mastered");
  }
  std::set<std::string> exclude = profile.skipped;
  for (const auto& e : profile.history) exclude.insert(e.video_id);
  const auto& pool = index.candidates(skill, target->second.level);
  try {
    return rank_candidates(profile.p, pool, exclude).front();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoCandidates) throw;
    throw Error(ErrorCode::kNoCandidates, "no videos left for '" + skill + "' at level " +
                                              std::string(to_string(target->second.level)));
  }
}

LearnerProfile record_satisfaction(const LearnerProfile& profile, const std::string& video_id,
                                   double satisfaction, const VideoFeatureIndex& index,
                                   const DescentConfig& descent, std::int64_t timestamp) {
  if (!(satisfaction >= 0.0 && satisfaction <= 1.0)) {
    throw Error(ErrorCode::kRatingOutOfRange, "satisfaction must lie in [0, 1]");
  }
  const auto& entry = require_active(profile, video_id, index);
  const auto& skill = entry.video->target_skill;

  LearnerProfile out = profile;
  out.history.push_back({profile.id, video_id, skill, entry.x, satisfaction, timestamp});
  out.p = fit_preferences(out.p_init, out.history, descent);
  out.targets[skill] = progress(out.targets[skill], satisfaction);
  return out;
}

LearnerProfile record_rating(const LearnerProfile& profile, const std::string& video_id, int stars,
                             const VideoFeatureIndex& index, const DescentConfig& descent,
                             std::int64_t timestamp) {
  if (!index.find(video_id)) throw Error(ErrorCode::kUnknownVideo, "unknown video '" + video_id + "'");
  return record_satisfaction(profile, video_id, satisfaction_from_stars(stars), index, descent,
                             timestamp);
}

LearnerProfile skip_recommendation(const LearnerProfile& profile, const std::string& video_id,
                                   const VideoFeatureIndex& index) {
  if (!index.find(video_id)) throw Error(ErrorCode::kUnknownVideo, "unknown video '" + video_id + "'");
  if (profile.skipped.contains(video_id)) return profile;
  require_active(profile, video_id, index);
  LearnerProfile out = profile;
  out.skipped.insert(video_id);
  return out;
}

PreferenceMatrixP replay_preferences(const LearnerProfile& profile, const DescentConfig& descent) {
  return fit_preferences(profile.p_init, profile.history, descent);
}

}  // namespace skillrec
