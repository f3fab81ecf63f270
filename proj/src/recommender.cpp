#include "skillrec/recommender.hpp"

#include <algorithm>
#include <cmath>

#include "skillrec/error.hpp"

namespace skillrec {

void to_json(nlohmann::json& j, const RatingEvent& e) {
  j = {{"user_id", e.user_id},
       {"video_id", e.video_id},
       {"skill", e.skill},
       {"x", std::vector<double>(e.x.data(), e.x.data() + 4)},
       {"y", e.y},
       {"timestamp", e.timestamp}};
}

void from_json(const nlohmann::json& j, RatingEvent& e) {
  e.user_id = j.at("user_id").get<std::string>();
  e.video_id = j.at("video_id").get<std::string>();
  e.skill = j.at("skill").get<std::string>();
  const auto x = j.at("x").get<std::vector<double>>();
  if (x.size() != 4) throw Error(ErrorCode::kParseError, "rating event x must have 4 components");
  e.x = Eigen::Map<const FeatureVectorX>(x.data());
  e.y = j.at("y").get<double>();
  e.timestamp = j.value("timestamp", std::int64_t{0});
}

double satisfaction_from_stars(int stars) {
  if (stars < 1 || stars > 5) {
    throw Error(ErrorCode::kRatingOutOfRange, "stars must be in 1..5, got " + std::to_string(stars));
  }
  return (stars - 1) / 4.0;
}

double loss(const PreferenceMatrixP& p, std::span<const RatingEvent> events) {
  double total = 0.0;
  for (const auto& e : events) total += std::abs(p.dot(e.x) - e.y);
  return total;
}

PreferenceMatrixP loss_subgradient(const PreferenceMatrixP& p, std::span<const RatingEvent> events) {
  PreferenceMatrixP g = PreferenceMatrixP::Zero();
  for (const auto& e : events) {
    const double r = p.dot(e.x) - e.y;
    if (r > kKinkTolerance) {
      g += e.x;
    } else if (r < -kKinkTolerance) {
      g -= e.x;
    }
  }
  return g;
}

PreferenceMatrixP fit_preferences(const PreferenceMatrixP& p0, std::span<const RatingEvent> events,
                                  const DescentConfig& config, std::vector<double>* loss_trace) {
  if (!(config.learning_rate > 0.0)) throw Error(ErrorCode::kBadRequest, "learning rate must be > 0");
  if (config.epochs < 1) throw Error(ErrorCode::kBadRequest, "epochs must be >= 1");
  for (const auto& e : events) {
    if (!e.x.allFinite() || !std::isfinite(e.y)) {
      throw Error(ErrorCode::kNonFiniteLoss, "non-finite X or Y in event for video '" + e.video_id + "'");
    }
  }

  PreferenceMatrixP p = p0;
  double current = loss(p, events);
  if (loss_trace) loss_trace->assign(1, current);
  double step = config.learning_rate;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const PreferenceMatrixP g = loss_subgradient(p, events);
    if (g.isZero(0.0)) break;
    const PreferenceMatrixP candidate = p - step * g;
    const double next = loss(candidate, events);
    if (next > current) {
      step /= 2.0;
      if (loss_trace) loss_trace->push_back(current);
      continue;
    }
    p = candidate;
    const double change = current - next;
    current = next;
    if (loss_trace) loss_trace->push_back(current);
    if (change < config.tolerance) break;
  }
  return p;
}

bool LearnerContext::shares_attribute(const LearnerContext& other) const {
  auto same = [](const std::string& a, const std::string& b) { return !a.empty() && a == b; };
  return same(occupation, other.occupation) || same(location, other.location) ||
         same(education, other.education);
}

PreferenceMatrixP init_preferences(const LearnerContext& user, std::span<const Peer> peers) {
  PreferenceMatrixP sum = PreferenceMatrixP::Zero();
  int matched = 0;
  for (const auto& peer : peers) {
    if (!user.shares_attribute(peer.context)) continue;
    sum += peer.p;
    ++matched;
  }
  if (matched == 0) return uniform_preferences();
  return sum / static_cast<double>(matched);
}

std::vector<RankedCandidate> rank_candidates(const PreferenceMatrixP& p,
                                             std::span<const Candidate> candidates,
                                             const std::set<std::string>& exclude) {
  std::vector<RankedCandidate> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (exclude.contains(c.video_id)) continue;
    out.push_back({c.video_id, c.x, cosine_similarity(c.x, p)});
  }
  if (out.empty()) throw Error(ErrorCode::kNoCandidates, "no candidate videos remain");
  std::sort(out.begin(), out.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.video_id < b.video_id;
  });
  return out;
}

}  // namespace skillrec
