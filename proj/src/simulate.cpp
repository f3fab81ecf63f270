#include "skillrec/simulate.hpp"

#include <algorithm>
#include <array>
#include <chrono>

#include "skillrec/error.hpp"
#include "skillrec/random.hpp"

namespace skillrec::sim {
namespace {

std::vector<double> as_vector(const PreferenceMatrixP& p) { return {p.data(), p.data() + 4}; }

// Uniform draw from the probability simplex, so P*.X stays inside [0, 1].
PreferenceMatrixP hidden_preferences(Rng& rng) {
  PreferenceMatrixP p;
  for (int i = 0; i < 4; ++i) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    p[i] = -std::log(u);
  }
  return p / p.sum();
}

}  // namespace

nlohmann::json SimulationReport::to_json() const {
  nlohmann::json per_user = nlohmann::json::array();
  for (const auto& u : users) {
    per_user.push_back({{"user_id", u.user_id},
                        {"hidden_P", as_vector(u.hidden_p)},
                        {"learned_P", as_vector(u.learned_p)},
                        {"cosine", u.cosine},
                        {"utility", u.utility}});
  }
  return {{"mean_cosine", mean_cosine},
          {"mean_utility_early", mean_utility_early},
          {"mean_utility_late", mean_utility_late},
          {"ratings", ratings},
          {"seconds", seconds},
          {"users", per_user}};
}

SimulationReport run_simulation(const SimulationConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  if (config.users < 1 || config.rounds < 2) {
    throw Error(ErrorCode::kBadRequest, "simulation needs at least 1 user and 2 rounds");
  }

  auto world = synthetic::make_world(config.world);
  for (auto& v : world.videos) {
    v.text_similarity = text_similarity(world.vectors, v.transcript, world.descriptions.at(v.target_skill));
  }
  const Catalog catalog(std::move(world.videos), world.skills);
  const auto forest = fit::train_fit_model(fit::annotated_samples(catalog), config.forest);
  const VideoFeatureIndex index(catalog, [&](const VideoRecord& v) {
    return fit::predict_fit(forest, fit::features_of(catalog, v)).probability;
  });

  static const std::array<const char*, 3> kOccupations = {"data analyst", "software engineer", "student"};
  static const std::array<const char*, 3> kLocations = {"Hannover", "Berlin", "Lisbon"};
  static const std::array<const char*, 3> kEducation = {"bachelor", "master", "phd"};

  Rng rng(config.seed);
  std::vector<Peer> peers;
  SimulationReport report;
  const int half = config.rounds / 2;
  double early = 0.0, late = 0.0;
  int n_early = 0, n_late = 0;

  for (int u = 0; u < config.users; ++u) {
    UserOutcome outcome;
    outcome.user_id = "sim-" + std::to_string(u);
    outcome.hidden_p = hidden_preferences(rng);

    LearnerProfile profile;
    profile.id = outcome.user_id;
    profile.context = {kOccupations[rng.index(3)], kLocations[rng.index(3)], kEducation[rng.index(3)]};
    profile.p = profile.p_init = init_preferences(profile.context, peers);

    std::vector<std::string> order;
    for (const auto& s : world.skills) order.push_back(s.name);
    rng.shuffle(order);
    for (const auto& s : order) profile = add_target(profile, s, Level::kBeginner);

    std::size_t cursor = 0;
    for (int round = 0; round < config.rounds; ++round) {
      std::optional<RankedCandidate> rec;
      for (std::size_t tried = 0; tried < order.size() && !rec; ++tried) {
        const auto& skill = order[(cursor + tried) % order.size()];
        try {
          rec = next_recommendation(profile, skill, index);
          cursor = (cursor + tried + 1) % order.size();
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kNoCandidates && e.code() != ErrorCode::kSkillMastered) throw;
        }
      }
      if (!rec) throw Error(ErrorCode::kNoCandidates, "simulated catalog exhausted");

      const double utility = outcome.hidden_p.dot(rec->x);
      const double y = std::clamp(utility + rng.normal(0.0, config.noise_sigma), 0.0, 1.0);
      profile = record_satisfaction(profile, rec->video_id, y, index, config.descent, round + 1);
      outcome.utility.push_back(utility);
      ++report.ratings;
      if (round < half) {
        early += utility;
        ++n_early;
      } else {
        late += utility;
        ++n_late;
      }
    }

    outcome.learned_p = profile.p;
    outcome.cosine = cosine_similarity(outcome.learned_p, outcome.hidden_p);
    report.mean_cosine += outcome.cosine;
    peers.push_back({profile.context, profile.p});
    report.users.push_back(std::move(outcome));
  }

  report.mean_cosine /= config.users;
  report.mean_utility_early = early / n_early;
  report.mean_utility_late = late / n_late;
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace skillrec::sim
