#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "skillrec/fit_model.hpp"
#include "skillrec/learner.hpp"
#include "skillrec/synthetic.hpp"

namespace skillrec::sim {

struct SimulationConfig {
  int users = 20;
  int rounds = 10;
  std::uint64_t seed = 1;
  double noise_sigma = 0.05;
  synthetic::WorldConfig world;
  fit::ForestConfig forest;
  DescentConfig descent;
};

struct UserOutcome {
  std::string user_id;
  PreferenceMatrixP hidden_p;   ///< ground truth P*
  PreferenceMatrixP learned_p;
  double cosine = 0.0;          ///< cosine(learned, hidden)
  std::vector<double> utility;  ///< P*.X of the recommendation in each round
};

struct SimulationReport {
  std::vector<UserOutcome> users;
  double mean_cosine = 0.0;
  /// Mean P*.X over rounds [1, rounds/2] and (rounds/2, rounds].
  double mean_utility_early = 0.0;
  double mean_utility_late = 0.0;
  double seconds = 0.0;
  int ratings = 0;

  nlohmann::json to_json() const;
};

/// Synthetic learners with hidden preference weights P* rate each
/// recommendation Y = clamp(P*.X + N(0, sigma), 0, 1). Each round rates one
/// recommendation, cycling over the learner's unmastered target skills.
SimulationReport run_simulation(const SimulationConfig& config);

}  // namespace skillrec::sim
