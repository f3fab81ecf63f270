#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "skillrec/catalog.hpp"
#include "skillrec/embeddings.hpp"
#include "skillrec/skill_mining.hpp"

/// Deterministic generators for fixtures, demos and the simulated learners.
namespace skillrec::synthetic {

/// Sentences whose positive vocabulary is disjoint from the negative one.
/// Every positive sentence contains the token "skillz".
std::vector<mining::LabeledSentence> separable_sentences(std::size_t n, std::uint64_t seed);

/// Balanced vacancy-style sentences. With probability `noise` a label is
/// replaced by a fair coin flip. Lines: {"id","text","label","clean_label"}.
std::vector<nlohmann::json> noisy_vacancy_sentences(std::size_t n, double noise, std::uint64_t seed);

struct WorldConfig {
  int n_skills = 16;
  int videos_per_level = 8;
  int vacancies = 300;
  int dim = 50;
  std::uint64_t seed = 2020;
};

struct World {
  std::vector<mining::SkillRecord> skills;  ///< canonical names, with descriptions
  std::map<std::string, std::string> descriptions;
  WordVectorStore vectors{50};
  std::vector<VideoRecord> videos;  ///< raw records with transcripts and fit labels
  std::vector<mining::Vacancy> vacancies;
};

/// Data-science skill catalog with topic-clustered word vectors: videos whose
/// transcript stays on topic have high text similarity to their skill.
World make_world(const WorldConfig& config = {});

/// Job-posting boilerplate terms ("experience", "required", ...) appended to
/// the default stop words for skill extraction.
const std::vector<std::string>& job_posting_stopwords();

}  // namespace skillrec::synthetic
