#include <doctest.h>

#include <memory>

#include "skillrec/learner.hpp"
#include "skillrec/random.hpp"
#include "support.hpp"

using namespace skillrec;

namespace {

struct World {
  std::unique_ptr<Catalog> catalog;
  VideoFeatureIndex index;
};

// Four videos per level for "sql" and "python", random engagement and lengths.
World make_world(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<VideoRecord> records;
  for (const char* skill : {"sql", "python"}) {
    for (int level = 0; level < 3; ++level) {
      for (int i = 0; i < 4; ++i) {
        records.push_back(testing::video(std::string(skill) + "-" + std::to_string(level) + "-" + std::to_string(i),
                                         skill, static_cast<Level>(level), rng.uniform(60, 3600),
                                         static_cast<std::int64_t>(rng.index(500)),
                                         static_cast<std::int64_t>(rng.index(50)), rng.uniform()));
      }
    }
  }
  World w;
  w.catalog = std::make_unique<Catalog>(std::move(records), testing::skills({"sql", "python"}));
  w.index = VideoFeatureIndex(*w.catalog, [](const VideoRecord& v) { return v.length_s > 1800 ? 0.8 : 0.3; });
  return w;
}

LearnerProfile learner(std::string id = "u1") {
  LearnerProfile p;
  p.id = std::move(id);
  p.context = {"analyst", "Berlin", "BSc"};
  return p;
}

double oracle_cosine(const FeatureVectorX& a, const FeatureVectorX& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

std::string brute_force_best(const World& w, const LearnerProfile& p, const std::string& skill) {
  const auto level = p.targets.at(skill).level;
  std::string best;
  double best_score = -2.0;
  for (const auto& v : w.catalog->records()) {
    if (v.target_skill != skill || v.level != level || p.skipped.contains(v.id)) continue;
    bool rated = false;
    for (const auto& e : p.history) rated |= e.video_id == v.id;
    if (rated) continue;
    const double s = oracle_cosine(w.index.find(v.id)->x, p.p);
    if (s > best_score || (s == best_score && v.id < best)) {
      best = v.id;
      best_score = s;
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("learner") {
  TEST_CASE("level progression rule") {
    CHECK(progress({Level::kBeginner, false}, 0.75) == SkillTarget{Level::kIntermediate, false});
    CHECK(progress({Level::kBeginner, false}, 0.5) == SkillTarget{Level::kBeginner, false});
    CHECK(progress({Level::kIntermediate, false}, 1.0) == SkillTarget{Level::kAdvanced, false});
    CHECK(progress({Level::kAdvanced, false}, 0.75) == SkillTarget{Level::kAdvanced, true});
    CHECK(progress({Level::kAdvanced, true}, 1.0) == SkillTarget{Level::kAdvanced, true});
    CHECK(progress({Level::kIntermediate, false}, 0.7499) == SkillTarget{Level::kIntermediate, false});
  }

  TEST_CASE("targets") {
    auto p = add_target(learner(), "sql", Level::kBeginner);
    CHECK(p.targets.at("sql") == SkillTarget{Level::kBeginner, false});
    CHECK(testing::error_of([&] { add_target(p, "sql", Level::kAdvanced); }) == ErrorCode::kDuplicateTarget);
    const auto w = make_world(1);
    CHECK(testing::error_of([&] { next_recommendation(p, "python", w.index); }) == ErrorCode::kUnknownSkill);
  }

  TEST_CASE("recommendation is the brute-force argmax") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto w = make_world(seed);
      Rng rng(seed + 100);
      auto p = add_target(learner(), "sql", static_cast<Level>(rng.index(3)));
      p.p = FeatureVectorX(rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform());
      CHECK(next_recommendation(p, "sql", w.index).video_id == brute_force_best(w, p, "sql"));
    }
  }

  TEST_CASE("a 4-star rating advances beginner to intermediate") {
    const auto w = make_world(2);
    auto p = add_target(learner(), "sql", Level::kBeginner);
    const auto rec = next_recommendation(p, "sql", w.index);
    p = record_rating(p, rec.video_id, 4, w.index);
    CHECK(p.targets.at("sql").level == Level::kIntermediate);
    REQUIRE(p.history.size() == 1);
    CHECK(p.history[0].y == 0.75);
    CHECK(p.history[0].x == rec.x);
    CHECK(w.catalog->find(next_recommendation(p, "sql", w.index).video_id)->level == Level::kIntermediate);
  }

  TEST_CASE("advanced skill becomes mastered") {
    const auto w = make_world(3);
    auto p = add_target(learner(), "sql", Level::kAdvanced);
    p = record_rating(p, next_recommendation(p, "sql", w.index).video_id, 5, w.index);
    CHECK(p.targets.at("sql").mastered);
    CHECK(testing::error_of([&] { next_recommendation(p, "sql", w.index); }) == ErrorCode::kSkillMastered);
  }

  TEST_CASE("a low rating keeps the level and refits P") {
    const auto w = make_world(4);
    auto p = add_target(learner(), "sql", Level::kBeginner);
    const auto before = p.p;
    const auto rec = next_recommendation(p, "sql", w.index);
    p = record_rating(p, rec.video_id, 2, w.index);
    CHECK(p.targets.at("sql").level == Level::kBeginner);
    CHECK(p.p != before);
    CHECK(p.p == fit_preferences(p.p_init, p.history));
    CHECK(next_recommendation(p, "sql", w.index).video_id != rec.video_id);
  }

  TEST_CASE("ratings validate the video") {
    const auto w = make_world(5);
    auto p = add_target(learner(), "sql", Level::kBeginner);
    const auto rec = next_recommendation(p, "sql", w.index);
    CHECK(testing::error_of([&] { record_rating(p, "nope", 4, w.index); }) == ErrorCode::kUnknownVideo);
    CHECK(testing::error_of([&] { record_rating(p, rec.video_id, 0, w.index); }) == ErrorCode::kRatingOutOfRange);
    std::string other;
    for (const auto& c : w.index.candidates("sql", Level::kBeginner)) {
      if (c.video_id != rec.video_id) other = c.video_id;
    }
    CHECK(testing::error_of([&] { record_rating(p, other, 4, w.index); }) == ErrorCode::kNotActiveRecommendation);
    CHECK(testing::error_of([&] { record_rating(p, "python-0-0", 4, w.index); }) ==
          ErrorCode::kNotActiveRecommendation);
  }

  TEST_CASE("skipping excludes the video without touching P") {
    const auto w = make_world(6);
    auto p = add_target(learner(), "sql", Level::kBeginner);
    const auto rec = next_recommendation(p, "sql", w.index);
    const auto skipped = skip_recommendation(p, rec.video_id, w.index);
    CHECK(skipped.p == p.p);
    CHECK(skipped.history.empty());
    CHECK(skipped.skipped.contains(rec.video_id));
    CHECK(next_recommendation(skipped, "sql", w.index).video_id != rec.video_id);
    CHECK(skip_recommendation(skipped, rec.video_id, w.index) == skipped);
    CHECK(testing::error_of([&] { skip_recommendation(p, "nope", w.index); }) == ErrorCode::kUnknownVideo);
  }

  TEST_CASE("exhausting a level raises NoCandidates") {
    const auto w = make_world(7);
    auto p = add_target(learner(), "sql", Level::kBeginner);
    for (int i = 0; i < 4; ++i) p = skip_recommendation(p, next_recommendation(p, "sql", w.index).video_id, w.index);
    CHECK(testing::error_of([&] { next_recommendation(p, "sql", w.index); }) == ErrorCode::kNoCandidates);
  }

  TEST_CASE("random sessions never repeat and levels never fall") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto w = make_world(seed);
      Rng rng(seed * 7);
      auto p = add_target(add_target(learner(), "sql", Level::kBeginner), "python", Level::kBeginner);
      std::set<std::string> seen;
      for (int step = 0; step < 30; ++step) {
        const std::string skill = rng.bernoulli(0.5) ? "sql" : "python";
        RankedCandidate rec;
        try {
          rec = next_recommendation(p, skill, w.index);
        } catch (const Error&) {
          continue;
        }
        CHECK(seen.insert(rec.video_id).second);
        const auto level_before = p.targets.at(skill).level;
        if (rng.bernoulli(0.2)) {
          p = skip_recommendation(p, rec.video_id, w.index);
        } else {
          p = record_rating(p, rec.video_id, 1 + static_cast<int>(rng.index(5)), w.index, {}, step);
        }
        CHECK(static_cast<int>(p.targets.at(skill).level) >= static_cast<int>(level_before));
        CHECK(p.p == replay_preferences(p));
      }
    }
  }

  TEST_CASE("replay reproduces P bit for bit") {
    const auto w = make_world(8);
    auto p = add_target(learner(), "python", Level::kBeginner);
    p.p_init = p.p = FeatureVectorX(0.4, 0.1, 0.3, 0.2);
    for (int stars : {2, 3, 1, 5, 4}) {
      try {
        p = record_rating(p, next_recommendation(p, "python", w.index).video_id, stars, w.index);
      } catch (const Error&) {
        break;
      }
    }
    CHECK(p.history.size() >= 3);
    const auto replayed = replay_preferences(p);
    for (int k = 0; k < 4; ++k) CHECK(replayed[k] == p.p[k]);
  }

  TEST_CASE("profile JSON round trip") {
    const auto w = make_world(9);
    auto p = add_target(learner(), "sql", Level::kIntermediate);
    p = record_rating(p, next_recommendation(p, "sql", w.index).video_id, 3, w.index, {}, 1700000000);
    p = skip_recommendation(p, next_recommendation(p, "sql", w.index).video_id, w.index);
    const nlohmann::json j = p;
    CHECK(j.get<LearnerProfile>() == p);
    CHECK(nlohmann::json::parse(j.dump()).get<LearnerProfile>() == p);

    auto bad = j;
    bad["P"] = {1, 2};
    CHECK(testing::error_of([&] { bad.get<LearnerProfile>(); }) == ErrorCode::kParseError);
  }
}
