#include <doctest.h>

#include <numeric>

#include "skillrec/fit_model.hpp"
#include "skillrec/random.hpp"
#include "support.hpp"

using namespace skillrec;
using namespace skillrec::fit;
using namespace skillrec::fit::index;

namespace {

FitFeatures random_features(Rng& rng) {
  return make_features(rng.uniform(30, 4000), rng.uniform(1, 5), std::floor(rng.uniform(0, 1e6)),
                       1.0 / static_cast<double>(1 + rng.index(20)), static_cast<int>(rng.index(3)),
                       rng.uniform(-1, 1));
}

std::vector<Sample> samples(std::size_t n, std::uint64_t seed, const std::function<int(const FitFeatures&, Rng&)>& label) {
  Rng rng(seed);
  std::vector<Sample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = random_features(rng);
    out.push_back({x, label(x, rng)});
  }
  return out;
}

double sum(const std::array<double, kNumFeatures>& a) { return std::accumulate(a.begin(), a.end(), 0.0); }

}  // namespace

TEST_SUITE("fit_model") {
  TEST_CASE("feature order") {
    const auto f = make_features(1, 2, 3, 0.5, 2, 0.7);
    CHECK(f == FitFeatures(1, 2, 3, 0.5, 2, 0.7));
    CHECK(std::string(kFeatureNames[kLength]) == "length");
    CHECK(std::string(kFeatureNames[kTextSimilarity]) == "text_similarity");
  }

  TEST_CASE("fully grown tree memorizes its training set") {
    const auto data = samples(200, 1, [](const FitFeatures&, Rng& rng) { return rng.bernoulli(0.5) ? 1 : 0; });
    ForestConfig cfg;
    cfg.n_trees = 1;
    cfg.max_depth = 0;
    cfg.min_samples_leaf = 1;
    cfg.features_per_split = kNumFeatures;
    cfg.bootstrap = false;
    const auto model = train_fit_model(data, cfg);
    for (const auto& s : data) CHECK(predict_fit(model, s.x).label == s.label);
  }

  TEST_CASE("one-tree forest votes 0 or 1") {
    const auto data = samples(100, 2, [](const FitFeatures& x, Rng&) { return x[kLength] > 1000; });
    ForestConfig cfg;
    cfg.n_trees = 1;
    const auto model = train_fit_model(data, cfg);
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
      const double p = predict_fit(model, random_features(rng)).probability;
      CHECK((p == 0.0 || p == 1.0));
    }
  }

  TEST_CASE("forest probability is the fraction of tree votes") {
    const auto data = samples(300, 4, [](const FitFeatures& x, Rng& rng) {
      return (x[kTextSimilarity] > 0.2) != rng.bernoulli(0.15);
    });
    ForestConfig cfg;
    cfg.n_trees = 25;
    const auto model = train_fit_model(data, cfg);
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
      const auto x = random_features(rng);
      int votes = 0;
      for (const auto& t : model.trees()) votes += t.vote(x);
      const auto pred = predict_fit(model, x);
      CHECK(pred.probability == static_cast<double>(votes) / 25.0);
      CHECK(pred.label == (2 * votes >= 25 ? 1 : 0));
    }
  }

  TEST_CASE("single generative feature dominates importance") {
    const auto data = samples(400, 6, [](const FitFeatures& x, Rng&) { return x[kLength] > 1500.0; });
    const auto imp = feature_importances(train_fit_model(data, {}));
    CHECK(imp[kLength] > 0.9);
    CHECK(std::abs(sum(imp) - 1.0) <= 1e-9);
  }

  TEST_CASE("noise labels spread importance") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto data = samples(300, seed * 101, [](const FitFeatures&, Rng& rng) { return rng.bernoulli(0.5) ? 1 : 0; });
      ForestConfig cfg;
      cfg.seed = seed;
      const auto imp = feature_importances(train_fit_model(data, cfg));
      CHECK(*std::max_element(imp.begin(), imp.end()) < 0.6);
      CHECK(std::abs(sum(imp) - 1.0) <= 1e-9);
      for (double v : imp) CHECK(v >= 0.0);
    }
  }

  TEST_CASE("separable similarity threshold is learned exactly") {
    // A margin around 0.5 keeps held-out points off the split boundary.
    auto data = samples(500, 9, [](const FitFeatures& x, Rng&) { return x[kTextSimilarity] > 0.5; });
    std::erase_if(data, [](const Sample& s) { return std::abs(s.x[kTextSimilarity] - 0.5) < 0.05; });
    const auto [train_idx, test_idx] = train_test_split(data.size(), 0.7, 1);
    std::vector<Sample> train;
    for (auto i : train_idx) train.push_back(data[i]);
    const auto model = train_fit_model(train, {});
    for (auto i : test_idx) CHECK(predict_fit(model, data[i].x).label == data[i].label);
  }

  TEST_CASE("training is deterministic and seed dependent") {
    const auto data = samples(150, 10, [](const FitFeatures& x, Rng& rng) {
      return (x[kRating] > 3.0) != rng.bernoulli(0.1);
    });
    const auto a = train_fit_model(data, {}).to_json();
    CHECK(a == train_fit_model(data, {}).to_json());
    ForestConfig other;
    other.seed = 8;
    CHECK(a != train_fit_model(data, other).to_json());
  }

  TEST_CASE("persistence round trip") {
    testing::TempDir dir;
    const auto data = samples(150, 11, [](const FitFeatures& x, Rng&) { return x[kLevel] >= 1; });
    ForestConfig cfg;
    cfg.n_trees = 10;
    const auto model = train_fit_model(data, cfg);
    model.save(dir / "m.json");
    const auto loaded = RandomForestModel::load(dir / "m.json");
    Rng rng(12);
    for (int i = 0; i < 100; ++i) {
      const auto x = random_features(rng);
      CHECK(predict_fit(loaded, x).probability == predict_fit(model, x).probability);
    }
    CHECK(feature_importances(loaded) == feature_importances(model));

    auto j = model.to_json();
    j["version"] = 2;
    CHECK(testing::error_of([&] { RandomForestModel::from_json(j); }) == ErrorCode::kParseError);
  }

  TEST_CASE("corrupt tree structure is rejected") {
    const auto data = samples(80, 13, [](const FitFeatures& x, Rng&) { return x[kLength] > 800; });
    ForestConfig cfg;
    cfg.n_trees = 1;
    auto j = train_fit_model(data, cfg).to_json();
    auto& nodes = j["trees"][0]["nodes"];
    REQUIRE(nodes.size() > 1);
    for (auto& n : nodes) {
      if (n.contains("feature")) {
        n["left"] = 0;  // points back at the root
        break;
      }
    }
    CHECK(testing::error_of([&] { RandomForestModel::from_json(j); }) == ErrorCode::kParseError);
  }

  TEST_CASE("single-class data is rejected") {
    const auto data = samples(20, 14, [](const FitFeatures&, Rng&) { return 1; });
    CHECK(testing::error_of([&] { train_fit_model(data, {}); }) == ErrorCode::kSingleClassCorpus);
  }

  TEST_CASE("catalog features use imputed ratings") {
    auto a = testing::video("a", "sql", Level::kAdvanced, 120);
    a.rating = 4.5;
    a.view_count = 10;
    a.relevancy_score = 0.5;
    a.text_similarity = 0.3;
    a.fit_label = 1;
    auto b = testing::video("b", "sql", Level::kBeginner, 60);
    b.fit_label = 0;
    const Catalog c({a, b, testing::video("c", "sql")}, testing::skills({"sql"}));
    CHECK(features_of(c, *c.find("a")) == make_features(120, 4.5, 10, 0.5, 2, 0.3));
    CHECK(features_of(c, *c.find("b")) == make_features(60, 4.5, 0, 1.0, 0, 0.5));
    const auto annotated = annotated_samples(c);
    REQUIRE(annotated.size() == 2);
    CHECK(annotated[0].label == 1);
    CHECK(annotated[1].label == 0);
  }
}
