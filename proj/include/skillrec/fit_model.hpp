#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "skillrec/catalog.hpp"
#include "skillrec/types.hpp"

namespace skillrec::fit {

inline constexpr int kNumFeatures = 6;

/// Fixed order: length_s, rating, view_count, relevancy_score, level, text_similarity.
using FitFeatures = Vector<double, kNumFeatures>;

namespace index {
inline constexpr int kLength = 0;
inline constexpr int kRating = 1;
inline constexpr int kViewCount = 2;
inline constexpr int kRelevancy = 3;
inline constexpr int kLevel = 4;
inline constexpr int kTextSimilarity = 5;
}  // namespace index

inline constexpr std::array<const char*, kNumFeatures> kFeatureNames = {
    "length", "rating", "view_count", "relevancy_score", "level", "text_similarity"};

FitFeatures make_features(double length_s, double rating, double view_count, double relevancy,
                          int level, double text_similarity);

/// Features of a catalog video; absent rating/view count use the catalog's imputation.
FitFeatures features_of(const Catalog& catalog, const VideoRecord& v);

struct Sample {
  FitFeatures x;
  int label = 0;
};

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 12;          ///< <= 0 means unlimited
  int min_samples_leaf = 2;
  int features_per_split = 3;  ///< ceil(sqrt(6))
  bool bootstrap = true;
  std::uint64_t seed = 7;
};

/// Axis-aligned binary tree. Leaves hold class counts of the training rows
/// that reached them.
struct DecisionTree {
  struct Node {
    int feature = -1;  ///< -1 for leaves
    double threshold = 0.0;  ///< go left when x[feature] <= threshold
    int left = -1, right = -1;
    std::array<int, 2> counts{0, 0};

    bool is_leaf() const { return feature < 0; }
  };
  std::vector<Node> nodes;  ///< nodes[0] is the root
  /// Weighted Gini decrease accumulated per feature while growing.
  std::array<double, kNumFeatures> impurity_decrease{};

  const Node& leaf_for(const FitFeatures& x) const;
  /// Leaf majority; an even split votes 1.
  int vote(const FitFeatures& x) const;
};

class RandomForestModel {
 public:
  static constexpr int kFormatVersion = 1;

  RandomForestModel() = default;
  RandomForestModel(ForestConfig config, std::vector<DecisionTree> trees)
      : config_(config), trees_(std::move(trees)) {}

  const ForestConfig& config() const { return config_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }

  nlohmann::json to_json() const;
  static RandomForestModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static RandomForestModel load(const std::filesystem::path& path);

 private:
  ForestConfig config_;
  std::vector<DecisionTree> trees_;
};

/// Bootstrap-sampled Gini trees; deterministic given config.seed (tree t is
/// grown from a seed derived from (seed, t)). Throws SingleClassCorpus.
RandomForestModel train_fit_model(const std::vector<Sample>& data, const ForestConfig& config = {});

struct FitPrediction {
  double probability = 0.0;  ///< fraction of trees voting 1
  int label = 0;
};

FitPrediction predict_fit(const RandomForestModel& model, const FitFeatures& f);

/// Mean decrease in Gini impurity per feature, normalized to sum 1.
std::array<double, kNumFeatures> feature_importances(const RandomForestModel& model);

/// Training rows from annotated catalog videos (those carrying fit_label).
std::vector<Sample> annotated_samples(const Catalog& catalog);

}  // namespace skillrec::fit
