#include "skillrec/fit_model.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>

#include "skillrec/error.hpp"
#include "skillrec/io.hpp"
#include "skillrec/random.hpp"

namespace skillrec::fit {
namespace {

double gini(int n0, int n1) {
  const double n = n0 + n1;
  if (n == 0) return 0.0;
  const double p0 = n0 / n, p1 = n1 / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

class TreeGrower {
 public:
  TreeGrower(const std::vector<Sample>& data, const ForestConfig& config, std::uint64_t seed)
      : data_(data), config_(config), rng_(seed) {}

  DecisionTree grow(std::vector<std::size_t> rows) {
    split(rows, 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double decrease = -1.0;
    std::size_t left_size = 0;
  };

  int split(std::vector<std::size_t>& rows, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    std::array<int, 2> counts{0, 0};
    for (auto r : rows) ++counts[static_cast<std::size_t>(data_[r].label)];
    tree_.nodes[id].counts = counts;

    const auto n = rows.size();
    const bool depth_limited = config_.max_depth > 0 && depth >= config_.max_depth;
    const bool pure = counts[0] == 0 || counts[1] == 0;
    const auto min_leaf = static_cast<std::size_t>(std::max(1, config_.min_samples_leaf));
    if (depth_limited || pure || n < 2 * min_leaf) return id;

    Split best = find_split(rows, counts, min_leaf);
    if (best.feature < 0) return id;

    std::stable_partition(rows.begin(), rows.end(), [&](std::size_t r) {
      return data_[r].x[best.feature] <= best.threshold;
    });
    std::vector<std::size_t> left(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(best.left_size));
    std::vector<std::size_t> right(rows.begin() + static_cast<std::ptrdiff_t>(best.left_size), rows.end());
    rows.clear();
    rows.shrink_to_fit();

    tree_.impurity_decrease[static_cast<std::size_t>(best.feature)] += best.decrease;
    const int l = split(left, depth + 1);
    const int r = split(right, depth + 1);
    auto& node = tree_.nodes[id];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  // Evaluates `features_per_split` random features; keeps drawing further
  // features while none of them admits a valid split.
  Split find_split(const std::vector<std::size_t>& rows, std::array<int, 2> counts,
                   std::size_t min_leaf) {
    std::array<int, kNumFeatures> order;
    std::iota(order.begin(), order.end(), 0);
    for (int i = kNumFeatures - 1; i > 0; --i) {
      std::swap(order[i], order[rng_.index(static_cast<std::size_t>(i) + 1)]);
    }
    const double parent = static_cast<double>(rows.size()) * gini(counts[0], counts[1]);
    const int k = std::clamp(config_.features_per_split, 1, kNumFeatures);

    Split best;
    std::vector<std::size_t> sorted(rows);
    for (int i = 0; i < kNumFeatures; ++i) {
      if (i >= k && best.feature >= 0) break;
      const int f = order[i];
      std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
        const double va = data_[a].x[f], vb = data_[b].x[f];
        return va < vb || (va == vb && a < b);
      });
      std::array<int, 2> left{0, 0};
      for (std::size_t pos = 0; pos + 1 < sorted.size(); ++pos) {
        ++left[static_cast<std::size_t>(data_[sorted[pos]].label)];
        const double here = data_[sorted[pos]].x[f];
        const double next = data_[sorted[pos + 1]].x[f];
        if (here == next) continue;
        const std::size_t nl = pos + 1, nr = sorted.size() - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const std::array<int, 2> right{counts[0] - left[0], counts[1] - left[1]};
        const double child = static_cast<double>(nl) * gini(left[0], left[1]) +
                             static_cast<double>(nr) * gini(right[0], right[1]);
        const double decrease = parent - child;
        if (decrease > best.decrease) {
          best = {f, here + (next - here) / 2.0, decrease, nl};
          // midpoint can round onto `next` for adjacent doubles
          if (!(best.threshold < next)) best.threshold = here;
        }
      }
    }
    if (best.feature >= 0 && best.decrease < 0.0) best.decrease = 0.0;
    return best;
  }

  const std::vector<Sample>& data_;
  const ForestConfig& config_;
  Rng rng_;
  DecisionTree tree_;
};

}  // namespace

FitFeatures make_features(double length_s, double rating, double view_count, double relevancy,
                          int level, double text_similarity) {
  FitFeatures f;
  f << length_s, rating, view_count, relevancy, static_cast<double>(level), text_similarity;
  return f;
}

FitFeatures features_of(const Catalog& catalog, const VideoRecord& v) {
  return make_features(v.length_s, catalog.imputed_rating(v),
                       static_cast<double>(v.view_count.value_or(0)), v.relevancy_score,
                       static_cast<int>(v.level), v.text_similarity);
}

const DecisionTree::Node& DecisionTree::leaf_for(const FitFeatures& x) const {
  const Node* node = &nodes.at(0);
  while (!node->is_leaf()) {
    node = &nodes[static_cast<std::size_t>(x[node->feature] <= node->threshold ? node->left : node->right)];
  }
  return *node;
}

int DecisionTree::vote(const FitFeatures& x) const {
  const auto& leaf = leaf_for(x);
  return leaf.counts[1] >= leaf.counts[0] ? 1 : 0;
}

RandomForestModel train_fit_model(const std::vector<Sample>& data, const ForestConfig& config) {
  bool has_pos = false, has_neg = false;
  for (const auto& s : data) {
    if (s.label != 0 && s.label != 1) throw Error(ErrorCode::kBadRequest, "fit labels must be 0 or 1");
    has_pos = has_pos || s.label == 1;
    has_neg = has_neg || s.label == 0;
  }
  if (!has_pos || !has_neg) {
    throw Error(ErrorCode::kSingleClassCorpus, "fit training data must contain both labels");
  }
  if (config.n_trees < 1) throw Error(ErrorCode::kBadRequest, "n_trees must be >= 1");

  std::vector<DecisionTree> trees(static_cast<std::size_t>(config.n_trees));
  auto grow_tree = [&](std::size_t t) {
    const std::uint64_t tree_seed = mix_seed(config.seed ^ mix_seed(t + 1));
    Rng sampler(tree_seed);
    std::vector<std::size_t> rows(data.size());
    if (config.bootstrap) {
      for (auto& r : rows) r = sampler.index(data.size());
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    trees[t] = TreeGrower(data, config, mix_seed(tree_seed)).grow(std::move(rows));
  };

  const auto workers = std::max(1u, std::min(std::thread::hardware_concurrency(),
                                             static_cast<unsigned>(config.n_trees)));
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (auto t = next++; t < trees.size(); t = next++) grow_tree(t);
    });
  }
  pool.clear();
  return RandomForestModel(config, std::move(trees));
}

FitPrediction predict_fit(const RandomForestModel& model, const FitFeatures& f) {
  const auto& trees = model.trees();
  if (trees.empty()) return {0.0, 0};
  int votes = 0;
  for (const auto& t : trees) votes += t.vote(f);
  const double p = static_cast<double>(votes) / static_cast<double>(trees.size());
  return {p, p >= 0.5 ? 1 : 0};
}

std::array<double, kNumFeatures> feature_importances(const RandomForestModel& model) {
  std::array<double, kNumFeatures> total{};
  for (const auto& t : model.trees()) {
    double sum = 0.0;
    for (double d : t.impurity_decrease) sum += d;
    if (sum <= 0.0) continue;
    for (int f = 0; f < kNumFeatures; ++f) total[f] += t.impurity_decrease[f] / sum;
  }
  double sum = 0.0;
  for (double v : total) sum += v;
  if (sum <= 0.0) {
    total.fill(1.0 / kNumFeatures);
    return total;
  }
  for (double& v : total) v /= sum;
  return total;
}

std::vector<Sample> annotated_samples(const Catalog& catalog) {
  std::vector<Sample> out;
  for (const auto& v : catalog.records()) {
    if (v.fit_label) out.push_back({features_of(catalog, v), *v.fit_label});
  }
  return out;
}

nlohmann::json RandomForestModel::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes) {
      if (n.is_leaf()) {
        nodes.push_back({{"counts", n.counts}});
      } else {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"counts", n.counts}});
      }
    }
    trees.push_back({{"nodes", nodes}, {"impurity_decrease", t.impurity_decrease}});
  }
  return {{"format", "skillrec-random-forest"},
          {"version", kFormatVersion},
          {"features", kFeatureNames},
          {"config",
           {{"n_trees", config_.n_trees},
            {"max_depth", config_.max_depth},
            {"min_samples_leaf", config_.min_samples_leaf},
            {"features_per_split", config_.features_per_split},
            {"bootstrap", config_.bootstrap},
            {"seed", config_.seed}}},
          {"trees", trees}};
}

RandomForestModel RandomForestModel::from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::kParseError, "unsupported forest model version " + j.at("version").dump());
    }
    const auto& c = j.at("config");
    ForestConfig config;
    config.n_trees = c.at("n_trees").get<int>();
    config.max_depth = c.at("max_depth").get<int>();
    config.min_samples_leaf = c.at("min_samples_leaf").get<int>();
    config.features_per_split = c.at("features_per_split").get<int>();
    config.bootstrap = c.at("bootstrap").get<bool>();
    config.seed = c.at("seed").get<std::uint64_t>();
    std::vector<DecisionTree> trees;
    for (const auto& jt : j.at("trees")) {
      DecisionTree t;
      for (const auto& jn : jt.at("nodes")) {
        DecisionTree::Node n;
        n.counts = jn.at("counts").get<std::array<int, 2>>();
        if (jn.contains("feature")) {
          n.feature = jn.at("feature").get<int>();
          n.threshold = jn.at("threshold").get<double>();
          n.left = jn.at("left").get<int>();
          n.right = jn.at("right").get<int>();
          if (n.feature < 0 || n.feature >= kNumFeatures) {
            throw Error(ErrorCode::kParseError, "tree node feature out of range");
          }
        }
        t.nodes.push_back(n);
      }
      const auto count = static_cast<int>(t.nodes.size());
      if (count == 0) throw Error(ErrorCode::kParseError, "empty tree");
      for (int i = 0; i < count; ++i) {
        const auto& n = t.nodes[static_cast<std::size_t>(i)];
        if (!n.is_leaf() && (n.left <= i || n.left >= count || n.right <= i || n.right >= count)) {
          throw Error(ErrorCode::kParseError, "tree child index out of range");
        }
      }
      t.impurity_decrease = jt.at("impurity_decrease").get<std::array<double, kNumFeatures>>();
      trees.push_back(std::move(t));
    }
    return RandomForestModel(config, std::move(trees));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("forest model: ") + e.what());
  }
}

void RandomForestModel::save(const std::filesystem::path& path) const {
  io::write_file_atomic(path, to_json().dump());
}

RandomForestModel RandomForestModel::load(const std::filesystem::path& path) {
  return from_json(io::read_json(path));
}

}  // namespace skillrec::fit
