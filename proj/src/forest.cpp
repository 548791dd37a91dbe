#include "likecat/models/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "likecat/error.hpp"
#include "likecat/rng.hpp"

namespace likecat {

void ForestConfig::validate() const {
  if (n_trees < 1) throw Error(ErrorCode::InvalidConfig, "n_trees must be >= 1");
  if (n_classes < 1) throw Error(ErrorCode::InvalidConfig, "n_classes must be >= 1");
  if (max_depth < 0) throw Error(ErrorCode::InvalidConfig, "max_depth must be >= 0");
  if (min_leaf < 1) throw Error(ErrorCode::InvalidConfig, "min_leaf must be >= 1");
}

int score_class(double score, int n_classes) {
  const double width = (kScoreMax - kScoreMin) / n_classes;
  const int c = static_cast<int>(std::floor((score - kScoreMin) / width));
  return std::clamp(c, 0, n_classes - 1);
}

double class_midpoint(int label, int n_classes) {
  const double width = (kScoreMax - kScoreMin) / n_classes;
  return kScoreMin + width * (label + 0.5);
}

int ClassificationTree::predict(std::span<const double> x) const {
  int at = 0;
  while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
    const auto& node = nodes[static_cast<std::size_t>(at)];
    at = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(at)].label;
}

int ForestClassifier::predict_class(std::span<const double> x) const {
  if (x.size() != dimension) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(dimension) + " features, got " + std::to_string(x.size()));
  }
  std::vector<int> votes(static_cast<std::size_t>(config.n_classes), 0);
  for (const auto& tree : trees) ++votes[static_cast<std::size_t>(tree.predict(x))];
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

namespace {

class TreeGrower {
 public:
  TreeGrower(std::span<const FeatureVector> rows, std::span<const int> labels, const ForestConfig& config, Rng& rng)
      : rows_(rows), labels_(labels), config_(config), rng_(rng) {}

  ClassificationTree grow(std::vector<std::size_t> sample) {
    tree_.nodes.clear();
    tree_.nodes.emplace_back();
    build(0, std::move(sample), 0);
    return std::move(tree_);
  }

 private:
  std::vector<std::size_t> class_counts(const std::vector<std::size_t>& idx) const {
    std::vector<std::size_t> counts(static_cast<std::size_t>(config_.n_classes), 0);
    for (auto i : idx) ++counts[static_cast<std::size_t>(labels_[i])];
    return counts;
  }

  static double gini_sum(const std::vector<std::size_t>& counts, std::size_t total) {
    // total * gini impurity; keeps the split comparison in weighted form.
    if (total == 0) return 0.0;
    double sq = 0.0;
    for (auto c : counts) sq += static_cast<double>(c) * static_cast<double>(c);
    return static_cast<double>(total) - sq / static_cast<double>(total);
  }

  std::vector<std::size_t> candidate_features() {
    const std::size_t d = rows_.front().size();
    std::vector<std::size_t> features(d);
    std::iota(features.begin(), features.end(), std::size_t{0});
    if (!config_.feature_subsample || d == 0) return features;
    const auto mtry = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));
    for (std::size_t i = 0; i < mtry; ++i) {
      const auto j = i + static_cast<std::size_t>(rng_.below(d - i));
      std::swap(features[i], features[j]);
    }
    features.resize(mtry);
    std::sort(features.begin(), features.end());
    return features;
  }

  void build(std::size_t node_id, std::vector<std::size_t> idx, int depth) {
    const auto counts = class_counts(idx);
    const int majority = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    tree_.nodes[node_id].label = majority;
    const bool pure = counts[static_cast<std::size_t>(majority)] == idx.size();
    const auto min_leaf = static_cast<std::size_t>(config_.min_leaf);
    if (pure || depth >= config_.max_depth || idx.size() < 2 * min_leaf) return;

    const double parent = gini_sum(counts, idx.size());
    double best_score = -1.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> sorted = idx;
    for (std::size_t f : candidate_features()) {
      std::stable_sort(sorted.begin(), sorted.end(),
                       [&](std::size_t a, std::size_t b) { return rows_[a][f] < rows_[b][f]; });
      std::vector<std::size_t> left(counts.size(), 0);
      auto right = counts;
      for (std::size_t pos = 0; pos + 1 < sorted.size(); ++pos) {
        const auto label = static_cast<std::size_t>(labels_[sorted[pos]]);
        ++left[label];
        --right[label];
        const double lo = rows_[sorted[pos]][f];
        const double hi = rows_[sorted[pos + 1]][f];
        const std::size_t n_left = pos + 1;
        if (!(hi > lo) || n_left < min_leaf || sorted.size() - n_left < min_leaf) continue;
        // Zero-gain splits are still taken on impure nodes so XOR-like
        // patterns can be separated deeper down.
        const double score = parent - gini_sum(left, n_left) - gini_sum(right, sorted.size() - n_left);
        if (score > best_score) {
          best_score = score;
          best_feature = static_cast<int>(f);
          const double mid = lo + (hi - lo) / 2.0;
          best_threshold = mid < hi ? mid : lo;
        }
      }
    }
    if (best_feature < 0) return;

    std::vector<std::size_t> left_idx, right_idx;
    for (auto i : idx) {
      (rows_[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left_idx : right_idx).push_back(i);
    }
    const auto l = tree_.nodes.size();
    tree_.nodes.emplace_back();
    tree_.nodes.emplace_back();
    auto& node = tree_.nodes[node_id];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = static_cast<int>(l);
    node.right = static_cast<int>(l + 1);
    build(l, std::move(left_idx), depth + 1);
    build(l + 1, std::move(right_idx), depth + 1);
  }

  std::span<const FeatureVector> rows_;
  std::span<const int> labels_;
  const ForestConfig& config_;
  Rng& rng_;
  ClassificationTree tree_;
};

}  // namespace

ForestClassifier fit_forest_classifier(std::span<const FeatureVector> rows, std::span<const int> labels,
                                       const ForestConfig& config) {
  config.validate();
  if (rows.empty()) throw Error(ErrorCode::DegenerateInput, "forest needs at least one row");
  if (rows.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "rows and labels differ in length");
  for (int label : labels) {
    if (label < 0 || label >= config.n_classes) throw Error(ErrorCode::LabelOutOfRange, "class label out of range");
  }
  ForestClassifier forest;
  forest.config = config;
  forest.dimension = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != forest.dimension) throw Error(ErrorCode::DimensionMismatch, "ragged feature rows");
  }
  const std::size_t n = rows.size();
  for (int t = 0; t < config.n_trees; ++t) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> sample(n);
    if (config.bootstrap) {
      for (auto& s : sample) s = static_cast<std::size_t>(rng.below(n));
    } else {
      std::iota(sample.begin(), sample.end(), std::size_t{0});
    }
    forest.trees.push_back(TreeGrower(rows, labels, config, rng).grow(std::move(sample)));
  }
  return forest;
}

ForestClassifier fit_forest_classifier(const FeatureMatrix& train, Trait trait, const ForestConfig& config) {
  config.validate();
  std::vector<FeatureVector> rows;
  std::vector<int> labels;
  rows.reserve(train.size());
  for (const auto& r : train.rows) {
    rows.push_back(r.features);
    labels.push_back(score_class(r.scores[trait], config.n_classes));
  }
  return fit_forest_classifier(rows, labels, config);
}

}  // namespace likecat
