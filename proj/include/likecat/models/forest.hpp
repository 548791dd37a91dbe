#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "likecat/core.hpp"
#include "likecat/features.hpp"

namespace likecat {

struct ForestConfig {
  int n_trees = 50;
  int n_classes = 5;
  int max_depth = 8;
  int min_leaf = 1;
  /// Bootstrap resample per tree.
  bool bootstrap = true;
  /// Consider floor(sqrt(dim)) random features per split instead of all.
  bool feature_subsample = true;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Equal-width class bin of a [1,5] score; top edge inclusive.
int score_class(double score, int n_classes);
/// Center of a class bin, used when a forest stands in for a regressor.
double class_midpoint(int label, int n_classes);

struct ClassificationTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;
  };
  std::vector<Node> nodes;

  int predict(std::span<const double> x) const;
};

struct ForestClassifier {
  ForestConfig config;
  std::size_t dimension = 0;
  std::vector<ClassificationTree> trees;

  /// Majority vote; ties go to the lowest class index.
  int predict_class(std::span<const double> x) const;
};

/// Gini trees on bootstrap resamples; tree t is seeded from derive_seed(seed, t).
ForestClassifier fit_forest_classifier(const FeatureMatrix& train, Trait trait, const ForestConfig& config = {});
ForestClassifier fit_forest_classifier(std::span<const FeatureVector> rows, std::span<const int> labels,
                                       const ForestConfig& config = {});

}  // namespace likecat
