#pragma once

#include <span>
#include <vector>

#include "likecat/core.hpp"
#include "likecat/features.hpp"

namespace likecat {

/// Binary regression tree. Internal nodes send x[feature] <= threshold left.
struct RegressionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf output
  };
  std::vector<Node> nodes;

  double predict(std::span<const double> x) const;
  int depth() const;
};

struct BoostedTreesConfig {
  int n_rounds = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  int min_leaf = 5;

  void validate() const;
};

struct BoostedTreesModel {
  BoostedTreesConfig config;
  std::size_t dimension = 0;
  double base_prediction = 0.0;
  std::vector<RegressionTree> trees;

  double raw_predict(std::span<const double> x) const;
};

/// Column-major copy of the features with one ascending sort order per column,
/// shared by every tree grown on the same rows.
class PresortedColumns {
 public:
  explicit PresortedColumns(std::span<const FeatureVector> rows);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_features() const { return columns_.size(); }
  const std::vector<double>& column(std::size_t f) const { return columns_[f]; }
  const std::vector<std::uint32_t>& order(std::size_t f) const { return order_[f]; }

 private:
  std::size_t n_rows_ = 0;
  std::vector<std::vector<double>> columns_;
  std::vector<std::vector<std::uint32_t>> order_;
};

/// Least-squares tree grown level by level. Candidate thresholds are midpoints
/// between consecutive distinct values; ties in gain go to the lowest feature,
/// then the lowest threshold. `fitted` receives the tree's output per row.
RegressionTree fit_regression_tree(const PresortedColumns& data, std::span<const double> targets, int max_depth,
                                   int min_leaf, std::vector<double>& fitted);

/// First-order gradient boosting on squared loss. When `train_mse` is given it
/// receives the training MSE after the base prediction and after every round.
BoostedTreesModel fit_boosted_trees(const FeatureMatrix& train, Trait trait, const BoostedTreesConfig& config = {},
                                    std::vector<double>* train_mse = nullptr);
BoostedTreesModel fit_boosted_trees(std::span<const FeatureVector> rows, std::span<const double> targets,
                                    const BoostedTreesConfig& config = {}, std::vector<double>* train_mse = nullptr);

}  // namespace likecat
