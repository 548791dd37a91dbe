#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "likecat/core.hpp"
#include "likecat/features.hpp"

namespace likecat {

struct KnnConfig {
  int k = 12;
  /// Weight of each category present in exactly one of the two users.
  double penalty = 0.1;

  void validate() const;
};

/// Sorted dimensions with a strictly positive value.
std::vector<std::uint32_t> support_of(std::span<const double> x);

/// Euclidean distance plus penalty * |support(a) symmetric-difference support(b)|.
/// Throws DimensionMismatch.
double knn_distance(std::span<const double> a, std::span<const double> b, double penalty);
double knn_distance(std::span<const double> a, std::span<const std::uint32_t> support_a, std::span<const double> b,
                    std::span<const std::uint32_t> support_b, double penalty);

/// Lazy learner: keeps the training rows, their supports and targets.
struct KnnModel {
  KnnConfig config;
  std::vector<FeatureVector> rows;
  std::vector<std::vector<std::uint32_t>> supports;
  std::vector<double> targets;

  std::size_t dimension() const { return rows.empty() ? 0 : rows.front().size(); }
  /// Unweighted mean target of the k nearest rows; distance ties go to the
  /// lower row index.
  double raw_predict(std::span<const double> x) const;
};

/// Throws KTooLarge when k exceeds the row count.
KnnModel fit_knn(const FeatureMatrix& train, Trait trait, const KnnConfig& config = {});
KnnModel fit_knn(std::span<const FeatureVector> rows, std::span<const double> targets, const KnnConfig& config = {});

}  // namespace likecat
