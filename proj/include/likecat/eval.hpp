#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "likecat/core.hpp"
#include "likecat/features.hpp"
#include "likecat/models/model.hpp"

namespace likecat {

/// Width of the trait scale, the denominator of mae_pct.
inline constexpr double kScoreRange = kScoreMax - kScoreMin;

struct RegressionMetrics {
  std::size_t n = 0;
  double mse = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  /// Mean absolute error as a fraction of the 4-point scale range.
  double mae_pct = 0.0;
};

/// mse = (1/n) sum (predicted_i - actual_i)^2, rmse = sqrt(mse).
/// Throws LengthMismatch or EmptyInput.
RegressionMetrics compute_regression_metrics(std::span<const double> predicted, std::span<const double> actual);

struct RegressionReport {
  Trait trait = Trait::Openness;
  std::string algorithm;
  RegressionMetrics metrics;
};

struct ClassificationReport {
  int n_classes = 0;
  /// confusion[actual][predicted]
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<std::size_t> support;
  std::vector<double> precision;
  std::vector<double> recall;
  /// Classes never predicted; their precision is reported as 0.
  std::vector<int> undefined_precision;
  /// Classes with no actual members; their recall is reported as 0.
  std::vector<int> undefined_recall;
  /// Unweighted means over classes with non-zero support.
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double accuracy = 0.0;
};

/// Throws LengthMismatch or LabelOutOfRange.
ClassificationReport compute_classification_metrics(std::span<const int> predicted, std::span<const int> actual,
                                                     int n_classes);

/// Clamped predictions of a regressor over every test row for the model's
/// trait. Throws FeatureSpaceMismatch or EmptyInput.
RegressionReport evaluate(const TrainedModel& model, const FeatureMatrix& test);

/// Forest models only.
ClassificationReport evaluate_classifier(const TrainedModel& model, const FeatureMatrix& test);

nlohmann::json to_json(const RegressionReport& report);
nlohmann::json to_json(const ClassificationReport& report);

/// `trait,algorithm,n_test,mse,rmse,mae_pct`
std::string regression_csv_header();
std::string to_csv_row(const RegressionReport& report);

}  // namespace likecat
