#include "likecat/eval.hpp"

#include <cmath>

#include "csv.hpp"
#include "likecat/error.hpp"

namespace likecat {

RegressionMetrics compute_regression_metrics(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(predicted.size()) + " predictions for " +
                                               std::to_string(actual.size()) + " actual values");
  }
  if (predicted.empty()) throw Error(ErrorCode::EmptyInput, "no predictions to evaluate");
  double sq = 0.0, abs = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double e = predicted[i] - actual[i];
    sq += e * e;
    abs += std::abs(e);
  }
  RegressionMetrics m;
  m.n = predicted.size();
  const auto n = static_cast<double>(m.n);
  m.mse = sq / n;
  m.rmse = std::sqrt(m.mse);
  m.mae = abs / n;
  m.mae_pct = m.mae / kScoreRange;
  return m;
}

ClassificationReport compute_classification_metrics(std::span<const int> predicted, std::span<const int> actual,
                                                     int n_classes) {
  if (predicted.size() != actual.size()) throw Error(ErrorCode::LengthMismatch, "prediction and label counts differ");
  if (n_classes < 1) throw Error(ErrorCode::InvalidConfig, "n_classes must be >= 1");
  const auto k = static_cast<std::size_t>(n_classes);
  ClassificationReport r;
  r.n_classes = n_classes;
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] < 0 || predicted[i] >= n_classes || actual[i] < 0 || actual[i] >= n_classes) {
      throw Error(ErrorCode::LabelOutOfRange, "label outside [0, " + std::to_string(n_classes) + ") at position " +
                                                  std::to_string(i));
    }
    ++r.confusion[static_cast<std::size_t>(actual[i])][static_cast<std::size_t>(predicted[i])];
  }

  r.support.assign(k, 0);
  r.precision.assign(k, 0.0);
  r.recall.assign(k, 0.0);
  std::size_t correct = 0, with_support = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t predicted_as_c = 0;
    for (std::size_t a = 0; a < k; ++a) {
      r.support[c] += r.confusion[c][a];
      predicted_as_c += r.confusion[a][c];
    }
    const std::size_t tp = r.confusion[c][c];
    correct += tp;
    if (predicted_as_c > 0) {
      r.precision[c] = static_cast<double>(tp) / static_cast<double>(predicted_as_c);
    } else {
      r.undefined_precision.push_back(static_cast<int>(c));
    }
    if (r.support[c] > 0) {
      r.recall[c] = static_cast<double>(tp) / static_cast<double>(r.support[c]);
      r.macro_precision += r.precision[c];
      r.macro_recall += r.recall[c];
      ++with_support;
    } else {
      r.undefined_recall.push_back(static_cast<int>(c));
    }
  }
  if (with_support > 0) {
    r.macro_precision /= static_cast<double>(with_support);
    r.macro_recall /= static_cast<double>(with_support);
  }
  if (!predicted.empty()) r.accuracy = static_cast<double>(correct) / static_cast<double>(predicted.size());
  return r;
}

namespace {

void check_compatible(const TrainedModel& model, const FeatureMatrix& test) {
  if (!(model.space == test.space) || model.mode != test.mode || model.taxonomy != test.taxonomy) {
    throw Error(ErrorCode::FeatureSpaceMismatch, "test matrix was not built with the model's feature space");
  }
  if (test.empty()) throw Error(ErrorCode::EmptyInput, "empty test set");
}

}  // namespace

RegressionReport evaluate(const TrainedModel& model, const FeatureMatrix& test) {
  check_compatible(model, test);
  std::vector<double> predicted;
  predicted.reserve(test.size());
  for (const auto& row : test.rows) predicted.push_back(predict(model, row.features));
  return {model.trait, std::string(to_string(model.kind())),
          compute_regression_metrics(predicted, test.targets(model.trait))};
}

ClassificationReport evaluate_classifier(const TrainedModel& model, const FeatureMatrix& test) {
  check_compatible(model, test);
  const auto* forest = std::get_if<ForestClassifier>(&model.model);
  if (!forest) throw Error(ErrorCode::InvalidConfig, "classification metrics need a forest model");
  std::vector<int> predicted, actual;
  for (const auto& row : test.rows) {
    predicted.push_back(forest->predict_class(row.features));
    actual.push_back(score_class(row.scores[model.trait], forest->config.n_classes));
  }
  return compute_classification_metrics(predicted, actual, forest->config.n_classes);
}

nlohmann::json to_json(const RegressionReport& r) {
  return {{"trait", std::string(trait_name(r.trait))},
          {"algorithm", r.algorithm},
          {"n_test", r.metrics.n},
          {"mse", r.metrics.mse},
          {"rmse", r.metrics.rmse},
          {"mae", r.metrics.mae},
          {"mae_pct", r.metrics.mae_pct}};
}

nlohmann::json to_json(const ClassificationReport& r) {
  return {{"n_classes", r.n_classes},
          {"confusion", r.confusion},
          {"support", r.support},
          {"precision", r.precision},
          {"recall", r.recall},
          {"undefined_precision", r.undefined_precision},
          {"undefined_recall", r.undefined_recall},
          {"macro_precision", r.macro_precision},
          {"macro_recall", r.macro_recall},
          {"accuracy", r.accuracy}};
}

std::string regression_csv_header() { return "trait,algorithm,n_test,mse,rmse,mae_pct"; }

std::string to_csv_row(const RegressionReport& r) {
  return std::string(trait_name(r.trait)) + "," + r.algorithm + "," + std::to_string(r.metrics.n) + "," +
         csv::format_double(r.metrics.mse) + "," + csv::format_double(r.metrics.rmse) + "," +
         csv::format_double(r.metrics.mae_pct);
}

}  // namespace likecat
