#include "likecat/models/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "likecat/error.hpp"

namespace likecat {

void KnnConfig::validate() const {
  if (k < 1) throw Error(ErrorCode::InvalidConfig, "k must be >= 1");
  if (!(penalty >= 0.0) || !std::isfinite(penalty)) throw Error(ErrorCode::InvalidConfig, "penalty must be >= 0");
}

std::vector<std::uint32_t> support_of(std::span<const double> x) {
  std::vector<std::uint32_t> s;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] > 0.0) s.push_back(static_cast<std::uint32_t>(j));
  }
  return s;
}

namespace {

std::size_t symmetric_difference_size(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return a.size() + b.size() - 2 * common;
}

}  // namespace

double knn_distance(std::span<const double> a, std::span<const std::uint32_t> support_a, std::span<const double> b,
                    std::span<const std::uint32_t> support_b, double penalty) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "vectors of length " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  double sq = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    sq += d * d;
  }
  return std::sqrt(sq) + penalty * static_cast<double>(symmetric_difference_size(support_a, support_b));
}

double knn_distance(std::span<const double> a, std::span<const double> b, double penalty) {
  return knn_distance(a, support_of(a), b, support_of(b), penalty);
}

double KnnModel::raw_predict(std::span<const double> x) const {
  if (x.size() != dimension()) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(dimension()) + " features, got " + std::to_string(x.size()));
  }
  const auto query_support = support_of(x);
  std::vector<std::pair<double, std::size_t>> dist(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    dist[i] = {knn_distance(x, query_support, rows[i], supports[i], config.penalty), i};
  }
  const auto k = static_cast<std::size_t>(config.k);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += targets[dist[i].second];
  return sum / static_cast<double>(k);
}

KnnModel fit_knn(std::span<const FeatureVector> rows, std::span<const double> targets, const KnnConfig& config) {
  config.validate();
  if (rows.size() != targets.size()) throw Error(ErrorCode::LengthMismatch, "rows and targets differ in length");
  if (static_cast<std::size_t>(config.k) > rows.size()) {
    throw Error(ErrorCode::KTooLarge,
                "k = " + std::to_string(config.k) + " exceeds " + std::to_string(rows.size()) + " training rows");
  }
  KnnModel model;
  model.config = config;
  model.rows.assign(rows.begin(), rows.end());
  model.targets.assign(targets.begin(), targets.end());
  model.supports.reserve(rows.size());
  for (const auto& r : model.rows) {
    if (r.size() != model.rows.front().size()) throw Error(ErrorCode::DimensionMismatch, "ragged feature rows");
    model.supports.push_back(support_of(r));
  }
  return model;
}

KnnModel fit_knn(const FeatureMatrix& train, Trait trait, const KnnConfig& config) {
  std::vector<FeatureVector> rows;
  rows.reserve(train.size());
  for (const auto& r : train.rows) rows.push_back(r.features);
  return fit_knn(rows, train.targets(trait), config);
}

}  // namespace likecat
