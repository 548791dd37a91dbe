#pragma once

#include <span>
#include <vector>

#include "likecat/core.hpp"
#include "likecat/features.hpp"

namespace likecat {

/// Affine predictor: intercept + sum_j coefficients[j] * x[j].
struct LinearModel {
  double intercept = 0.0;
  std::vector<double> coefficients;
  /// True when the Gram matrix was singular and the damped system was solved.
  bool damped = false;

  double raw_predict(std::span<const double> x) const;
};

/// Diagonal damping applied only when the Gram matrix is singular.
inline constexpr double kLinearDamping = 1e-8;

/// Ordinary least squares through the normal equations. Throws DegenerateInput
/// on zero rows.
LinearModel fit_linear(const FeatureMatrix& train, Trait trait);
LinearModel fit_least_squares(std::span<const FeatureVector> rows, std::span<const double> targets);

}  // namespace likecat
