#include "likecat/models/linear.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "likecat/error.hpp"

namespace likecat {

double LinearModel::raw_predict(std::span<const double> x) const {
  if (x.size() != coefficients.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(coefficients.size()) + " features, got " + std::to_string(x.size()));
  }
  double y = intercept;
  for (std::size_t j = 0; j < x.size(); ++j) y += coefficients[j] * x[j];
  return y;
}

namespace {

// Relative pivot size below which the Gram matrix is treated as singular.
constexpr double kSingularPivot = 1e-12;

bool is_singular(const Eigen::LDLT<Eigen::MatrixXd>& ldlt) {
  if (ldlt.info() != Eigen::Success) return true;
  const auto d = ldlt.vectorD();
  const double largest = d.cwiseAbs().maxCoeff();
  return largest == 0.0 || d.minCoeff() <= largest * kSingularPivot;
}

}  // namespace

LinearModel fit_least_squares(std::span<const FeatureVector> rows, std::span<const double> targets) {
  if (rows.empty()) throw Error(ErrorCode::DegenerateInput, "linear regression needs at least one row");
  if (rows.size() != targets.size()) throw Error(ErrorCode::LengthMismatch, "rows and targets differ in length");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(rows.front().size());

  // Design matrix with a leading column of ones for the intercept.
  Eigen::MatrixXd x(n, d + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != d) throw Error(ErrorCode::DimensionMismatch, "ragged feature rows");
    x(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) x(i, j + 1) = row[static_cast<std::size_t>(j)];
    y(i) = targets[static_cast<std::size_t>(i)];
  }

  Eigen::MatrixXd gram = x.transpose() * x;
  const Eigen::VectorXd moment = x.transpose() * y;

  LinearModel model;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (is_singular(ldlt)) {
    gram.diagonal().array() += kLinearDamping;
    ldlt.compute(gram);
    model.damped = true;
  }
  const Eigen::VectorXd theta = ldlt.solve(moment);
  if (!theta.allFinite()) throw Error(ErrorCode::DegenerateInput, "normal equations produced non-finite coefficients");

  model.intercept = theta(0);
  model.coefficients.assign(theta.data() + 1, theta.data() + theta.size());
  return model;
}

LinearModel fit_linear(const FeatureMatrix& train, Trait trait) {
  std::vector<FeatureVector> rows;
  rows.reserve(train.size());
  for (const auto& r : train.rows) rows.push_back(r.features);
  const auto y = train.targets(trait);
  if (rows.empty()) throw Error(ErrorCode::DegenerateInput, "linear regression needs at least one row");
  return fit_least_squares(rows, y);
}

}  // namespace likecat
