#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "likecat/core.hpp"
#include "likecat/features.hpp"

namespace likecat {

struct MlpConfig {
  int hidden_width = 16;
  int epochs = 200;
  double step = 0.01;
  int batch = 32;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One rectifier hidden layer feeding a linear output unit.
struct MlpModel {
  MlpConfig config;
  std::size_t input_dim = 0;
  std::vector<double> hidden_weights;  // hidden_width x input_dim, row-major
  std::vector<double> hidden_bias;     // hidden_width
  std::vector<double> output_weights;  // hidden_width
  double output_bias = 0.0;

  std::size_t hidden_width() const { return hidden_bias.size(); }
  double raw_predict(std::span<const double> x) const;

  /// All parameters flattened as hidden_weights, hidden_bias, output_weights, output_bias.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);
};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero hidden bias,
/// output bias at `output_bias`.
MlpModel init_mlp(std::size_t input_dim, const MlpConfig& config, double output_bias);

/// Half mean squared error: 1/(2n) * sum (f(x_i) - y_i)^2.
double mlp_loss(const MlpModel& model, std::span<const FeatureVector> rows, std::span<const double> targets);

/// Analytic gradient of mlp_loss in the parameters() layout.
std::vector<double> mlp_gradient(const MlpModel& model, std::span<const FeatureVector> rows,
                                 std::span<const double> targets);

/// Mini-batch gradient descent with seeded shuffling. The returned parameters
/// are those with the lowest full training loss seen at an epoch boundary,
/// initialization included. `loss_trace` (optional) gets the initial loss and
/// the loss after every epoch.
MlpModel fit_mlp(const FeatureMatrix& train, Trait trait, const MlpConfig& config = {},
                 std::vector<double>* loss_trace = nullptr);
MlpModel fit_mlp(std::span<const FeatureVector> rows, std::span<const double> targets, const MlpConfig& config = {},
                 std::vector<double>* loss_trace = nullptr);

}  // namespace likecat
