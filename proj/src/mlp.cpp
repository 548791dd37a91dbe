#include "likecat/models/mlp.hpp"

#include <cmath>
#include <numeric>

#include "likecat/error.hpp"
#include "likecat/rng.hpp"

namespace likecat {

void MlpConfig::validate() const {
  if (hidden_width < 1) throw Error(ErrorCode::InvalidConfig, "hidden_width must be >= 1");
  if (epochs < 0) throw Error(ErrorCode::InvalidConfig, "epochs must be >= 0");
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidConfig, "step must be > 0");
  if (batch < 1) throw Error(ErrorCode::InvalidConfig, "batch must be >= 1");
}

namespace {

// Forward pass keeping the hidden pre-activations for backprop.
double forward(const MlpModel& m, std::span<const double> x, std::vector<double>& pre) {
  const std::size_t h = m.hidden_width();
  pre.resize(h);
  double out = m.output_bias;
  for (std::size_t u = 0; u < h; ++u) {
    const double* w = m.hidden_weights.data() + u * m.input_dim;
    double z = m.hidden_bias[u];
    for (std::size_t j = 0; j < m.input_dim; ++j) z += w[j] * x[j];
    pre[u] = z;
    if (z > 0.0) out += m.output_weights[u] * z;
  }
  return out;
}

// Accumulates d(loss)/d(params) for one sample into the flat gradient,
// scaled by `scale` (1/batch size).
void backward(const MlpModel& m, std::span<const double> x, const std::vector<double>& pre, double err, double scale,
              std::vector<double>& grad) {
  const std::size_t h = m.hidden_width();
  const std::size_t d = m.input_dim;
  double* g_w1 = grad.data();
  double* g_b1 = g_w1 + h * d;
  double* g_w2 = g_b1 + h;
  double* g_b2 = g_w2 + h;
  const double e = err * scale;
  *g_b2 += e;
  for (std::size_t u = 0; u < h; ++u) {
    if (pre[u] <= 0.0) continue;
    g_w2[u] += e * pre[u];
    const double dz = e * m.output_weights[u];
    g_b1[u] += dz;
    double* row = g_w1 + u * d;
    for (std::size_t j = 0; j < d; ++j) row[j] += dz * x[j];
  }
}

void check_inputs(const MlpModel& model, std::span<const FeatureVector> rows, std::span<const double> targets) {
  if (rows.size() != targets.size()) throw Error(ErrorCode::LengthMismatch, "rows and targets differ in length");
  if (rows.empty()) throw Error(ErrorCode::DegenerateInput, "neural network needs at least one row");
  for (const auto& r : rows) {
    if (r.size() != model.input_dim) throw Error(ErrorCode::DimensionMismatch, "feature row has wrong length");
  }
}

}  // namespace

double MlpModel::raw_predict(std::span<const double> x) const {
  if (x.size() != input_dim) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(input_dim) + " features, got " + std::to_string(x.size()));
  }
  std::vector<double> pre;
  return forward(*this, x, pre);
}

std::vector<double> MlpModel::parameters() const {
  std::vector<double> flat;
  flat.reserve(hidden_weights.size() + 2 * hidden_bias.size() + 1);
  flat.insert(flat.end(), hidden_weights.begin(), hidden_weights.end());
  flat.insert(flat.end(), hidden_bias.begin(), hidden_bias.end());
  flat.insert(flat.end(), output_weights.begin(), output_weights.end());
  flat.push_back(output_bias);
  return flat;
}

void MlpModel::set_parameters(std::span<const double> flat) {
  const std::size_t h = hidden_width();
  if (flat.size() != h * input_dim + 2 * h + 1) throw Error(ErrorCode::DimensionMismatch, "parameter vector has wrong length");
  auto it = flat.begin();
  std::copy_n(it, h * input_dim, hidden_weights.begin());
  it += static_cast<std::ptrdiff_t>(h * input_dim);
  std::copy_n(it, h, hidden_bias.begin());
  it += static_cast<std::ptrdiff_t>(h);
  std::copy_n(it, h, output_weights.begin());
  output_bias = flat.back();
}

MlpModel init_mlp(std::size_t input_dim, const MlpConfig& config, double output_bias) {
  config.validate();
  MlpModel m;
  m.config = config;
  m.input_dim = input_dim;
  const auto h = static_cast<std::size_t>(config.hidden_width);
  Rng rng(config.seed);
  const double hidden_limit = std::sqrt(6.0 / static_cast<double>(input_dim + h));
  const double output_limit = std::sqrt(6.0 / static_cast<double>(h + 1));
  m.hidden_weights.resize(h * input_dim);
  for (double& w : m.hidden_weights) w = rng.uniform(-hidden_limit, hidden_limit);
  m.hidden_bias.assign(h, 0.0);
  m.output_weights.resize(h);
  for (double& w : m.output_weights) w = rng.uniform(-output_limit, output_limit);
  m.output_bias = output_bias;
  return m;
}

double mlp_loss(const MlpModel& model, std::span<const FeatureVector> rows, std::span<const double> targets) {
  check_inputs(model, rows, targets);
  std::vector<double> pre;
  double acc = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double e = forward(model, rows[i], pre) - targets[i];
    acc += e * e;
  }
  return acc / (2.0 * static_cast<double>(rows.size()));
}

std::vector<double> mlp_gradient(const MlpModel& model, std::span<const FeatureVector> rows,
                                 std::span<const double> targets) {
  check_inputs(model, rows, targets);
  std::vector<double> grad(model.hidden_weights.size() + 2 * model.hidden_width() + 1, 0.0);
  std::vector<double> pre;
  const double scale = 1.0 / static_cast<double>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double err = forward(model, rows[i], pre) - targets[i];
    backward(model, rows[i], pre, err, scale, grad);
  }
  return grad;
}

MlpModel fit_mlp(std::span<const FeatureVector> rows, std::span<const double> targets, const MlpConfig& config,
                 std::vector<double>* loss_trace) {
  config.validate();
  if (rows.empty()) throw Error(ErrorCode::DegenerateInput, "neural network needs at least one row");
  const double mean = std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(targets.size());
  MlpModel model = init_mlp(rows.front().size(), config, mean);
  check_inputs(model, rows, targets);

  // Shuffling uses its own stream so it does not depend on the init draws.
  Rng rng(derive_seed(config.seed, 1));
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  auto params = model.parameters();
  std::vector<double> grad(params.size());
  std::vector<double> pre;
  MlpModel best = model;
  double best_loss = mlp_loss(model, rows, targets);
  if (loss_trace) loss_trace->assign(1, best_loss);

  const auto batch = static_cast<std::size_t>(config.batch);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      std::fill(grad.begin(), grad.end(), 0.0);
      const double scale = 1.0 / static_cast<double>(end - start);
      for (std::size_t b = start; b < end; ++b) {
        const auto i = order[b];
        const double err = forward(model, rows[i], pre) - targets[i];
        backward(model, rows[i], pre, err, scale, grad);
      }
      for (std::size_t p = 0; p < params.size(); ++p) params[p] -= config.step * grad[p];
      model.set_parameters(params);
    }
    const double loss = mlp_loss(model, rows, targets);
    if (loss < best_loss) {
      best_loss = loss;
      best = model;
    }
    if (loss_trace) loss_trace->push_back(best_loss);
  }
  return best;
}

MlpModel fit_mlp(const FeatureMatrix& train, Trait trait, const MlpConfig& config, std::vector<double>* loss_trace) {
  std::vector<FeatureVector> rows;
  rows.reserve(train.size());
  for (const auto& r : train.rows) rows.push_back(r.features);
  return fit_mlp(rows, train.targets(trait), config, loss_trace);
}

}  // namespace likecat
