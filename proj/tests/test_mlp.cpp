#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "likecat/models/mlp.hpp"
#include "test_util.hpp"

using namespace likecat;
using likecat::testing::error_code_of;

namespace {

double max_relative_gradient_error(MlpModel model, const std::vector<FeatureVector>& x, const std::vector<double>& y) {
  const double h = 1e-5;
  const auto analytic = mlp_gradient(model, x, y);
  auto p = model.parameters();
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + h;
    model.set_parameters(p);
    const double up = mlp_loss(model, x, y);
    p[i] = saved - h;
    model.set_parameters(p);
    const double down = mlp_loss(model, x, y);
    p[i] = saved;
    const double numeric = (up - down) / (2 * h);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  model.set_parameters(p);
  return worst;
}

}  // namespace

TEST_CASE("zero epochs leaves the initialization") {
  const auto m = testing::random_matrix(20, 3, 4);
  MlpConfig cfg;
  cfg.epochs = 0;
  cfg.seed = 9;
  const auto fitted = fit_mlp(m, Trait::Openness, cfg);
  const auto y = m.targets(Trait::Openness);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  const auto init = init_mlp(3, cfg, mean);
  CHECK(fitted.parameters() == init.parameters());
}

TEST_CASE("initialization bounds and shapes") {
  MlpConfig cfg;
  cfg.hidden_width = 10;
  cfg.seed = 3;
  const auto m = init_mlp(6, cfg, 2.5);
  CHECK(m.hidden_weights.size() == 60);
  CHECK(m.output_weights.size() == 10);
  const double hidden_limit = std::sqrt(6.0 / 16.0), out_limit = std::sqrt(6.0 / 11.0);
  for (double w : m.hidden_weights) CHECK(std::abs(w) <= hidden_limit);
  for (double w : m.output_weights) CHECK(std::abs(w) <= out_limit);
  CHECK(m.output_bias == 2.5);
  auto copy = m;
  copy.set_parameters(m.parameters());
  CHECK(copy.parameters() == m.parameters());
}

TEST_CASE("analytic gradient matches central differences") {
  Rng rng(5);
  std::vector<FeatureVector> x(3, FeatureVector(4));
  std::vector<double> y(3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (auto& v : x[i]) v = rng.uniform();
    y[i] = rng.uniform(1.0, 5.0);
  }
  for (int point = 0; point < 10; ++point) {
    MlpConfig cfg;
    cfg.hidden_width = 5;
    cfg.seed = static_cast<std::uint64_t>(point);
    auto model = init_mlp(4, cfg, 0.0);
    auto p = model.parameters();
    for (auto& v : p) v = rng.uniform(-1.0, 1.0);
    model.set_parameters(p);
    CHECK(max_relative_gradient_error(model, x, y) < 1e-4);
  }
}

TEST_CASE("training beats the mean predictor on a noiseless linear target") {
  Rng rng(6);
  std::vector<FeatureVector> x(400, FeatureVector(5));
  std::vector<double> y(400);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = 0.0;
    for (auto& v : x[i]) s += (v = rng.uniform());
    double t = 2.0;
    for (std::size_t j = 0; j < 5; ++j) t += (0.5 + 0.3 * static_cast<double>(j)) * x[i][j] / s;
    y[i] = t;
  }
  MlpConfig cfg;
  cfg.seed = 1;
  std::vector<double> trace;
  const auto model = fit_mlp(x, y, cfg, &trace);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double base = 0.0, fit = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    base += (y[i] - mean) * (y[i] - mean);
    fit += (y[i] - model.raw_predict(x[i])) * (y[i] - model.raw_predict(x[i]));
  }
  CHECK(fit < base);
  REQUIRE(trace.size() == 201);
  CHECK(mlp_loss(model, x, y) <= trace.front());
}

TEST_CASE("seeded training is reproducible") {
  const auto m = testing::random_matrix(60, 4, 2);
  MlpConfig cfg;
  cfg.epochs = 20;
  cfg.seed = 44;
  CHECK(fit_mlp(m, Trait::Openness, cfg).parameters() == fit_mlp(m, Trait::Openness, cfg).parameters());
}

TEST_CASE("empty input is rejected") {
  CHECK(error_code_of([] { fit_mlp(std::vector<FeatureVector>{}, std::vector<double>{}); }) ==
        ErrorCode::DegenerateInput);
}
