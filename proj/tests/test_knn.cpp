#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "likecat/models/knn.hpp"
#include "test_util.hpp"

using namespace likecat;
using likecat::testing::error_code_of;

TEST_CASE("distance examples") {
  const std::vector<double> a{1.0, 0.0}, b{0.0, 1.0};
  CHECK(knn_distance(a, a, 0.5) == 0.0);
  CHECK(knn_distance(a, b, 0.5) == doctest::Approx(std::sqrt(2.0) + 1.0).epsilon(1e-12));
  CHECK(knn_distance(a, b, 0.5) == doctest::Approx(2.41421).epsilon(1e-5));
  CHECK(knn_distance(a, b, 0.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(error_code_of([] { knn_distance(std::vector<double>{1.0}, std::vector<double>{1.0, 0.0}, 0.1); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("support and penalty count the symmetric difference") {
  const std::vector<double> a{0.5, 0.5, 0.0, 0.0}, b{0.0, 0.5, 0.5, 0.0};
  CHECK(support_of(a) == std::vector<std::uint32_t>{0, 1});
  const double plain = std::sqrt(0.25 + 0.25);
  CHECK(knn_distance(a, b, 0.3) == doctest::Approx(plain + 0.3 * 2));
}

TEST_CASE("distance is symmetric and non-negative") {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> a(8), b(8);
    for (auto& v : a) v = rng.below(2) ? rng.uniform() : 0.0;
    for (auto& v : b) v = rng.below(2) ? rng.uniform() : 0.0;
    const double lambda = rng.uniform();
    CHECK(knn_distance(a, b, lambda) == knn_distance(b, a, lambda));
    CHECK(knn_distance(a, b, lambda) >= 0.0);
    CHECK(knn_distance(a, a, lambda) == 0.0);
  }
}

TEST_CASE("k bounds") {
  const auto m = testing::random_matrix(6, 2, 1);
  CHECK_NOTHROW(fit_knn(m, Trait::Openness, KnnConfig{6, 0.1}));
  CHECK(error_code_of([&] { fit_knn(m, Trait::Openness, KnnConfig{7, 0.1}); }) == ErrorCode::KTooLarge);
  KnnConfig zero{0, 0.1};
  CHECK(error_code_of([&] { zero.validate(); }) == ErrorCode::InvalidConfig);
  CHECK(KnnConfig{}.k == 12);
}

TEST_CASE("k=1 returns a training row's own target") {
  const auto m = testing::random_matrix(50, 4, 8);
  const auto model = fit_knn(m, Trait::Openness, KnnConfig{1, 0.1});
  for (const auto& r : m.rows) CHECK(model.raw_predict(r.features) == r.scores[Trait::Openness]);
}

TEST_CASE("prediction is the mean of the k nearest, ties to the lower index") {
  const std::vector<FeatureVector> rows{{0.0}, {1.0}, {1.0}, {3.0}};
  const std::vector<double> y{1.0, 2.0, 4.0, 5.0};
  const auto k1 = fit_knn(rows, y, KnnConfig{1, 0.0});
  CHECK(k1.raw_predict(std::vector<double>{1.0}) == 2.0);
  const auto k2 = fit_knn(rows, y, KnnConfig{2, 0.0});
  CHECK(k2.raw_predict(std::vector<double>{1.1}) == 3.0);
  const auto k3 = fit_knn(rows, y, KnnConfig{3, 0.0});
  CHECK(k3.raw_predict(std::vector<double>{0.2}) == doctest::Approx(7.0 / 3.0));
}

TEST_CASE("brute-force oracle agrees on random data") {
  Rng rng(12);
  const auto m = testing::random_matrix(120, 5, 33);
  const auto y = m.targets(Trait::Openness);
  const KnnConfig cfg{7, 0.2};
  const auto model = fit_knn(m, Trait::Openness, cfg);
  for (int q = 0; q < 30; ++q) {
    std::vector<double> x(5);
    for (auto& v : x) v = rng.below(3) ? rng.uniform() : 0.0;
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t i = 0; i < m.size(); ++i) {
      double sq = 0.0;
      int diff = 0;
      for (std::size_t j = 0; j < 5; ++j) {
        sq += (x[j] - m.rows[i].features[j]) * (x[j] - m.rows[i].features[j]);
        diff += (x[j] > 0.0) != (m.rows[i].features[j] > 0.0);
      }
      d.emplace_back(std::sqrt(sq) + cfg.penalty * diff, i);
    }
    std::sort(d.begin(), d.end());
    double mean = 0.0;
    for (int i = 0; i < cfg.k; ++i) mean += y[d[static_cast<std::size_t>(i)].second];
    CHECK(model.raw_predict(x) == doctest::Approx(mean / cfg.k).epsilon(1e-12));
  }
}
