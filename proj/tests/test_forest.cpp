#include <doctest.h>

#include "likecat/models/forest.hpp"
#include "test_util.hpp"

using namespace likecat;
using likecat::testing::error_code_of;

TEST_CASE("class bins") {
  CHECK(score_class(3.0, 5) == 2);
  CHECK(score_class(1.0, 5) == 0);
  CHECK(score_class(1.8, 5) == 1);
  CHECK(score_class(5.0, 5) == 4);
  CHECK(score_class(4.2, 5) == 4);
  CHECK(class_midpoint(0, 5) == doctest::Approx(1.4));
  CHECK(class_midpoint(4, 5) == doctest::Approx(4.6));
}

TEST_CASE("single-class training data") {
  auto m = testing::random_matrix(30, 3, 1);
  for (auto& r : m.rows) r.scores = testing::uniform_scores(3.1);
  const auto f = fit_forest_classifier(m, Trait::Openness, ForestConfig{});
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x{rng.uniform(), rng.uniform(), rng.uniform()};
    CHECK(f.predict_class(x) == 2);
  }
}

TEST_CASE("one unrestricted tree memorizes distinct inputs") {
  const auto m = testing::random_matrix(80, 4, 3);
  ForestConfig cfg;
  cfg.n_trees = 1;
  cfg.bootstrap = false;
  cfg.feature_subsample = false;
  cfg.max_depth = 64;
  const auto f = fit_forest_classifier(m, Trait::Openness, cfg);
  for (const auto& r : m.rows) CHECK(f.predict_class(r.features) == score_class(r.scores[Trait::Openness], 5));
}

TEST_CASE("forests are deterministic for a seed") {
  const auto m = testing::random_matrix(100, 6, 4);
  ForestConfig cfg;
  cfg.n_trees = 10;
  cfg.seed = 17;
  const auto a = fit_forest_classifier(m, Trait::Openness, cfg);
  const auto b = fit_forest_classifier(m, Trait::Openness, cfg);
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(6);
    for (auto& v : x) v = rng.uniform();
    CHECK(a.predict_class(x) == b.predict_class(x));
  }
  for (const auto& t : a.trees)
    for (const auto& n : t.nodes)
      if (n.feature < 0) CHECK((n.label >= 0 && n.label < 5));
}

TEST_CASE("vote ties go to the lowest class") {
  ForestClassifier f;
  f.config.n_classes = 3;
  f.dimension = 1;
  ClassificationTree t2, t1;
  t2.nodes.push_back({-1, 0.0, -1, -1, 2});
  t1.nodes.push_back({-1, 0.0, -1, -1, 1});
  f.trees = {t2, t1};
  CHECK(f.predict_class(std::vector<double>{0.0}) == 1);
}

TEST_CASE("bad labels and empty input") {
  const std::vector<FeatureVector> x{{0.0}, {1.0}};
  const std::vector<int> labels{0, 5};
  CHECK(error_code_of([&] { fit_forest_classifier(x, labels); }) == ErrorCode::LabelOutOfRange);
  CHECK(error_code_of([] { fit_forest_classifier(std::vector<FeatureVector>{}, std::vector<int>{}); }) ==
        ErrorCode::DegenerateInput);
}
