#include <doctest.h>

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "likecat/features.hpp"
#include "likecat/ingest.hpp"
#include "likecat/synthetic.hpp"
#include "test_util.hpp"

using namespace likecat;
using likecat::testing::error_code_of;

TEST_CASE("noiseless observed-basis scores are the planted map of the realized proportions") {
  SyntheticSpec spec;
  spec.n_users = 100;
  spec.basis = TargetBasis::Observed;
  spec.seed = 3;
  spec.coefficient_range = 0.8;
  const auto data = generate_synthetic(spec);
  REQUIRE(data.dataset.size() == 100);
  const FeatureSpace space(data.truth.categories);
  for (std::size_t u = 0; u < data.dataset.size(); ++u) {
    const auto& user = data.dataset.users()[u];
    const auto x = normalize_counts(user.like_counts, space);
    for (Trait t : kAllTraits) {
      const auto ti = static_cast<std::size_t>(t);
      double v = data.truth.planted.intercepts[ti];
      for (std::size_t j = 0; j < x.size(); ++j) v += data.truth.planted.coefficients[ti][j] * x[j];
      CHECK(std::abs(clamp_score(v) - user.scores[t]) < 1e-12);
      CHECK(std::abs(data.truth.planted_values[u][ti] - v) < 1e-12);
    }
  }
  for (double r : data.truth.oracle_rmse) CHECK(r < 1e-12);
}

TEST_CASE("generation is deterministic in the seed") {
  SyntheticSpec spec;
  spec.n_users = 200;
  spec.noise_sigma = 0.3;
  spec.seed = 9;
  CHECK(generate_synthetic(spec).dataset == generate_synthetic(spec).dataset);
  auto other = spec;
  other.seed = 10;
  CHECK_FALSE(generate_synthetic(other).dataset == generate_synthetic(spec).dataset);
}

TEST_CASE("like totals and scores stay in range") {
  SyntheticSpec spec;
  spec.n_users = 500;
  spec.noise_sigma = 0.5;
  spec.seed = 4;
  const auto data = generate_synthetic(spec);
  for (const auto& u : data.dataset.users()) {
    CHECK(u.total_likes() >= spec.likes_min);
    CHECK(u.total_likes() <= spec.likes_max);
    for (double s : u.scores.values()) {
      CHECK(s >= 1.0);
      CHECK(s <= 5.0);
    }
  }
}

TEST_CASE("the reported oracle floor tracks sigma") {
  SyntheticSpec spec;
  spec.n_users = 5000;
  spec.noise_sigma = 0.2;
  spec.basis = TargetBasis::Observed;
  spec.seed = 12;
  const auto data = generate_synthetic(spec);
  for (std::size_t t = 0; t < 5; ++t) {
    CHECK(std::abs(data.truth.oracle_rmse[t] - 0.2) < 0.02);
    CHECK(data.truth.oracle_rmse_se[t] > 0.0);
    CHECK(data.truth.oracle_rmse_se[t] < 0.01);
    // Independent recomputation from the stored values.
    double sq = 0.0;
    for (std::size_t u = 0; u < data.dataset.size(); ++u) {
      const double e = clamp_score(data.truth.planted_values[u][t]) - data.dataset.users()[u].scores.values()[t];
      sq += e * e;
    }
    CHECK(std::sqrt(sq / static_cast<double>(data.dataset.size())) ==
          doctest::Approx(data.truth.oracle_rmse[t]).epsilon(1e-12));
  }
}

TEST_CASE("spec validation") {
  SyntheticSpec spec;
  spec.n_users = 1;
  CHECK(error_code_of([&] { spec.validate(); }) == ErrorCode::InvalidSpec);
  spec = {};
  spec.n_categories = 0;
  CHECK(error_code_of([&] { spec.validate(); }) == ErrorCode::InvalidSpec);
  spec = {};
  spec.noise_sigma = -1.0;
  CHECK(error_code_of([&] { spec.validate(); }) == ErrorCode::InvalidSpec);
  spec = {};
  spec.likes_min = 100;
  spec.likes_max = 10;
  CHECK(error_code_of([&] { spec.validate(); }) == ErrorCode::InvalidSpec);
  CHECK(error_code_of([] { synthetic_spec_from_json({{"n_user", 10}}); }) == ErrorCode::InvalidSpec);
}

TEST_CASE("spec JSON round-trip") {
  SyntheticSpec spec;
  spec.n_users = 30;
  spec.noise_sigma = 0.1;
  spec.noise_reference_likes = 100.0;
  spec.basis = TargetBasis::Observed;
  spec.seed = 5;
  const auto doc = synthetic_spec_to_json(spec);
  CHECK(synthetic_spec_to_json(synthetic_spec_from_json(doc)) == doc);

  nlohmann::json planted = nlohmann::json::object();
  for (Trait t : kAllTraits)
    planted[std::string(trait_name(t))] = {{"intercept", 2.0 + static_cast<double>(t)}, {"coefficients", {1.0, -1.0}}};
  const auto with_planted = synthetic_spec_from_json({{"n_users", 10}, {"n_categories", 2}, {"planted", planted}});
  REQUIRE(with_planted.planted.has_value());
  CHECK(with_planted.planted->intercepts[0] == 2.0);
  CHECK(with_planted.planted->intercepts[4] == 6.0);
  CHECK(with_planted.planted->coefficients[1] == std::vector<double>{1.0, -1.0});
  planted.erase("neu");
  CHECK(error_code_of([&] { synthetic_spec_from_json({{"n_users", 10}, {"n_categories", 2}, {"planted", planted}}); }) ==
        ErrorCode::InvalidSpec);
}

TEST_CASE("emitted tables reload into the same dataset") {
  testing::TempDir dir("synthetic");
  SyntheticSpec spec;
  spec.n_users = 150;
  spec.n_categories = 7;
  spec.noise_sigma = 0.4;
  spec.seed = 21;
  const auto data = generate_synthetic(spec);
  write_synthetic_tables(data, spec, dir.path().string());
  for (const char* f : {"big5.csv", "user_likes.csv", "like_categories.csv", "ground_truth.json"})
    CHECK(std::filesystem::exists(dir.path() / f));
  const auto [loaded, report] = load_dataset_dir(dir.path().string());
  CHECK(loaded == data.dataset);
  CHECK(report.likes_unresolved == 0);
  CHECK(report.orphan_likes == 0);

  std::ifstream truth(dir / "ground_truth.json");
  const auto j = nlohmann::json::parse(truth);
  CHECK(j.contains("oracle_rmse"));
  CHECK(j["rng"] == std::string(Rng::kIdentifier));
}
