#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "likecat/core.hpp"

namespace likecat {

/// What the planted trait model is applied to.
enum class TargetBasis {
  /// The user's latent category-preference simplex (before likes are drawn).
  Latent,
  /// The realized like proportions, so scores are exactly linear in the features.
  Observed,
};

struct PlantedModel {
  std::array<double, 5> intercepts{};
  /// coefficients[trait][category]
  std::array<std::vector<double>, 5> coefficients;
};

struct SyntheticSpec {
  std::size_t n_users = 1000;
  std::size_t n_categories = 20;
  /// Like totals are log-uniform over [likes_min, likes_max].
  std::int64_t likes_min = 10;
  std::int64_t likes_max = 500;
  /// Symmetric Dirichlet concentration of the preference simplex.
  double concentration = 0.5;
  double noise_sigma = 0.0;
  /// When set, a user's noise is noise_sigma * sqrt(noise_reference_likes / total_likes).
  std::optional<double> noise_reference_likes;
  TargetBasis basis = TargetBasis::Latent;
  /// Half-width of the drawn coefficients around an intercept of 3.
  double coefficient_range = 1.5;
  /// Supplied planted model; drawn from the seed when absent.
  std::optional<PlantedModel> planted;
  std::uint64_t seed = 0;

  /// Throws InvalidSpec.
  void validate() const;
};

struct GroundTruth {
  PlantedModel planted;
  std::vector<CategoryPath> categories;
  /// Noise-free planted value per user and trait, in dataset order.
  std::vector<std::array<double, 5>> planted_values;
  /// RMSE of the clamped planted value against the stored score, per trait:
  /// the error floor of an oracle predictor.
  std::array<double, 5> oracle_rmse{};
  /// Delta-method standard error of each oracle_rmse.
  std::array<double, 5> oracle_rmse_se{};
};

struct SyntheticData {
  Dataset dataset;
  GroundTruth truth;
};

/// Per user: draw a like total, a preference simplex and multinomial like
/// counts; each trait is the planted affine map of the chosen basis plus
/// Gaussian noise, clamped to [1,5]. Deterministic in spec.seed.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Parses the `synthetic` config object; unknown keys raise InvalidSpec.
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& doc);
nlohmann::json synthetic_spec_to_json(const SyntheticSpec& spec);
nlohmann::json ground_truth_to_json(const GroundTruth& truth);

/// Writes big5.csv, user_likes.csv, like_categories.csv and ground_truth.json
/// into `dir` (created if needed). Reading the three tables back through the
/// ingest module reproduces data.dataset exactly.
void write_synthetic_tables(const SyntheticData& data, const SyntheticSpec& spec, const std::string& dir);

/// Page id used for the j-th like of a category in emitted tables.
std::string synthetic_like_id(std::size_t category, std::int64_t j);

}  // namespace likecat
