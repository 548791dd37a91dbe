#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "likecat/core.hpp"
#include "likecat/features.hpp"
#include "likecat/models/boosted_trees.hpp"
#include "likecat/models/forest.hpp"
#include "likecat/models/knn.hpp"
#include "likecat/models/linear.hpp"
#include "likecat/models/mlp.hpp"

namespace likecat {

enum class ModelKind { Linear, BoostedTrees, Knn, Mlp, Forest };

/// Names used in configs, CLI flags and model files: linear, boosted_trees,
/// knn, mlp, forest.
std::string_view to_string(ModelKind kind);
/// Throws InvalidConfig on an unknown name.
ModelKind parse_model_kind(std::string_view name);

struct LinearConfig {};

using AlgorithmConfig = std::variant<LinearConfig, BoostedTreesConfig, KnnConfig, MlpConfig, ForestConfig>;

/// Default hyperparameters for a kind.
AlgorithmConfig default_config(ModelKind kind);
ModelKind kind_of(const AlgorithmConfig& config);
/// Applies a seed to the kinds that consume randomness.
AlgorithmConfig with_seed(AlgorithmConfig config, std::uint64_t seed);

/// A fitted model together with everything needed to featurize new users.
struct TrainedModel {
  Trait trait = Trait::Openness;
  FeatureSpace space;
  FeatureMode mode = FeatureMode::Relative;
  Taxonomy taxonomy = Taxonomy::Both;
  std::variant<LinearModel, BoostedTreesModel, KnnModel, MlpModel, ForestClassifier> model;

  ModelKind kind() const { return static_cast<ModelKind>(model.index()); }
  bool is_regressor() const { return kind() != ModelKind::Forest; }
};

TrainedModel fit_model(const FeatureMatrix& train, Trait trait, const AlgorithmConfig& config);

/// Unclamped output. For a forest this is the midpoint of the voted class bin.
double raw_predict(const TrainedModel& model, std::span<const double> features);

/// Model output clamped to [1,5]; the same rule for every kind.
/// Throws DimensionMismatch.
double predict(const TrainedModel& model, std::span<const double> features);

/// Featurizes raw category counts with the model's space (unknown categories
/// dropped) and predicts. Throws ZeroTotal when no known category remains.
double predict_counts(const TrainedModel& model, const CategoryCounts& counts);

/// Voted class of a forest model. Throws InvalidConfig for regressors.
int predict_class(const TrainedModel& model, std::span<const double> features);

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON document {format_version, kind, trait, feature_space,
/// features, hyperparameters, parameters}. Doubles are written in shortest
/// round-trip form, so a reloaded model predicts bit-identically.
void save_model(std::ostream& out, const TrainedModel& model);
/// Throws UnsupportedVersion or CorruptDocument.
TrainedModel load_model(std::istream& in);

/// A `kind: "bundle"` document holding one model per trait.
void save_bundle(std::ostream& out, std::span<const TrainedModel> models);
/// Reads either a single model or a bundle.
std::vector<TrainedModel> load_models(std::istream& in);

}  // namespace likecat
