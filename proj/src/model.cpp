#include "likecat/models/model.hpp"

#include "likecat/error.hpp"

namespace likecat {

namespace {

constexpr std::array<std::string_view, 5> kKindNames = {"linear", "boosted_trees", "knn", "mlp", "forest"};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string_view to_string(ModelKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

ModelKind parse_model_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<ModelKind>(i);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown algorithm '" + std::string(name) + "'");
}

AlgorithmConfig default_config(ModelKind kind) {
  switch (kind) {
    case ModelKind::Linear: return LinearConfig{};
    case ModelKind::BoostedTrees: return BoostedTreesConfig{};
    case ModelKind::Knn: return KnnConfig{};
    case ModelKind::Mlp: return MlpConfig{};
    case ModelKind::Forest: return ForestConfig{};
  }
  return LinearConfig{};
}

ModelKind kind_of(const AlgorithmConfig& config) { return static_cast<ModelKind>(config.index()); }

AlgorithmConfig with_seed(AlgorithmConfig config, std::uint64_t seed) {
  if (auto* mlp = std::get_if<MlpConfig>(&config)) mlp->seed = seed;
  if (auto* forest = std::get_if<ForestConfig>(&config)) forest->seed = seed;
  return config;
}

TrainedModel fit_model(const FeatureMatrix& train, Trait trait, const AlgorithmConfig& config) {
  TrainedModel out;
  out.trait = trait;
  out.space = train.space;
  out.mode = train.mode;
  out.taxonomy = train.taxonomy;
  std::visit(Overloaded{
                 [&](const LinearConfig&) { out.model = fit_linear(train, trait); },
                 [&](const BoostedTreesConfig& c) { out.model = fit_boosted_trees(train, trait, c); },
                 [&](const KnnConfig& c) { out.model = fit_knn(train, trait, c); },
                 [&](const MlpConfig& c) { out.model = fit_mlp(train, trait, c); },
                 [&](const ForestConfig& c) { out.model = fit_forest_classifier(train, trait, c); },
             },
             config);
  return out;
}

double raw_predict(const TrainedModel& model, std::span<const double> features) {
  if (features.size() != model.space.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(model.space.dimension()) +
                                                  " features, got " + std::to_string(features.size()));
  }
  return std::visit(Overloaded{
                        [&](const ForestClassifier& f) {
                          return class_midpoint(f.predict_class(features), f.config.n_classes);
                        },
                        [&](const auto& m) { return m.raw_predict(features); },
                    },
                    model.model);
}

double predict(const TrainedModel& model, std::span<const double> features) {
  return clamp_score(raw_predict(model, features));
}

double predict_counts(const TrainedModel& model, const CategoryCounts& counts) {
  const auto x = featurize_for_prediction(counts, model.space, model.mode, model.taxonomy);
  return predict(model, x);
}

int predict_class(const TrainedModel& model, std::span<const double> features) {
  const auto* forest = std::get_if<ForestClassifier>(&model.model);
  if (!forest) throw Error(ErrorCode::InvalidConfig, "class prediction needs a forest model");
  return forest->predict_class(features);
}

}  // namespace likecat
