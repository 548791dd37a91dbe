#include <istream>
#include <ostream>
#include <set>

#include "likecat/error.hpp"
#include "likecat/json_io.hpp"

namespace likecat {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Reads an optional key into `field`, rejecting a value of the wrong type.
template <typename T>
void read_key(const json& doc, const char* key, T& field, std::set<std::string>& seen) {
  auto it = doc.find(key);
  seen.insert(key);
  if (it == doc.end()) return;
  try {
    field = it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidConfig, std::string("hyperparameter '") + key + "' has the wrong type");
  }
}

void reject_unknown(const json& doc, const std::set<std::string>& seen) {
  for (const auto& [key, value] : doc.items()) {
    if (key != "name" && !seen.contains(key)) throw Error(ErrorCode::InvalidConfig, "unknown hyperparameter '" + key + "'");
  }
}

json tree_nodes_to_json(const RegressionTree& tree) {
  json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
       value = json::array();
  for (const auto& n : tree.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
}

json tree_nodes_to_json(const ClassificationTree& tree) {
  json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
       label = json::array();
  for (const auto& n : tree.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    label.push_back(n.label);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"label", label}};
}

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::CorruptDocument, what); }

// Checks child links point forward and inside the node array, so traversal terminates.
template <typename Node>
void check_tree(const std::vector<Node>& nodes, std::size_t dimension) {
  if (nodes.empty()) corrupt("tree without nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.feature < 0) continue;
    if (static_cast<std::size_t>(n.feature) >= dimension) corrupt("split feature out of range");
    for (int child : {n.left, n.right}) {
      if (child <= static_cast<int>(i) || static_cast<std::size_t>(child) >= nodes.size()) corrupt("bad child link");
    }
  }
}

RegressionTree regression_tree_from_json(const json& doc, std::size_t dimension) {
  const auto feature = doc.at("feature").get<std::vector<int>>();
  const auto threshold = doc.at("threshold").get<std::vector<double>>();
  const auto left = doc.at("left").get<std::vector<int>>();
  const auto right = doc.at("right").get<std::vector<int>>();
  const auto value = doc.at("value").get<std::vector<double>>();
  const auto n = feature.size();
  if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n) corrupt("ragged tree arrays");
  RegressionTree tree;
  for (std::size_t i = 0; i < n; ++i) tree.nodes.push_back({feature[i], threshold[i], left[i], right[i], value[i]});
  check_tree(tree.nodes, dimension);
  return tree;
}

ClassificationTree classification_tree_from_json(const json& doc, std::size_t dimension, int n_classes) {
  const auto feature = doc.at("feature").get<std::vector<int>>();
  const auto threshold = doc.at("threshold").get<std::vector<double>>();
  const auto left = doc.at("left").get<std::vector<int>>();
  const auto right = doc.at("right").get<std::vector<int>>();
  const auto label = doc.at("label").get<std::vector<int>>();
  const auto n = feature.size();
  if (threshold.size() != n || left.size() != n || right.size() != n || label.size() != n) corrupt("ragged tree arrays");
  ClassificationTree tree;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] < 0 || label[i] >= n_classes) corrupt("leaf label out of range");
    tree.nodes.push_back({feature[i], threshold[i], left[i], right[i], label[i]});
  }
  check_tree(tree.nodes, dimension);
  return tree;
}

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) corrupt(std::string(what) + " has length " + std::to_string(got) + ", expected " + std::to_string(want));
}

}  // namespace

json algorithm_config_to_json(const AlgorithmConfig& config) {
  json doc = {{"name", std::string(to_string(kind_of(config)))}};
  std::visit(Overloaded{
                 [&](const LinearConfig&) {},
                 [&](const BoostedTreesConfig& c) {
                   doc["n_rounds"] = c.n_rounds;
                   doc["learning_rate"] = c.learning_rate;
                   doc["max_depth"] = c.max_depth;
                   doc["min_leaf"] = c.min_leaf;
                 },
                 [&](const KnnConfig& c) {
                   doc["k"] = c.k;
                   doc["penalty"] = c.penalty;
                 },
                 [&](const MlpConfig& c) {
                   doc["hidden_width"] = c.hidden_width;
                   doc["epochs"] = c.epochs;
                   doc["step"] = c.step;
                   doc["batch"] = c.batch;
                   doc["seed"] = c.seed;
                 },
                 [&](const ForestConfig& c) {
                   doc["n_trees"] = c.n_trees;
                   doc["n_classes"] = c.n_classes;
                   doc["max_depth"] = c.max_depth;
                   doc["min_leaf"] = c.min_leaf;
                   doc["bootstrap"] = c.bootstrap;
                   doc["feature_subsample"] = c.feature_subsample;
                   doc["seed"] = c.seed;
                 },
             },
             config);
  return doc;
}

AlgorithmConfig algorithm_config_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("name") || !doc["name"].is_string()) {
    throw Error(ErrorCode::InvalidConfig, "algorithm entry needs a string 'name'");
  }
  AlgorithmConfig config = default_config(parse_model_kind(doc["name"].get<std::string>()));
  std::set<std::string> seen;
  std::visit(Overloaded{
                 [&](LinearConfig&) {},
                 [&](BoostedTreesConfig& c) {
                   read_key(doc, "n_rounds", c.n_rounds, seen);
                   read_key(doc, "learning_rate", c.learning_rate, seen);
                   read_key(doc, "max_depth", c.max_depth, seen);
                   read_key(doc, "min_leaf", c.min_leaf, seen);
                   c.validate();
                 },
                 [&](KnnConfig& c) {
                   read_key(doc, "k", c.k, seen);
                   read_key(doc, "penalty", c.penalty, seen);
                   c.validate();
                 },
                 [&](MlpConfig& c) {
                   read_key(doc, "hidden_width", c.hidden_width, seen);
                   read_key(doc, "epochs", c.epochs, seen);
                   read_key(doc, "step", c.step, seen);
                   read_key(doc, "batch", c.batch, seen);
                   read_key(doc, "seed", c.seed, seen);
                   c.validate();
                 },
                 [&](ForestConfig& c) {
                   read_key(doc, "n_trees", c.n_trees, seen);
                   read_key(doc, "n_classes", c.n_classes, seen);
                   read_key(doc, "max_depth", c.max_depth, seen);
                   read_key(doc, "min_leaf", c.min_leaf, seen);
                   read_key(doc, "bootstrap", c.bootstrap, seen);
                   read_key(doc, "feature_subsample", c.feature_subsample, seen);
                   read_key(doc, "seed", c.seed, seen);
                   c.validate();
                 },
             },
             config);
  reject_unknown(doc, seen);
  return config;
}

json model_to_json(const TrainedModel& model) {
  json space = json::array();
  for (const auto& p : model.space.paths()) {
    space.push_back({{"category", p.category}, {"subcategory", p.subcategory ? json(*p.subcategory) : json(nullptr)}});
  }
  json doc = {
      {"format_version", kModelFormatVersion},
      {"kind", std::string(to_string(model.kind()))},
      {"trait", std::string(trait_name(model.trait))},
      {"feature_space", space},
      {"features", {{"mode", std::string(to_string(model.mode))}, {"taxonomy", std::string(to_string(model.taxonomy))}}},
  };
  json params;
  std::visit(Overloaded{
                 [&](const LinearModel& m) {
                   doc["hyperparameters"] = json::object();
                   params = {{"intercept", m.intercept}, {"coefficients", m.coefficients}, {"damped", m.damped}};
                 },
                 [&](const BoostedTreesModel& m) {
                   doc["hyperparameters"] = algorithm_config_to_json(m.config);
                   json trees = json::array();
                   for (const auto& t : m.trees) trees.push_back(tree_nodes_to_json(t));
                   params = {{"base_prediction", m.base_prediction}, {"dimension", m.dimension}, {"trees", trees}};
                 },
                 [&](const KnnModel& m) {
                   doc["hyperparameters"] = algorithm_config_to_json(m.config);
                   params = {{"rows", m.rows}, {"targets", m.targets}};
                 },
                 [&](const MlpModel& m) {
                   doc["hyperparameters"] = algorithm_config_to_json(m.config);
                   params = {{"input_dim", m.input_dim},
                             {"hidden_weights", m.hidden_weights},
                             {"hidden_bias", m.hidden_bias},
                             {"output_weights", m.output_weights},
                             {"output_bias", m.output_bias}};
                 },
                 [&](const ForestClassifier& m) {
                   doc["hyperparameters"] = algorithm_config_to_json(m.config);
                   json trees = json::array();
                   for (const auto& t : m.trees) trees.push_back(tree_nodes_to_json(t));
                   params = {{"dimension", m.dimension}, {"trees", trees}};
                 },
             },
             model.model);
  doc["hyperparameters"].erase("name");
  doc["parameters"] = params;
  return doc;
}

TrainedModel model_from_json(const json& doc) {
  if (!doc.is_object()) corrupt("model document is not a JSON object");
  if (!doc.contains("format_version") || !doc["format_version"].is_number_integer()) corrupt("missing format_version");
  if (const int version = doc["format_version"].get<int>(); version != kModelFormatVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "model format_version " + std::to_string(version) + " is not supported");
  }
  try {
    TrainedModel model;
    model.trait = parse_trait(doc.at("trait").get<std::string>());
    std::vector<CategoryPath> paths;
    for (const auto& p : doc.at("feature_space")) {
      std::optional<std::string> sub;
      if (!p.at("subcategory").is_null()) sub = p.at("subcategory").get<std::string>();
      paths.emplace_back(p.at("category").get<std::string>(), sub);
    }
    const std::size_t n_paths = paths.size();
    model.space = FeatureSpace(std::move(paths));
    if (model.space.dimension() != n_paths) corrupt("feature_space has duplicate entries");
    const std::size_t dim = model.space.dimension();
    model.mode = parse_feature_mode(doc.at("features").at("mode").get<std::string>());
    model.taxonomy = parse_taxonomy(doc.at("features").at("taxonomy").get<std::string>());

    const auto kind = parse_model_kind(doc.at("kind").get<std::string>());
    json hyper = doc.at("hyperparameters");
    hyper["name"] = std::string(to_string(kind));
    const AlgorithmConfig config = algorithm_config_from_json(hyper);
    const json& p = doc.at("parameters");

    switch (kind) {
      case ModelKind::Linear: {
        LinearModel m;
        m.intercept = p.at("intercept").get<double>();
        m.coefficients = p.at("coefficients").get<std::vector<double>>();
        m.damped = p.at("damped").get<bool>();
        require_size(m.coefficients.size(), dim, "coefficients");
        model.model = std::move(m);
        break;
      }
      case ModelKind::BoostedTrees: {
        BoostedTreesModel m;
        m.config = std::get<BoostedTreesConfig>(config);
        m.base_prediction = p.at("base_prediction").get<double>();
        m.dimension = p.at("dimension").get<std::size_t>();
        require_size(m.dimension, dim, "dimension");
        for (const auto& t : p.at("trees")) m.trees.push_back(regression_tree_from_json(t, dim));
        model.model = std::move(m);
        break;
      }
      case ModelKind::Knn: {
        const auto rows = p.at("rows").get<std::vector<FeatureVector>>();
        const auto targets = p.at("targets").get<std::vector<double>>();
        for (const auto& r : rows) require_size(r.size(), dim, "knn row");
        model.model = fit_knn(rows, targets, std::get<KnnConfig>(config));
        break;
      }
      case ModelKind::Mlp: {
        MlpModel m;
        m.config = std::get<MlpConfig>(config);
        m.input_dim = p.at("input_dim").get<std::size_t>();
        require_size(m.input_dim, dim, "input_dim");
        m.hidden_weights = p.at("hidden_weights").get<std::vector<double>>();
        m.hidden_bias = p.at("hidden_bias").get<std::vector<double>>();
        m.output_weights = p.at("output_weights").get<std::vector<double>>();
        m.output_bias = p.at("output_bias").get<double>();
        const auto h = static_cast<std::size_t>(m.config.hidden_width);
        require_size(m.hidden_bias.size(), h, "hidden_bias");
        require_size(m.output_weights.size(), h, "output_weights");
        require_size(m.hidden_weights.size(), h * dim, "hidden_weights");
        model.model = std::move(m);
        break;
      }
      case ModelKind::Forest: {
        ForestClassifier m;
        m.config = std::get<ForestConfig>(config);
        m.dimension = p.at("dimension").get<std::size_t>();
        require_size(m.dimension, dim, "dimension");
        for (const auto& t : p.at("trees")) m.trees.push_back(classification_tree_from_json(t, dim, m.config.n_classes));
        if (m.trees.empty()) corrupt("forest without trees");
        model.model = std::move(m);
        break;
      }
    }
    return model;
  } catch (const json::exception& e) {
    corrupt(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptDocument) throw;
    corrupt(e.what());
  }
}

void save_model(std::ostream& out, const TrainedModel& model) { out << model_to_json(model).dump(1) << '\n'; }

namespace {

json parse_document(std::istream& in) {
  json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) corrupt("model file is not valid JSON");
  return doc;
}

}  // namespace

TrainedModel load_model(std::istream& in) { return model_from_json(parse_document(in)); }

void save_bundle(std::ostream& out, std::span<const TrainedModel> models) {
  json list = json::array();
  for (const auto& m : models) list.push_back(model_to_json(m));
  json doc = {{"format_version", kModelFormatVersion}, {"kind", "bundle"}, {"models", list}};
  out << doc.dump(1) << '\n';
}

std::vector<TrainedModel> load_models(std::istream& in) {
  const json doc = parse_document(in);
  if (doc.is_object() && doc.value("kind", "") == "bundle") {
    if (!doc.contains("format_version") || !doc["format_version"].is_number_integer()) corrupt("missing format_version");
    if (doc["format_version"].get<int>() != kModelFormatVersion) {
      throw Error(ErrorCode::UnsupportedVersion, "bundle format_version is not supported");
    }
    if (!doc.contains("models") || !doc["models"].is_array() || doc["models"].empty()) corrupt("bundle lacks models");
    std::vector<TrainedModel> out;
    for (const auto& m : doc["models"]) out.push_back(model_from_json(m));
    return out;
  }
  return {model_from_json(doc)};
}

}  // namespace likecat
