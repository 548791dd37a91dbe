#include "likecat/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "likecat/error.hpp"
#include "likecat/eval.hpp"
#include "likecat/experiments.hpp"
#include "likecat/features.hpp"
#include "likecat/ingest.hpp"
#include "likecat/json_io.hpp"
#include "likecat/models/model.hpp"
#include "likecat/synthetic.hpp"

namespace likecat::cli {

namespace {

using nlohmann::json;

// Configuration files that fail to parse are usage errors, not data errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw UsageError(path + " is not valid JSON");
  return doc;
}

std::ofstream open_output(const std::string& path) {
  if (auto parent = std::filesystem::path(path).parent_path(); !parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  return out;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
      return kUsageError;
    case ErrorCode::TransportError:
      return kRuntimeError;
    default:
      return kDataError;
  }
}

struct GenerateArgs {
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  const auto doc = read_json_file(a.spec);
  auto spec = synthetic_spec_from_json(doc);
  if (a.seed) spec.seed = *a.seed;
  const auto data = generate_synthetic(spec);
  write_synthetic_tables(data, spec, a.out);
  err << "generated " << data.dataset.size() << " users into " << a.out << '\n';
  out << json{{"users", data.dataset.size()}, {"out", a.out}}.dump() << '\n';
  return kSuccess;
}

struct TrainArgs {
  std::string data;
  std::string algorithm;
  std::string trait = "ope";
  std::string config;
  std::string out;
  std::string report;
  std::optional<std::uint64_t> seed;
};

// Training config file: {"features": {...}, "hyperparameters": {...}}.
std::pair<FeatureOptions, AlgorithmConfig> training_config(const TrainArgs& a) {
  const auto kind = parse_model_kind(a.algorithm);
  FeatureOptions features;
  json hyper = json::object();
  if (!a.config.empty()) {
    const auto doc = read_json_file(a.config);
    if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "training config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
      if (key != "features" && key != "hyperparameters") {
        throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "' in training config");
      }
    }
    if (doc.contains("features")) {
      const auto& f = doc["features"];
      if (!f.is_object()) throw Error(ErrorCode::InvalidConfig, "'features' must be an object");
      for (const auto& [key, value] : f.items()) {
        if (key == "mode") {
          features.mode = parse_feature_mode(value.get<std::string>());
        } else if (key == "taxonomy") {
          features.taxonomy = parse_taxonomy(value.get<std::string>());
        } else if (key == "min_likes") {
          features.min_likes = value.get<std::int64_t>();
        } else {
          throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "' in features");
        }
      }
      if (features.min_likes < 1) throw Error(ErrorCode::InvalidConfig, "min_likes must be >= 1");
    }
    if (doc.contains("hyperparameters")) hyper = doc["hyperparameters"];
  }
  hyper["name"] = std::string(to_string(kind));
  auto config = algorithm_config_from_json(hyper);
  if (a.seed) config = with_seed(config, *a.seed);
  return {features, config};
}

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const auto [features, config] = training_config(a);
  std::vector<Trait> traits;
  if (a.trait == "all") {
    traits.assign(kAllTraits.begin(), kAllTraits.end());
  } else {
    traits.push_back(parse_trait(a.trait));
  }

  const auto dataset = load_dataset_dir(a.data).first;
  const auto filtered = filter_min_likes(dataset, features.min_likes);
  if (filtered.empty()) throw Error(ErrorCode::EmptyDataset, "no users left after min-likes filtering");
  const auto space = build_feature_space(filtered, features.taxonomy);
  const auto matrix = build_matrix(filtered, space, features.min_likes, features.mode, features.taxonomy);

  std::vector<TrainedModel> models;
  json report = json::array();
  for (Trait t : traits) {
    models.push_back(fit_model(matrix, t, config));
    const auto& model = models.back();
    json entry = {{"trait", std::string(trait_name(t))}, {"algorithm", std::string(to_string(model.kind()))},
                  {"n_train", matrix.size()}};
    if (model.is_regressor()) {
      const auto r = evaluate(model, matrix);
      entry["train_mse"] = r.metrics.mse;
      entry["train_rmse"] = r.metrics.rmse;
      entry["train_mae_pct"] = r.metrics.mae_pct;
    } else {
      entry["train_classification"] = to_json(evaluate_classifier(model, matrix));
    }
    report.push_back(entry);
  }

  {
    auto f = open_output(a.out);
    if (models.size() == 1) {
      save_model(f, models.front());
    } else {
      save_bundle(f, models);
    }
  }
  const json doc = {{"model", a.out}, {"training", report}};
  if (!a.report.empty()) {
    auto f = open_output(a.report);
    f << doc.dump(2) << '\n';
  }
  err << "trained " << models.size() << " model(s) on " << matrix.size() << " users\n";
  out << doc.dump(2) << '\n';
  return kSuccess;
}

struct PredictArgs {
  std::string model;
  std::string likes;
  std::string categories;
};

// Accepts a `likeid` table, or a `userid,likeid` table for a single user.
std::vector<std::string> read_like_list(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::istringstream in(std::string(std::istreambuf_iterator<char>(file), {}));
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  std::vector<std::string> ids;
  if (header == "userid,likeid") {
    in.seekg(0);
    for (auto& row : parse_user_likes_table(in)) ids.push_back(std::move(row.like_id));
    return ids;
  }
  if (header != "likeid") throw Error(ErrorCode::MalformedRow, "line 1: expected header 'likeid'");
  std::string line;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.find(',') != std::string::npos) {
      throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": expected a single likeid column");
    }
    ids.push_back(line);
  }
  return ids;
}

int cmd_predict(const PredictArgs& a, std::ostream& out, std::ostream& err) {
  std::ifstream model_in(a.model);
  if (!model_in) throw Error(ErrorCode::IoError, "cannot open " + a.model);
  const auto models = load_models(model_in);

  const auto ids = read_like_list(a.likes);
  std::ifstream cats(a.categories);
  if (!cats) throw Error(ErrorCode::IoError, "cannot open " + a.categories);
  auto resolver = FixtureResolver::from_stream(cats);
  auto [catmap, summary] = resolve_categories(ids, resolver);
  CategoryCounts counts;
  for (const auto& id : ids) {
    if (auto it = catmap.find(id); it != catmap.end()) ++counts[it->second];
  }
  if (counts.empty()) throw Error(ErrorCode::ZeroTotal, "none of the likes resolved to a category");

  json result = {{"ope", nullptr}, {"con", nullptr}, {"ext", nullptr}, {"agr", nullptr}, {"neu", nullptr}};
  for (const auto& m : models) result[std::string(trait_name(m.trait))] = predict_counts(m, counts);
  err << "resolved " << summary.ids_resolved << " of " << summary.ids_requested << " distinct likes\n";
  out << result.dump() << '\n';
  return kSuccess;
}

struct EvaluateArgs {
  std::string config;
  std::string out;
  std::string model;
  std::string data;
  std::optional<std::uint64_t> seed;
};

int run_experiment_command(const std::string& config_path, const std::string& out_dir,
                           std::optional<std::uint64_t> seed, bool comparison_only, std::ostream& out,
                           std::ostream& err) {
  auto doc = read_json_file(config_path);
  if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "experiment config must be a JSON object");
  if (seed) doc["seed"] = *seed;
  if (comparison_only && doc.contains("experiment") && doc["experiment"].value("type", "comparison") != "comparison") {
    throw Error(ErrorCode::InvalidConfig, "evaluate runs comparison configs; use `experiment` for sweeps");
  }
  const auto base = std::filesystem::path(config_path).parent_path().string();
  const auto result = run_experiment(doc, out_dir, base.empty() ? "." : base);
  for (const auto& f : result.files) err << "wrote " << f << '\n';
  out << json{{"files", result.files}}.dump() << '\n';
  return kSuccess;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  if (!a.config.empty()) {
    if (!a.model.empty() || !a.data.empty()) throw UsageError("use either --config or --model/--data");
    return run_experiment_command(a.config, a.out.empty() ? "." : a.out, a.seed, true, out, err);
  }
  if (a.model.empty() || a.data.empty()) throw UsageError("evaluate needs --config, or both --model and --data");

  std::ifstream model_in(a.model);
  if (!model_in) throw Error(ErrorCode::IoError, "cannot open " + a.model);
  const auto models = load_models(model_in);
  const auto dataset = load_dataset_dir(a.data).first;

  std::ostringstream csv;
  csv << regression_csv_header() << '\n';
  json reports = json::array();
  for (const auto& m : models) {
    const auto matrix = build_matrix_in_space(dataset, m.space, 1, m.mode, m.taxonomy);
    if (m.is_regressor()) {
      const auto r = evaluate(m, matrix);
      csv << to_csv_row(r) << '\n';
      reports.push_back(to_json(r));
    } else {
      auto c = to_json(evaluate_classifier(m, matrix));
      c["trait"] = std::string(trait_name(m.trait));
      reports.push_back(c);
    }
  }
  if (!a.out.empty()) {
    auto f = open_output(a.out);
    f << csv.str();
    err << "wrote " << a.out << '\n';
  }
  out << reports.dump(2) << '\n';
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Predict Big Five trait scores from page-like categories", "likecat"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset (three CSV tables + ground truth)");
  generate->add_option("--spec", gen.spec, "Synthetic spec JSON file")->required();
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_option("--seed", gen.seed, "Override the spec seed");

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Fit a model on a dataset directory");
  train->add_option("--data", tr.data, "Directory with big5.csv, user_likes.csv, like_categories.csv")->required();
  train->add_option("--algorithm", tr.algorithm, "linear | boosted_trees | knn | mlp | forest")->required();
  train->add_option("--trait", tr.trait, "ope | con | ext | agr | neu | all")->capture_default_str();
  train->add_option("--config", tr.config, "Training config JSON {features, hyperparameters}");
  train->add_option("--out", tr.out, "Model file (.model.json)")->required();
  train->add_option("--report", tr.report, "Also write the training report here");
  train->add_option("--seed", tr.seed, "Seed for randomized learners");

  PredictArgs pr;
  auto* predict_cmd = app.add_subcommand("predict", "Predict trait scores for one list of likes");
  predict_cmd->add_option("--model", pr.model, "Model or bundle file")->required();
  predict_cmd->add_option("--likes", pr.likes, "CSV with header likeid")->required();
  predict_cmd->add_option("--categories", pr.categories, "likeid,category,subcategory table")->required();

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate a model on data, or run a comparison config");
  evaluate_cmd->add_option("--config", ev.config, "Comparison experiment config JSON");
  evaluate_cmd->add_option("--out", ev.out, "Output directory (--config) or report CSV (--model)");
  evaluate_cmd->add_option("--model", ev.model, "Model or bundle file");
  evaluate_cmd->add_option("--data", ev.data, "Dataset directory");
  evaluate_cmd->add_option("--seed", ev.seed, "Override the config seed");

  EvaluateArgs ex;
  auto* experiment = app.add_subcommand("experiment", "Run a comparison or min-likes sweep experiment");
  experiment->add_option("--config", ex.config, "Experiment config JSON")->required();
  experiment->add_option("--out", ex.out, "Output directory")->default_str(".");
  experiment->add_option("--seed", ex.seed, "Override the config seed");

  try {
    std::vector<std::string> reversed(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(reversed.begin(), reversed.end());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, out, err);
    if (train->parsed()) return cmd_train(tr, out, err);
    if (predict_cmd->parsed()) return cmd_predict(pr, out, err);
    if (evaluate_cmd->parsed()) return cmd_evaluate(ev, out, err);
    if (experiment->parsed()) {
      return run_experiment_command(ex.config, ex.out.empty() ? "." : ex.out, ex.seed, false, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    err << "error: bad configuration value: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace likecat::cli
