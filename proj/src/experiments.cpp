#include "likecat/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "csv.hpp"
#include "likecat/error.hpp"
#include "likecat/ingest.hpp"
#include "likecat/json_io.hpp"
#include "likecat/rng.hpp"

namespace likecat {

namespace {

// Seed stream for the model of (trait, algorithm position).
std::uint64_t model_seed(std::uint64_t master, Trait trait, std::size_t algorithm) {
  return derive_seed(master, 1000 + 100 * static_cast<std::uint64_t>(trait) + algorithm);
}

FeatureMatrix matrix_for(const Dataset& dataset, std::int64_t threshold, const FeatureOptions& opts) {
  const auto filtered = filter_min_likes(dataset, threshold);
  if (filtered.empty()) return FeatureMatrix{FeatureSpace{}, opts.mode, opts.taxonomy, {}};
  const auto space = build_feature_space(filtered, opts.taxonomy);
  return build_matrix(filtered, space, threshold, opts.mode, opts.taxonomy);
}

std::vector<std::string> ids_of(const FeatureMatrix& m) {
  std::vector<std::string> ids;
  ids.reserve(m.size());
  for (const auto& r : m.rows) ids.push_back(r.user_id);
  return ids;
}

}  // namespace

ComparisonResult run_comparison(const Dataset& dataset, const ComparisonSettings& settings) {
  settings.split.validate();
  const auto matrix = matrix_for(dataset, settings.features.min_likes, settings.features);
  if (matrix.size() < 2) {
    throw Error(ErrorCode::TooFewRows, "comparison needs at least 2 users after min-likes filtering, got " +
                                           std::to_string(matrix.size()));
  }
  ComparisonResult result;
  for (Trait trait : settings.traits) {
    SplitSpec spec = settings.split;
    spec.strat_trait = trait;
    const auto parts = split(matrix, spec);
    result.splits.emplace_back(ids_of(parts.train), ids_of(parts.test));
    for (std::size_t a = 0; a < settings.algorithms.size(); ++a) {
      const auto config = with_seed(settings.algorithms[a], model_seed(settings.split.seed, trait, a));
      const auto model = fit_model(parts.train, trait, config);
      if (model.is_regressor()) {
        result.reports.push_back(evaluate(model, parts.test));
      } else {
        result.classification.push_back({trait, evaluate_classifier(model, parts.test)});
      }
    }
  }
  return result;
}

SweepResult run_threshold_sweep(const Dataset& dataset, const SweepSettings& settings) {
  const auto& base = settings.base;
  base.split.validate();
  if (settings.thresholds.empty()) throw Error(ErrorCode::InvalidConfig, "sweep needs at least one threshold");
  if (!std::is_sorted(settings.thresholds.begin(), settings.thresholds.end()) ||
      std::adjacent_find(settings.thresholds.begin(), settings.thresholds.end()) != settings.thresholds.end()) {
    throw Error(ErrorCode::InvalidConfig, "sweep thresholds must be strictly ascending");
  }
  if (settings.thresholds.front() < 0) throw Error(ErrorCode::InvalidConfig, "sweep thresholds must be >= 0");
  if (settings.mode == SweepMode::FixedTrain && settings.train_size == 0) {
    throw Error(ErrorCode::InvalidConfig, "fixed_train sweeps need train_size >= 1");
  }

  SweepResult result;
  for (std::int64_t threshold : settings.thresholds) {
    const auto matrix = matrix_for(dataset, std::max(threshold, base.features.min_likes), base.features);
    for (Trait trait : base.traits) {
      std::optional<Split> parts;
      std::string why;
      try {
        SplitSpec spec = base.split;
        spec.strat_trait = trait;
        parts = settings.mode == SweepMode::MaxTrain
                    ? split(matrix, spec)
                    : sample_fixed_train(matrix, settings.train_size, spec.test_fraction, spec.seed);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TooFewRows && e.code() != ErrorCode::InsufficientRows) throw;
        why = e.what();
      }
      for (std::size_t a = 0; a < base.algorithms.size(); ++a) {
        SweepRow row;
        row.threshold = threshold;
        row.trait = trait;
        row.algorithm = std::string(to_string(kind_of(base.algorithms[a])));
        if (parts) {
          row.n_train = parts->train.size();
          row.n_test = parts->test.size();
        }
        if (!parts) {
          row.skipped = true;
          row.skip_reason = why;
        } else if (parts->test.empty()) {
          row.skipped = true;
          row.skip_reason = "empty test set";
        } else {
          try {
            const auto config = with_seed(base.algorithms[a], model_seed(base.split.seed, trait, a));
            const auto model = fit_model(parts->train, trait, config);
            if (!model.is_regressor()) throw Error(ErrorCode::InvalidConfig, "sweeps take regressors only");
            const auto report = evaluate(model, parts->test);
            row.rmse = report.metrics.rmse;
            row.mae_pct = report.metrics.mae_pct;
          } catch (const Error& e) {
            if (e.code() != ErrorCode::KTooLarge && e.code() != ErrorCode::DegenerateInput) throw;
            row.skipped = true;
            row.skip_reason = e.what();
          }
        }
        result.rows.push_back(std::move(row));
      }
    }
  }
  return result;
}

void write_comparison_csv(std::ostream& out, const ComparisonResult& result) {
  out << regression_csv_header() << '\n';
  for (const auto& r : result.reports) out << to_csv_row(r) << '\n';
}

void write_classification_csv(std::ostream& out, const ComparisonResult& result) {
  out << "trait,algorithm,n_test,macro_precision,macro_recall,accuracy\n";
  for (const auto& row : result.classification) {
    std::size_t n = 0;
    for (auto s : row.report.support) n += s;
    out << trait_name(row.trait) << ",forest," << n << ',' << csv::format_double(row.report.macro_precision) << ','
        << csv::format_double(row.report.macro_recall) << ',' << csv::format_double(row.report.accuracy) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "threshold,trait,algorithm,n_train,n_test,rmse,mae_pct,skipped\n";
  for (const auto& r : result.rows) {
    out << r.threshold << ',' << trait_name(r.trait) << ',' << r.algorithm << ',' << r.n_train << ',' << r.n_test << ',';
    if (r.skipped) {
      out << ",,1\n";
    } else {
      out << csv::format_double(r.rmse) << ',' << csv::format_double(r.mae_pct) << ",0\n";
    }
  }
}

namespace {

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

void check_keys(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) bad_config(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) bad_config("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_as(const nlohmann::json& v, const std::string& what) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    bad_config("'" + what + "' has the wrong type");
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const nlohmann::json& doc) {
  check_keys(doc, {"seed", "data", "features", "split", "algorithms", "traits", "experiment"}, "config");
  ExperimentConfig cfg;
  auto& base = cfg.sweep.base;
  if (doc.contains("seed")) cfg.seed = get_as<std::uint64_t>(doc["seed"], "seed");
  base.split.seed = cfg.seed;

  if (!doc.contains("data")) bad_config("config needs a 'data' block");
  const auto& data = doc["data"];
  check_keys(data, {"dir", "synthetic"}, "data");
  if (data.contains("dir") == data.contains("synthetic")) bad_config("data needs exactly one of 'dir' or 'synthetic'");
  if (data.contains("dir")) {
    cfg.data_dir = get_as<std::string>(data["dir"], "data.dir");
  } else {
    cfg.synthetic = synthetic_spec_from_json(data["synthetic"]);
  }

  if (doc.contains("features")) {
    const auto& f = doc["features"];
    check_keys(f, {"mode", "taxonomy", "min_likes"}, "features");
    if (f.contains("mode")) base.features.mode = parse_feature_mode(get_as<std::string>(f["mode"], "features.mode"));
    if (f.contains("taxonomy")) {
      base.features.taxonomy = parse_taxonomy(get_as<std::string>(f["taxonomy"], "features.taxonomy"));
    }
    if (f.contains("min_likes")) base.features.min_likes = get_as<std::int64_t>(f["min_likes"], "features.min_likes");
    if (base.features.min_likes < 1) bad_config("features.min_likes must be >= 1");
  }

  if (doc.contains("split")) {
    const auto& s = doc["split"];
    check_keys(s, {"method", "test_fraction", "n_buckets"}, "split");
    if (s.contains("method")) base.split.method = parse_split_method(get_as<std::string>(s["method"], "split.method"));
    if (s.contains("test_fraction")) base.split.test_fraction = get_as<double>(s["test_fraction"], "split.test_fraction");
    if (s.contains("n_buckets")) base.split.n_buckets = get_as<int>(s["n_buckets"], "split.n_buckets");
  }
  base.split.validate();

  if (!doc.contains("algorithms") || !doc["algorithms"].is_array() || doc["algorithms"].empty()) {
    bad_config("config needs a non-empty 'algorithms' array");
  }
  for (const auto& a : doc["algorithms"]) {
    base.algorithms.push_back(a.is_string() ? default_config(parse_model_kind(a.get<std::string>()))
                                            : algorithm_config_from_json(a));
  }

  if (doc.contains("traits")) {
    base.traits.clear();
    for (const auto& t : doc["traits"]) base.traits.push_back(parse_trait(get_as<std::string>(t, "traits")));
    if (base.traits.empty()) bad_config("'traits' must not be empty");
  }

  if (doc.contains("experiment")) {
    const auto& e = doc["experiment"];
    check_keys(e, {"type", "thresholds", "mode", "train_size"}, "experiment");
    const auto type = e.contains("type") ? get_as<std::string>(e["type"], "experiment.type") : "comparison";
    if (type == "comparison") {
      cfg.kind = ExperimentConfig::Kind::Comparison;
    } else if (type == "sweep") {
      cfg.kind = ExperimentConfig::Kind::Sweep;
      if (!e.contains("thresholds")) bad_config("sweep needs 'thresholds'");
      cfg.sweep.thresholds = get_as<std::vector<std::int64_t>>(e["thresholds"], "experiment.thresholds");
      const auto mode = e.contains("mode") ? get_as<std::string>(e["mode"], "experiment.mode") : "max_train";
      if (mode == "max_train") {
        cfg.sweep.mode = SweepMode::MaxTrain;
      } else if (mode == "fixed_train") {
        cfg.sweep.mode = SweepMode::FixedTrain;
        if (!e.contains("train_size")) bad_config("fixed_train sweeps need 'train_size'");
        cfg.sweep.train_size = get_as<std::size_t>(e["train_size"], "experiment.train_size");
      } else {
        bad_config("experiment.mode must be max_train or fixed_train");
      }
    } else {
      bad_config("experiment.type must be comparison or sweep");
    }
  }
  return cfg;
}

std::string config_hash(const nlohmann::json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

}  // namespace

ExperimentOutput run_experiment(const nlohmann::json& config_doc, const std::string& out_dir,
                                const std::string& relative_to) {
  const auto cfg = parse_experiment_config(config_doc);
  Dataset dataset;
  if (cfg.data_dir) {
    std::filesystem::path dir(*cfg.data_dir);
    if (dir.is_relative()) dir = std::filesystem::path(relative_to) / dir;
    dataset = load_dataset_dir(dir.string()).first;
  } else {
    dataset = generate_synthetic(*cfg.synthetic).dataset;
  }

  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out);
  ExperimentOutput output;
  std::string kind;
  if (cfg.kind == ExperimentConfig::Kind::Comparison) {
    kind = "comparison";
    const auto result = run_comparison(dataset, cfg.sweep.base);
    auto f = open_out(out / "comparison.csv");
    write_comparison_csv(f, result);
    output.files.push_back((out / "comparison.csv").string());
    if (!result.classification.empty()) {
      auto c = open_out(out / "classification.csv");
      write_classification_csv(c, result);
      output.files.push_back((out / "classification.csv").string());
    }
  } else {
    kind = "sweep";
    const auto result = run_threshold_sweep(dataset, cfg.sweep);
    auto f = open_out(out / "sweep.csv");
    write_sweep_csv(f, result);
    output.files.push_back((out / "sweep.csv").string());
  }

  const nlohmann::json meta = {{"experiment", kind},
                               {"seed", cfg.seed},
                               {"rng", std::string(Rng::kIdentifier)},
                               {"config_hash", config_hash(config_doc)},
                               {"n_users", dataset.size()}};
  auto m = open_out(out / "run_meta.json");
  m << meta.dump(2) << '\n';
  output.files.push_back((out / "run_meta.json").string());
  return output;
}

}  // namespace likecat
