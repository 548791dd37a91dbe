#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "likecat/eval.hpp"
#include "likecat/features.hpp"
#include "likecat/models/model.hpp"
#include "likecat/sampling.hpp"
#include "likecat/synthetic.hpp"

namespace likecat {

struct ComparisonSettings {
  std::vector<AlgorithmConfig> algorithms;
  std::vector<Trait> traits{kAllTraits.begin(), kAllTraits.end()};
  FeatureOptions features;
  /// seed drives the split; model seeds are derived from it. strat_trait is
  /// replaced by the target trait of each run.
  SplitSpec split;
};

struct ClassificationRow {
  Trait trait = Trait::Openness;
  ClassificationReport report;
};

struct ComparisonResult {
  /// Regressors only, ordered by trait then algorithm list order.
  std::vector<RegressionReport> reports;
  /// One entry per (trait, forest) pair.
  std::vector<ClassificationRow> classification;
  /// Train/test user ids per trait, shared by every algorithm of that trait.
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> splits;
};

/// Per trait: build the matrix, split once, then fit and evaluate every
/// algorithm on that same split.
ComparisonResult run_comparison(const Dataset& dataset, const ComparisonSettings& settings);

enum class SweepMode { MaxTrain, FixedTrain };

struct SweepSettings {
  ComparisonSettings base;
  std::vector<std::int64_t> thresholds;
  SweepMode mode = SweepMode::MaxTrain;
  /// Training rows per threshold in FixedTrain mode.
  std::size_t train_size = 0;
};

struct SweepRow {
  std::int64_t threshold = 0;
  Trait trait = Trait::Openness;
  std::string algorithm;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double rmse = 0.0;
  double mae_pct = 0.0;
  bool skipped = false;
  std::string skip_reason;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

/// Per threshold: filter to users with at least max(threshold, min_likes)
/// likes, split (standard split or fixed-size training set), fit and
/// evaluate. Cells that cannot run are recorded as skipped.
SweepResult run_threshold_sweep(const Dataset& dataset, const SweepSettings& settings);

void write_comparison_csv(std::ostream& out, const ComparisonResult& result);
void write_classification_csv(std::ostream& out, const ComparisonResult& result);
/// `threshold,trait,algorithm,n_train,n_test,rmse,mae_pct,skipped`
void write_sweep_csv(std::ostream& out, const SweepResult& result);

/// Experiment configuration document:
///   {"seed": u64,
///    "data": {"dir": path} | {"synthetic": {...}},
///    "features": {"mode", "taxonomy", "min_likes"},
///    "split": {"method", "test_fraction", "n_buckets"},
///    "algorithms": [{"name", ...hyperparameters}],
///    "traits": ["ope", ...],
///    "experiment": {"type": "comparison"} |
///                  {"type": "sweep", "thresholds": [...], "mode": "max_train"|"fixed_train", "train_size": n}}
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::optional<std::string> data_dir;
  std::optional<SyntheticSpec> synthetic;
  enum class Kind { Comparison, Sweep } kind = Kind::Comparison;
  SweepSettings sweep;  // sweep.base holds the comparison settings for both kinds
};

/// Throws InvalidConfig (or InvalidSpec for the synthetic block).
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);

/// FNV-1a 64 of the canonical (sorted-key, compact) dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& doc);

struct ExperimentOutput {
  std::vector<std::string> files;
};

/// Loads or generates the data, runs the configured protocol and writes
/// comparison.csv (+ classification.csv) or sweep.csv, plus run_meta.json,
/// into out_dir. `relative_to` resolves a relative data.dir.
ExperimentOutput run_experiment(const nlohmann::json& config_doc, const std::string& out_dir,
                                const std::string& relative_to = ".");

}  // namespace likecat
