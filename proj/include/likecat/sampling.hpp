#pragma once

#include <cstdint>
#include <vector>

#include "likecat/core.hpp"
#include "likecat/features.hpp"

namespace likecat {

enum class SplitMethod { Random, Stratified };

std::string_view to_string(SplitMethod m);
SplitMethod parse_split_method(std::string_view name);

struct SplitSpec {
  double test_fraction = 0.2;
  SplitMethod method = SplitMethod::Random;
  Trait strat_trait = Trait::Openness;
  int n_buckets = 8;
  std::uint64_t seed = 0;

  /// Throws InvalidConfig unless 0 < test_fraction < 1 and n_buckets >= 1.
  void validate() const;
};

struct Split {
  FeatureMatrix train;
  FeatureMatrix test;
};

/// Index form of a split; both lists ascending.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Nearest integer, ties to even. Every split size goes through this.
std::size_t round_count(double x);

/// Equal-width bucket over [1,5] with the top edge inclusive.
int score_bucket(double score, int n_buckets);

/// Random split of n rows; depends only on n, the fraction and the seed.
SplitIndices split_random_indices(std::size_t n, double test_fraction, std::uint64_t seed);
SplitIndices split_stratified_indices(const FeatureMatrix& matrix, const SplitSpec& spec);

/// Throws TooFewRows below two rows.
Split split_random(const FeatureMatrix& matrix, const SplitSpec& spec);
Split split_stratified(const FeatureMatrix& matrix, const SplitSpec& spec);
/// Dispatches on spec.method.
Split split(const FeatureMatrix& matrix, const SplitSpec& spec);

/// Draws the test set as split_random does, then exactly train_size rows
/// uniformly from the remainder. Throws InsufficientRows when they do not fit.
Split sample_fixed_train(const FeatureMatrix& matrix, std::size_t train_size, double test_fraction,
                         std::uint64_t seed);

}  // namespace likecat
