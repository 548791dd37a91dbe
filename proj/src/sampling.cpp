#include "likecat/sampling.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <numeric>

#include "likecat/error.hpp"
#include "likecat/rng.hpp"

namespace likecat {

std::string_view to_string(SplitMethod m) { return m == SplitMethod::Random ? "random" : "stratified"; }

SplitMethod parse_split_method(std::string_view name) {
  if (name == "random") return SplitMethod::Random;
  if (name == "stratified") return SplitMethod::Stratified;
  throw Error(ErrorCode::InvalidConfig, "unknown split method '" + std::string(name) + "'");
}

void SplitSpec::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "test_fraction must lie in (0,1)");
  }
  if (n_buckets < 1) throw Error(ErrorCode::InvalidConfig, "n_buckets must be >= 1");
}

std::size_t round_count(double x) {
  // nearbyint honours the current rounding mode, which is round-half-even by default.
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double r = std::nearbyint(x);
  std::fesetround(saved);
  return static_cast<std::size_t>(r);
}

int score_bucket(double score, int n_buckets) {
  const double width = (kScoreMax - kScoreMin) / n_buckets;
  const int b = static_cast<int>(std::floor((score - kScoreMin) / width));
  return std::clamp(b, 0, n_buckets - 1);
}

namespace {

void require_rows(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::TooFewRows, "need at least 2 rows to split, got " + std::to_string(n));
}

Split materialize(const FeatureMatrix& matrix, const SplitIndices& idx) {
  return {matrix.subset(idx.train), matrix.subset(idx.test)};
}

// Shuffles `pool` and moves the first `take` entries into `chosen`, the rest into `rest`.
void draw(std::vector<std::size_t> pool, std::size_t take, Rng& rng, std::vector<std::size_t>& chosen,
          std::vector<std::size_t>& rest) {
  rng.shuffle(std::span(pool));
  chosen.insert(chosen.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
  rest.insert(rest.end(), pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end());
}

}  // namespace

SplitIndices split_random_indices(std::size_t n, double test_fraction, std::uint64_t seed) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  Rng rng(seed);
  SplitIndices out;
  draw(std::move(all), std::min(n, round_count(static_cast<double>(n) * test_fraction)), rng, out.test, out.train);
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

SplitIndices split_stratified_indices(const FeatureMatrix& matrix, const SplitSpec& spec) {
  std::vector<std::vector<std::size_t>> buckets(static_cast<std::size_t>(spec.n_buckets));
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    buckets[static_cast<std::size_t>(score_bucket(matrix.rows[i].scores[spec.strat_trait], spec.n_buckets))]
        .push_back(i);
  }
  Rng rng(spec.seed);
  SplitIndices out;
  for (auto& bucket : buckets) {
    if (bucket.empty()) continue;
    const auto take = round_count(static_cast<double>(bucket.size()) * spec.test_fraction);
    draw(std::move(bucket), take, rng, out.test, out.train);
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

Split split_random(const FeatureMatrix& matrix, const SplitSpec& spec) {
  spec.validate();
  require_rows(matrix.size());
  return materialize(matrix, split_random_indices(matrix.size(), spec.test_fraction, spec.seed));
}

Split split_stratified(const FeatureMatrix& matrix, const SplitSpec& spec) {
  spec.validate();
  require_rows(matrix.size());
  return materialize(matrix, split_stratified_indices(matrix, spec));
}

Split split(const FeatureMatrix& matrix, const SplitSpec& spec) {
  return spec.method == SplitMethod::Random ? split_random(matrix, spec) : split_stratified(matrix, spec);
}

Split sample_fixed_train(const FeatureMatrix& matrix, std::size_t train_size, double test_fraction,
                         std::uint64_t seed) {
  const std::size_t n = matrix.size();
  const std::size_t n_test = round_count(static_cast<double>(n) * test_fraction);
  if (n < 2 || train_size + n_test > n || train_size == 0) {
    throw Error(ErrorCode::InsufficientRows, "cannot draw " + std::to_string(train_size) + " training rows and " +
                                                 std::to_string(n_test) + " test rows from " + std::to_string(n));
  }
  auto idx = split_random_indices(n, test_fraction, seed);
  Rng rng(derive_seed(seed, 1));
  std::vector<std::size_t> train, unused;
  draw(std::move(idx.train), train_size, rng, train, unused);
  std::sort(train.begin(), train.end());
  return {matrix.subset(train), matrix.subset(idx.test)};
}

}  // namespace likecat
