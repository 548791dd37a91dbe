#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "likecat/sampling.hpp"
#include "test_util.hpp"

using namespace likecat;
using likecat::testing::error_code_of;

namespace {

FeatureMatrix matrix_with_scores(const std::vector<double>& scores) {
  std::vector<FeatureVector> rows(scores.size(), FeatureVector{1.0});
  return testing::matrix_from(rows, scores);
}

std::set<std::string> ids(const FeatureMatrix& m) {
  std::set<std::string> out;
  for (const auto& r : m.rows) out.insert(r.user_id);
  return out;
}

void check_partition(const FeatureMatrix& all, const Split& s) {
  CHECK(s.train.size() + s.test.size() == all.size());
  const auto a = ids(s.train), b = ids(s.test);
  std::set<std::string> both;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::inserter(both, both.end()));
  CHECK(both == ids(all));
  CHECK(both.size() == all.size());
}

}  // namespace

TEST_CASE("round_count ties go to even") {
  CHECK(round_count(0.2) == 0);
  CHECK(round_count(0.5) == 0);
  CHECK(round_count(1.5) == 2);
  CHECK(round_count(2.5) == 2);
  CHECK(round_count(2.6) == 3);
}

TEST_CASE("score_bucket uses equal-width bins over [1,5] with the top edge inclusive") {
  CHECK(score_bucket(1.0, 8) == 0);
  CHECK(score_bucket(1.49, 8) == 0);
  CHECK(score_bucket(1.5, 8) == 1);
  CHECK(score_bucket(5.0, 8) == 7);
  CHECK(score_bucket(3.0, 2) == 1);
  CHECK(score_bucket(2.99, 2) == 0);
  CHECK(score_bucket(4.2, 1) == 0);
}

TEST_CASE("split_random examples") {
  std::vector<double> s(10, 3.0);
  const auto m = matrix_with_scores(s);
  SplitSpec spec;
  spec.seed = 11;
  const auto a = split_random(m, spec);
  CHECK(a.test.size() == 2);
  CHECK(a.train.size() == 8);
  check_partition(m, a);
  const auto b = split_random(m, spec);
  CHECK(ids(a.test) == ids(b.test));

  const auto one = matrix_with_scores({3.0});
  CHECK(error_code_of([&] { split_random(one, spec); }) == ErrorCode::TooFewRows);
  CHECK(error_code_of([&] { split_stratified(one, spec); }) == ErrorCode::TooFewRows);
}

TEST_CASE("split_random ignores labels and features") {
  const auto a = split_random_indices(50, 0.3, 99);
  Rng rng(1);
  std::vector<double> s1(50), s2(50);
  for (auto& v : s1) v = rng.uniform(1.0, 5.0);
  for (auto& v : s2) v = rng.uniform(1.0, 5.0);
  SplitSpec spec;
  spec.seed = 99;
  spec.test_fraction = 0.3;
  const auto m1 = matrix_with_scores(s1), m2 = matrix_with_scores(s2);
  CHECK(ids(split_random(m1, spec).test) == ids(split_random(m2, spec).test));
  CHECK(a.test.size() == 15);
}

TEST_CASE("split_stratified examples") {
  std::vector<double> s;
  for (int i = 0; i < 10; ++i) s.push_back(1.5);
  for (int i = 0; i < 10; ++i) s.push_back(4.5);
  const auto m = matrix_with_scores(s);
  SplitSpec spec;
  spec.method = SplitMethod::Stratified;
  spec.n_buckets = 2;
  spec.seed = 5;
  const auto out = split(m, spec);
  check_partition(m, out);
  int low = 0, high = 0;
  for (const auto& r : out.test.rows) (r.scores[Trait::Openness] < 3.0 ? low : high)++;
  CHECK(low == 2);
  CHECK(high == 2);

  // One occupied bucket: identical to the random split.
  const auto flat = matrix_with_scores(std::vector<double>(17, 2.0));
  const auto strat = split_stratified_indices(flat, spec);
  const auto rand = split_random_indices(17, spec.test_fraction, spec.seed);
  CHECK(strat.test == rand.test);

  // A lone row in its bucket contributes round(0.2) = 0 test rows.
  auto lone = s;
  lone.push_back(3.2);
  spec.n_buckets = 3;
  const auto with_lone = split(matrix_with_scores(lone), spec);
  for (const auto& r : with_lone.test.rows) CHECK(r.scores[Trait::Openness] != 3.2);
}

TEST_CASE("split invariants hold on random instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(300);
    std::vector<double> s(n);
    for (auto& v : s) v = rng.below(10) == 0 ? 5.0 : rng.uniform(1.0, 5.0);
    const auto m = matrix_with_scores(s);
    SplitSpec spec;
    spec.seed = rng.next_u64();
    spec.test_fraction = rng.uniform(0.05, 0.95);
    spec.n_buckets = 1 + static_cast<int>(rng.below(12));

    spec.method = SplitMethod::Random;
    const auto r = split(m, spec);
    check_partition(m, r);
    CHECK(r.test.size() == round_count(static_cast<double>(n) * spec.test_fraction));

    spec.method = SplitMethod::Stratified;
    const auto st = split(m, spec);
    check_partition(m, st);
    std::vector<std::size_t> bucket(static_cast<std::size_t>(spec.n_buckets)), in_test(bucket.size());
    for (double v : s) ++bucket[static_cast<std::size_t>(score_bucket(v, spec.n_buckets))];
    for (const auto& row : st.test.rows)
      ++in_test[static_cast<std::size_t>(score_bucket(row.scores[Trait::Openness], spec.n_buckets))];
    for (std::size_t b = 0; b < bucket.size(); ++b)
      CHECK(in_test[b] == round_count(static_cast<double>(bucket[b]) * spec.test_fraction));

    const auto again = split(m, spec);
    CHECK(ids(again.test) == ids(st.test));
  }
}

TEST_CASE("sample_fixed_train") {
  const auto m = matrix_with_scores(std::vector<double>(100, 3.0));
  const auto s = sample_fixed_train(m, 50, 0.2, 7);
  CHECK(s.test.size() == 20);
  CHECK(s.train.size() == 50);
  const auto tr = ids(s.train), te = ids(s.test);
  for (const auto& id : tr) CHECK(te.count(id) == 0);
  // The test set matches the plain random split.
  SplitSpec spec;
  spec.seed = 7;
  CHECK(ids(split_random(m, spec).test) == te);

  CHECK(sample_fixed_train(m, 80, 0.2, 7).train.size() == 80);
  CHECK(error_code_of([&] { sample_fixed_train(m, 100, 0.2, 7); }) == ErrorCode::InsufficientRows);
  CHECK(error_code_of([&] { sample_fixed_train(m, 81, 0.2, 7); }) == ErrorCode::InsufficientRows);
}

TEST_CASE("SplitSpec validation") {
  SplitSpec spec;
  spec.test_fraction = 1.0;
  CHECK(error_code_of([&] { spec.validate(); }) == ErrorCode::InvalidConfig);
  spec.test_fraction = 0.2;
  spec.n_buckets = 0;
  CHECK(error_code_of([&] { spec.validate(); }) == ErrorCode::InvalidConfig);
}
