#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "likecat/features.hpp"
#include "test_util.hpp"

using namespace likecat;
using likecat::testing::error_code_of;

namespace {

UserRecord user(const std::string& id, CategoryCounts counts, double score = 3.0) {
  return {id, testing::uniform_scores(score), std::move(counts)};
}

const CategoryPath kA("A"), kB("B"), kC("C");

}  // namespace

TEST_CASE("build_feature_space orders the union lexicographically") {
  Dataset ds;
  ds.add(user("u1", {{CategoryPath("Sports"), 1}}));
  ds.add(user("u2", {{CategoryPath("Politics"), 1}}));
  const auto space = build_feature_space(ds);
  REQUIRE(space.dimension() == 2);
  CHECK(space[0] == CategoryPath("Politics"));
  CHECK(space[1] == CategoryPath("Sports"));

  Dataset one;
  one.add(user("u1", {{kA, 3}}));
  CHECK(build_feature_space(one).dimension() == 1);

  Dataset shared;
  shared.add(user("u1", {{kA, 1}, {kB, 2}}));
  shared.add(user("u2", {{kA, 5}, {kB, 1}}));
  CHECK(build_feature_space(shared).dimension() == 2);

  CHECK(error_code_of([] { build_feature_space(Dataset{}); }) == ErrorCode::EmptyDataset);
}

TEST_CASE("taxonomy switch controls the dimensions") {
  const CategoryCounts counts{{CategoryPath("Sports", "Boxing Studio"), 2}, {CategoryPath("Sports"), 1},
                              {CategoryPath("Politics"), 3}};
  const auto cat = project_counts(counts, Taxonomy::CategoryOnly);
  CHECK(cat == CategoryCounts{{CategoryPath("Sports"), 3}, {CategoryPath("Politics"), 3}});
  const auto sub = project_counts(counts, Taxonomy::SubcategoryOnly);
  CHECK(sub == CategoryCounts{{CategoryPath("Sports", "Boxing Studio"), 2}, {CategoryPath("Sports"), 1},
                              {CategoryPath("Politics"), 3}});
  const auto both = project_counts(counts, Taxonomy::Both);
  CHECK(both == CategoryCounts{{CategoryPath("Sports", "Boxing Studio"), 2}, {CategoryPath("Sports"), 3},
                               {CategoryPath("Politics"), 3}});
  for (auto t : {Taxonomy::CategoryOnly, Taxonomy::SubcategoryOnly, Taxonomy::Both})
    CHECK(parse_taxonomy(to_string(t)) == t);
}

TEST_CASE("filter_min_likes") {
  Dataset ds;
  ds.add(user("a", {{kA, 10}}));
  ds.add(user("b", {{kA, 100}}));
  ds.add(user("c", {{kA, 300}}));
  CHECK(filter_min_likes(ds, 250).size() == 1);
  CHECK(filter_min_likes(ds, 0).size() == 3);
  CHECK(ds.size() == 3);
}

TEST_CASE("normalize_counts examples") {
  const FeatureSpace ps({CategoryPath("Politics"), CategoryPath("Sports")});
  const auto v = normalize_counts({{CategoryPath("Politics"), 30}, {CategoryPath("Sports"), 300}}, ps);
  CHECK(v[0] == doctest::Approx(0.090909).epsilon(1e-6));
  CHECK(v[1] == doctest::Approx(0.909091).epsilon(1e-6));

  const FeatureSpace abc({kA, kB, kC});
  CHECK(normalize_counts({{kA, 7}}, abc) == FeatureVector{1.0, 0.0, 0.0});
  CHECK(normalize_counts({{kA, 1}, {kB, 1}, {kC, 2}}, abc) == FeatureVector{0.25, 0.25, 0.5});

  CHECK(error_code_of([&] { normalize_counts({}, abc); }) == ErrorCode::ZeroTotal);
  CHECK(error_code_of([&] { normalize_counts({{kA, 0}}, abc); }) == ErrorCode::ZeroTotal);
  CHECK(error_code_of([&] { normalize_counts({{CategoryPath("Z"), 1}}, abc); }) == ErrorCode::UnknownCategory);
}

TEST_CASE("prediction-time normalization drops unknown categories") {
  const FeatureSpace abc({kA, kB, kC});
  CHECK(normalize_known_counts({{kA, 1}, {CategoryPath("Z"), 5}, {kC, 3}}, abc) == FeatureVector{0.25, 0.0, 0.75});
  CHECK(error_code_of([&] { normalize_known_counts({{CategoryPath("Z"), 5}}, abc); }) == ErrorCode::ZeroTotal);
}

TEST_CASE("relative features are scale invariant and lie on the simplex") {
  Rng rng(8);
  std::vector<CategoryPath> paths;
  for (int i = 0; i < 12; ++i) paths.emplace_back("c" + std::to_string(i));
  const FeatureSpace space(paths);
  for (int trial = 0; trial < 300; ++trial) {
    CategoryCounts counts;
    const auto k = 1 + rng.below(12);
    for (std::uint64_t j = 0; j < k; ++j) counts[paths[rng.below(12)]] += 1 + static_cast<std::int64_t>(rng.below(1000));
    const auto v = normalize_counts(counts, space);
    for (double x : v) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
    }
    CHECK(std::abs(std::accumulate(v.begin(), v.end(), 0.0) - 1.0) < 1e-9);

    const auto c = 2 + static_cast<std::int64_t>(rng.below(50));
    CategoryCounts scaled = counts;
    for (auto& [p, n] : scaled) n *= c;
    CHECK(normalize_counts(scaled, space) == v);

    const auto abs = absolute_counts(counts, space);
    const double total = std::accumulate(abs.begin(), abs.end(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(abs[i] / total - v[i]) < 1e-12);
  }
}

TEST_CASE("build_matrix examples") {
  Dataset ds;
  ds.add(user("u1", {{kA, 2}, {kB, 2}}));
  const FeatureSpace space({kA, kB});
  const auto rel = build_matrix(ds, space, 1, FeatureMode::Relative);
  REQUIRE(rel.size() == 1);
  CHECK(rel.rows[0].features == FeatureVector{0.5, 0.5});
  CHECK(rel.rows[0].total_likes == 4);
  const auto abs = build_matrix(ds, space, 1, FeatureMode::Absolute);
  CHECK(abs.rows[0].features == FeatureVector{2.0, 2.0});
  CHECK(build_matrix(ds, space, 5, FeatureMode::Relative).empty());

  Dataset with_empty;
  with_empty.add(user("z", {{kA, 1}}));
  with_empty.add(user("a", {}));
  const auto m = build_matrix(with_empty, space, 1, FeatureMode::Relative);
  REQUIRE(m.size() == 1);
  CHECK(m.rows[0].user_id == "z");
}

TEST_CASE("build_matrix sorts rows by user id and filters monotonically") {
  Rng rng(3);
  Dataset ds;
  for (int i = 0; i < 80; ++i) {
    CategoryCounts counts;
    const auto n = rng.below(30);
    for (std::uint64_t j = 0; j < n; ++j) counts[rng.below(2) ? kA : kB] += 1;
    ds.add(user("id" + std::to_string(rng.next_u64() % 100000) + "_" + std::to_string(i), counts));
  }
  const FeatureSpace space({kA, kB});
  const auto m = build_matrix(ds, space, 1, FeatureMode::Relative);
  for (std::size_t i = 1; i < m.size(); ++i) CHECK(m.rows[i - 1].user_id < m.rows[i].user_id);

  for (std::int64_t t1 = 0; t1 < 30; t1 += 3) {
    const auto low = filter_min_likes(ds, t1);
    const auto high = filter_min_likes(ds, t1 + 4);
    for (const auto& u : high.users()) CHECK(low.find(u.user_id) != nullptr);
  }
}

TEST_CASE("build_matrix_in_space skips users with no known like") {
  Dataset ds;
  ds.add(user("u1", {{kA, 1}, {CategoryPath("Z"), 3}}));
  ds.add(user("u2", {{CategoryPath("Z"), 3}}));
  const auto m = build_matrix_in_space(ds, FeatureSpace({kA, kB}), 1, FeatureMode::Relative, Taxonomy::Both);
  REQUIRE(m.size() == 1);
  CHECK(m.rows[0].features == FeatureVector{1.0, 0.0});
}

TEST_CASE("matrix csv dump") {
  Dataset ds;
  ds.add(user("u1", {{kA, 1}, {kB, 3}}, 2.5));
  const auto m = build_matrix(ds, FeatureSpace({kA, kB}), 1, FeatureMode::Relative);
  std::ostringstream out;
  write_matrix_csv(out, m);
  CHECK(out.str() == "userid,total_likes,A,B,ope,con,ext,agr,neu\nu1,4,0.25,0.75,2.5,2.5,2.5,2.5,2.5\n");
}
