#include "likecat/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "csv.hpp"
#include "likecat/error.hpp"

namespace likecat {

std::vector<ScoreRow> parse_big5_table(std::istream& in) {
  csv::Reader reader(in);
  reader.expect_header("userid,ope,con,ext,agr,neu");
  std::vector<ScoreRow> rows;
  std::set<std::string> seen;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 6) reader.fail("expected 6 columns, got " + std::to_string(f.size()));
    if (f[0].empty()) reader.fail("empty userid");
    std::array<double, 5> raw{};
    for (std::size_t i = 0; i < 5; ++i) {
      if (!csv::parse_double(f[i + 1], raw[i])) reader.fail("unparseable score '" + f[i + 1] + "'");
    }
    if (!seen.insert(f[0]).second) {
      throw Error(ErrorCode::DuplicateUser, "line " + std::to_string(reader.line()) + ": user '" + f[0] + "' repeated");
    }
    try {
      rows.push_back({f[0], validate_scores(raw)});
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(reader.line()) + ": " + e.what());
    }
  }
  return rows;
}

std::vector<LikeRow> parse_user_likes_table(std::istream& in) {
  csv::Reader reader(in);
  reader.expect_header("userid,likeid");
  std::vector<LikeRow> rows;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 2) reader.fail("expected 2 columns, got " + std::to_string(f.size()));
    if (f[0].empty() || f[1].empty()) reader.fail("empty id");
    rows.push_back({std::move(f[0]), std::move(f[1])});
  }
  return rows;
}

LikeCategoryMap parse_like_categories_table(std::istream& in) {
  csv::Reader reader(in);
  reader.expect_header("likeid,category,subcategory");
  LikeCategoryMap table;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 3) reader.fail("expected 3 columns, got " + std::to_string(f.size()));
    if (f[0].empty()) reader.fail("empty likeid");
    std::optional<std::string> sub;
    if (!f[2].empty()) sub = f[2];
    std::optional<CategoryPath> path;
    try {
      path.emplace(f[1], sub);
    } catch (const Error&) {
      reader.fail("empty category for like '" + f[0] + "'");
    }
    if (!table.emplace(f[0], *path).second) reader.fail("like '" + f[0] + "' mapped twice");
  }
  return table;
}

std::vector<std::optional<CategoryPath>> CategoryResolver::lookup_batch(std::span<const std::string> ids) {
  std::vector<std::optional<CategoryPath>> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(lookup(id));
  return out;
}

FixtureResolver FixtureResolver::from_stream(std::istream& in) {
  return FixtureResolver(parse_like_categories_table(in));
}

std::optional<CategoryPath> FixtureResolver::lookup(const std::string& like_id) {
  auto it = table_.find(like_id);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

std::pair<LikeCategoryMap, ResolveSummary> resolve_categories(std::span<const std::string> like_ids,
                                                              CategoryResolver& resolver,
                                                              const ResolverPolicy& policy) {
  std::vector<std::string> distinct(like_ids.begin(), like_ids.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  auto results = resolver.lookup_batch(distinct);
  LikeCategoryMap map;
  ResolveSummary summary;
  summary.ids_requested = static_cast<std::int64_t>(distinct.size());
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    if (results[i]) {
      map.emplace(distinct[i], *results[i]);
      ++summary.ids_resolved;
    } else {
      ++summary.ids_unresolved;
      if (policy.on_unresolved == OnUnresolved::MapToUnknown) map.emplace(distinct[i], policy.unknown_label);
    }
  }
  return {std::move(map), summary};
}

std::pair<Dataset, IngestReport> assemble_dataset(std::span<const ScoreRow> scores, std::span<const LikeRow> likes,
                                                  const LikeCategoryMap& categories, const ResolverPolicy& policy) {
  IngestReport report;
  report.users_parsed = static_cast<std::int64_t>(scores.size());
  report.likes_parsed = static_cast<std::int64_t>(likes.size());

  std::map<std::string, CategoryCounts> counts;
  for (const auto& row : scores) counts.emplace(row.user_id, CategoryCounts{});

  for (const auto& like : likes) {
    const CategoryPath* path = nullptr;
    if (auto it = categories.find(like.like_id); it != categories.end()) {
      path = &it->second;
      ++report.likes_resolved;
    } else {
      ++report.likes_unresolved;
      if (policy.on_unresolved == OnUnresolved::MapToUnknown) path = &policy.unknown_label;
    }
    auto user = counts.find(like.user_id);
    if (user == counts.end()) {
      ++report.orphan_likes;
      continue;
    }
    if (path == nullptr) {
      ++report.unresolved_dropped;
      continue;
    }
    ++user->second[*path];
  }

  Dataset dataset;
  for (const auto& row : scores) {
    auto& user_counts = counts.at(row.user_id);
    if (!user_counts.empty()) ++report.users_joined;
    dataset.add(UserRecord{row.user_id, row.scores, std::move(user_counts)});
  }
  return {std::move(dataset), report};
}

namespace {

std::ifstream open_table(const std::string& dir, const std::string& name) {
  std::ifstream in(dir + "/" + name);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + dir + "/" + name);
  return in;
}

}  // namespace

std::pair<Dataset, IngestReport> load_dataset_dir(const std::string& dir, const ResolverPolicy& policy) {
  auto big5 = open_table(dir, "big5.csv");
  auto scores = parse_big5_table(big5);
  auto likes_in = open_table(dir, "user_likes.csv");
  auto likes = parse_user_likes_table(likes_in);
  auto cats_in = open_table(dir, "like_categories.csv");
  auto resolver = FixtureResolver::from_stream(cats_in);

  std::vector<std::string> ids;
  ids.reserve(likes.size());
  for (const auto& l : likes) ids.push_back(l.like_id);
  auto [catmap, summary] = resolve_categories(ids, resolver, policy);
  return assemble_dataset(scores, likes, catmap, policy);
}

}  // namespace likecat
