#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "likecat/core.hpp"

namespace likecat {

struct ScoreRow {
  std::string user_id;
  Big5Scores scores;
};

struct LikeRow {
  std::string user_id;
  std::string like_id;

  friend bool operator==(const LikeRow&, const LikeRow&) = default;
};

using LikeCategoryMap = std::map<std::string, CategoryPath>;

enum class OnUnresolved { Drop, MapToUnknown };

struct ResolverPolicy {
  OnUnresolved on_unresolved = OnUnresolved::Drop;
  CategoryPath unknown_label{"UNKNOWN"};
};

struct IngestReport {
  std::int64_t users_parsed = 0;
  std::int64_t likes_parsed = 0;
  std::int64_t likes_resolved = 0;
  std::int64_t likes_unresolved = 0;
  /// Scored users with at least one resolved like.
  std::int64_t users_joined = 0;
  /// Like rows whose user has no score row.
  std::int64_t orphan_likes = 0;
  /// Like rows of scored users dropped because their id did not resolve.
  std::int64_t unresolved_dropped = 0;
};

struct ResolveSummary {
  std::int64_t ids_requested = 0;
  std::int64_t ids_resolved = 0;
  std::int64_t ids_unresolved = 0;
};

// Table parsers. The dialect is plain CSV: comma separator, LF or CRLF line
// endings, no quoting. Errors carry the 1-based line number.

/// Header `userid,ope,con,ext,agr,neu`.
std::vector<ScoreRow> parse_big5_table(std::istream& in);
/// Header `userid,likeid`. Repeated rows are kept.
std::vector<LikeRow> parse_user_likes_table(std::istream& in);
/// Header `likeid,category,subcategory`; an empty third field means no subcategory.
LikeCategoryMap parse_like_categories_table(std::istream& in);

/// Looks up the category of a page id.
class CategoryResolver {
 public:
  virtual ~CategoryResolver() = default;
  virtual std::optional<CategoryPath> lookup(const std::string& like_id) = 0;
  /// Result i corresponds to ids[i]. The default issues sequential lookups.
  virtual std::vector<std::optional<CategoryPath>> lookup_batch(std::span<const std::string> ids);
};

/// Resolver backed by an in-memory `likeid,category,subcategory` table.
class FixtureResolver final : public CategoryResolver {
 public:
  explicit FixtureResolver(LikeCategoryMap table) : table_(std::move(table)) {}
  static FixtureResolver from_stream(std::istream& in);

  std::optional<CategoryPath> lookup(const std::string& like_id) override;

 private:
  LikeCategoryMap table_;
};

struct RemoteResolverConfig {
  /// e.g. `http://127.0.0.1:8080/graph`; requests go to `{base}/{id}?fields=category`.
  std::string base_url;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  int max_in_flight = 10;
  std::chrono::milliseconds timeout{5000};
};

/// HTTP resolver speaking the Graph-style `{"id","category","subcategory"}`
/// response. 404 means unresolved; connection failures and 5xx/429 are retried
/// with exponential backoff and raise TransportError once attempts run out.
class RemoteResolver final : public CategoryResolver {
 public:
  explicit RemoteResolver(RemoteResolverConfig config);

  std::optional<CategoryPath> lookup(const std::string& like_id) override;
  std::vector<std::optional<CategoryPath>> lookup_batch(std::span<const std::string> ids) override;

 private:
  RemoteResolverConfig config_;
  std::string origin_;
  std::string path_prefix_;
};

/// Parses one remote response body. Throws TransportError on a malformed body.
std::optional<CategoryPath> parse_category_response(const std::string& body);

/// Resolves every distinct id. Unresolved ids are omitted (Drop) or mapped to
/// policy.unknown_label (MapToUnknown).
std::pair<LikeCategoryMap, ResolveSummary> resolve_categories(std::span<const std::string> like_ids,
                                                              CategoryResolver& resolver,
                                                              const ResolverPolicy& policy = {});

/// Joins score rows with like rows. Every scored user yields one record, even
/// with zero resolved likes; likes of unscored users are counted as orphans.
std::pair<Dataset, IngestReport> assemble_dataset(std::span<const ScoreRow> scores,
                                                  std::span<const LikeRow> likes,
                                                  const LikeCategoryMap& categories,
                                                  const ResolverPolicy& policy = {});

/// Convenience: reads big5.csv, user_likes.csv and like_categories.csv from a
/// directory and joins them with the fixture resolver.
std::pair<Dataset, IngestReport> load_dataset_dir(const std::string& dir, const ResolverPolicy& policy = {});

}  // namespace likecat
