#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace likecat {

inline constexpr double kScoreMin = 1.0;
inline constexpr double kScoreMax = 5.0;

enum class Trait : std::uint8_t { Openness, Conscientiousness, Extraversion, Agreeableness, Neuroticism };

inline constexpr std::array<Trait, 5> kAllTraits = {Trait::Openness, Trait::Conscientiousness,
                                                    Trait::Extraversion, Trait::Agreeableness,
                                                    Trait::Neuroticism};

/// Short column name used in every file format: ope, con, ext, agr, neu.
std::string_view trait_name(Trait trait);
/// Inverse of trait_name. Throws Error(InvalidConfig) on an unknown name.
Trait parse_trait(std::string_view name);

/// Five trait scores on the closed [1,5] scale. Only constructible through
/// validate_scores so the range invariant always holds.
class Big5Scores {
 public:
  double operator[](Trait t) const { return values_[static_cast<std::size_t>(t)]; }
  const std::array<double, 5>& values() const { return values_; }

  friend bool operator==(const Big5Scores&, const Big5Scores&) = default;

 private:
  explicit Big5Scores(const std::array<double, 5>& v) : values_(v) {}
  friend Big5Scores validate_scores(const std::array<double, 5>& raw);

  std::array<double, 5> values_;
};

/// Rejects non-finite values (NonFinite) and values outside [1,5] (OutOfRange).
/// Accepted values are preserved bit-for-bit.
Big5Scores validate_scores(const std::array<double, 5>& raw);

inline double clamp_score(double raw) {
  if (raw > kScoreMax) return kScoreMax;
  if (raw < kScoreMin) return kScoreMin;
  return raw;
}

/// A page category with an optional subcategory. Comparison is exact and
/// case-sensitive; a missing subcategory orders before any present one.
struct CategoryPath {
  std::string category;
  std::optional<std::string> subcategory;

  CategoryPath() = default;
  /// Throws Error(MalformedRow) when category is blank after trimming.
  explicit CategoryPath(std::string category, std::optional<std::string> subcategory = std::nullopt);

  std::string to_string() const;

  friend bool operator==(const CategoryPath&, const CategoryPath&) = default;
  friend auto operator<=>(const CategoryPath&, const CategoryPath&) = default;
};

using CategoryCounts = std::map<CategoryPath, std::int64_t>;

struct UserRecord {
  std::string user_id;
  Big5Scores scores;
  CategoryCounts like_counts;

  std::int64_t total_likes() const;
};

/// Joined users, unique by user_id, kept in insertion order.
class Dataset {
 public:
  Dataset() = default;

  /// Throws Error(DuplicateUser) if the id is already present.
  void add(UserRecord user);

  const std::vector<UserRecord>& users() const { return users_; }
  std::size_t size() const { return users_.size(); }
  bool empty() const { return users_.empty(); }
  const UserRecord* find(std::string_view user_id) const;

  friend bool operator==(const Dataset& a, const Dataset& b) { return a.users_ == b.users_; }

 private:
  std::vector<UserRecord> users_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline bool operator==(const UserRecord& a, const UserRecord& b) {
  return a.user_id == b.user_id && a.scores == b.scores && a.like_counts == b.like_counts;
}

/// Ordered, duplicate-free set of feature dimensions.
class FeatureSpace {
 public:
  FeatureSpace() = default;
  /// Sorts and deduplicates the given paths.
  explicit FeatureSpace(std::vector<CategoryPath> paths);

  std::size_t dimension() const { return paths_.size(); }
  const std::vector<CategoryPath>& paths() const { return paths_; }
  const CategoryPath& operator[](std::size_t i) const { return paths_[i]; }
  std::optional<std::size_t> index_of(const CategoryPath& path) const;

  friend bool operator==(const FeatureSpace& a, const FeatureSpace& b) { return a.paths_ == b.paths_; }

 private:
  std::vector<CategoryPath> paths_;
  std::map<CategoryPath, std::size_t> index_;
};

using FeatureVector = std::vector<double>;

}  // namespace likecat
