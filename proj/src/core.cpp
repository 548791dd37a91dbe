#include "likecat/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "likecat/error.hpp"

namespace likecat {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicateUser: return "DuplicateUser";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::ZeroTotal: return "ZeroTotal";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::InsufficientRows: return "InsufficientRows";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::CorruptDocument: return "CorruptDocument";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::FeatureSpaceMismatch: return "FeatureSpaceMismatch";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view trait_name(Trait trait) {
  switch (trait) {
    case Trait::Openness: return "ope";
    case Trait::Conscientiousness: return "con";
    case Trait::Extraversion: return "ext";
    case Trait::Agreeableness: return "agr";
    case Trait::Neuroticism: return "neu";
  }
  return "?";
}

Trait parse_trait(std::string_view name) {
  for (Trait t : kAllTraits) {
    if (trait_name(t) == name) return t;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown trait '" + std::string(name) + "'");
}

Big5Scores validate_scores(const std::array<double, 5>& raw) {
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto name = std::string(trait_name(kAllTraits[i]));
    if (!std::isfinite(raw[i])) {
      throw Error(ErrorCode::NonFinite, name + " is not finite");
    }
    if (raw[i] < kScoreMin || raw[i] > kScoreMax) {
      throw Error(ErrorCode::OutOfRange, name + " = " + std::to_string(raw[i]) + " outside [1,5]");
    }
  }
  return Big5Scores(raw);
}

namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

CategoryPath::CategoryPath(std::string cat, std::optional<std::string> sub)
    : category(std::move(cat)), subcategory(std::move(sub)) {
  if (is_blank(category)) {
    throw Error(ErrorCode::MalformedRow, "category must be non-empty");
  }
}

std::string CategoryPath::to_string() const {
  return subcategory ? category + "/" + *subcategory : category;
}

std::int64_t UserRecord::total_likes() const {
  return std::accumulate(like_counts.begin(), like_counts.end(), std::int64_t{0},
                         [](std::int64_t acc, const auto& kv) { return acc + kv.second; });
}

void Dataset::add(UserRecord user) {
  for (const auto& [path, count] : user.like_counts) {
    if (count < 0) throw Error(ErrorCode::MalformedRow, "negative like count for " + path.to_string());
  }
  auto [it, inserted] = index_.emplace(user.user_id, users_.size());
  if (!inserted) throw Error(ErrorCode::DuplicateUser, "user '" + user.user_id + "' appears twice");
  users_.push_back(std::move(user));
}

const UserRecord* Dataset::find(std::string_view user_id) const {
  auto it = index_.find(std::string(user_id));
  return it == index_.end() ? nullptr : &users_[it->second];
}

FeatureSpace::FeatureSpace(std::vector<CategoryPath> paths) : paths_(std::move(paths)) {
  std::sort(paths_.begin(), paths_.end());
  paths_.erase(std::unique(paths_.begin(), paths_.end()), paths_.end());
  for (std::size_t i = 0; i < paths_.size(); ++i) index_.emplace(paths_[i], i);
}

std::optional<std::size_t> FeatureSpace::index_of(const CategoryPath& path) const {
  auto it = index_.find(path);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace likecat
