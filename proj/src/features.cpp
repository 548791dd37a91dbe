#include "likecat/features.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "csv.hpp"
#include "likecat/error.hpp"

namespace likecat {

std::string_view to_string(Taxonomy t) {
  switch (t) {
    case Taxonomy::CategoryOnly: return "category";
    case Taxonomy::SubcategoryOnly: return "subcategory";
    case Taxonomy::Both: return "both";
  }
  return "?";
}

std::string_view to_string(FeatureMode m) { return m == FeatureMode::Relative ? "relative" : "absolute"; }

Taxonomy parse_taxonomy(std::string_view name) {
  for (auto t : {Taxonomy::CategoryOnly, Taxonomy::SubcategoryOnly, Taxonomy::Both}) {
    if (to_string(t) == name) return t;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown taxonomy '" + std::string(name) + "'");
}

FeatureMode parse_feature_mode(std::string_view name) {
  if (name == "relative") return FeatureMode::Relative;
  if (name == "absolute") return FeatureMode::Absolute;
  throw Error(ErrorCode::InvalidConfig, "unknown feature mode '" + std::string(name) + "'");
}

std::vector<double> FeatureMatrix::targets(Trait trait) const {
  std::vector<double> y;
  y.reserve(rows.size());
  for (const auto& r : rows) y.push_back(r.scores[trait]);
  return y;
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> positions) const {
  FeatureMatrix out{space, mode, taxonomy, {}};
  out.rows.reserve(positions.size());
  for (auto p : positions) out.rows.push_back(rows.at(p));
  return out;
}

CategoryCounts project_counts(const CategoryCounts& counts, Taxonomy taxonomy) {
  if (taxonomy == Taxonomy::SubcategoryOnly) return counts;
  CategoryCounts out;
  for (const auto& [path, n] : counts) {
    out[CategoryPath(path.category)] += n;
    if (taxonomy == Taxonomy::Both && path.subcategory) out[path] += n;
  }
  return out;
}

FeatureSpace build_feature_space(const Dataset& dataset, Taxonomy taxonomy) {
  if (dataset.empty()) throw Error(ErrorCode::EmptyDataset, "cannot build a feature space from zero users");
  std::vector<CategoryPath> paths;
  for (const auto& user : dataset.users()) {
    for (const auto& [path, n] : project_counts(user.like_counts, taxonomy)) paths.push_back(path);
  }
  return FeatureSpace(std::move(paths));
}

Dataset filter_min_likes(const Dataset& dataset, std::int64_t threshold) {
  Dataset out;
  for (const auto& user : dataset.users()) {
    if (user.total_likes() >= threshold) out.add(user);
  }
  return out;
}

namespace {

std::int64_t sum_counts(const CategoryCounts& counts) {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0},
                         [](std::int64_t acc, const auto& kv) { return acc + kv.second; });
}

std::size_t require_index(const FeatureSpace& space, const CategoryPath& path) {
  auto idx = space.index_of(path);
  if (!idx) throw Error(ErrorCode::UnknownCategory, "category '" + path.to_string() + "' not in feature space");
  return *idx;
}

}  // namespace

FeatureVector normalize_counts(const CategoryCounts& counts, const FeatureSpace& space) {
  const auto total = sum_counts(counts);
  if (total <= 0) throw Error(ErrorCode::ZeroTotal, "user has no likes to normalize");
  FeatureVector v(space.dimension(), 0.0);
  const auto denom = static_cast<double>(total);
  for (const auto& [path, n] : counts) {
    // Division, not multiplication by 1/total: keeps scaled counts bit-identical.
    v[require_index(space, path)] = static_cast<double>(n) / denom;
  }
  return v;
}

FeatureVector normalize_known_counts(const CategoryCounts& counts, const FeatureSpace& space) {
  CategoryCounts known;
  for (const auto& [path, n] : counts) {
    if (n > 0 && space.index_of(path)) known.emplace(path, n);
  }
  return normalize_counts(known, space);
}

FeatureVector absolute_counts(const CategoryCounts& counts, const FeatureSpace& space) {
  FeatureVector v(space.dimension(), 0.0);
  for (const auto& [path, n] : counts) v[require_index(space, path)] = static_cast<double>(n);
  return v;
}

FeatureMatrix build_matrix(const Dataset& dataset, const FeatureSpace& space, std::int64_t threshold,
                           FeatureMode mode, Taxonomy taxonomy) {
  FeatureMatrix matrix{space, mode, taxonomy, {}};
  const auto filtered = filter_min_likes(dataset, threshold);
  for (const auto& user : filtered.users()) {
    const auto projected = project_counts(user.like_counts, taxonomy);
    FeatureVector features = mode == FeatureMode::Relative ? normalize_counts(projected, space)
                                                           : absolute_counts(projected, space);
    matrix.rows.push_back({user.user_id, std::move(features), user.scores, user.total_likes()});
  }
  std::sort(matrix.rows.begin(), matrix.rows.end(),
            [](const FeatureRow& a, const FeatureRow& b) { return a.user_id < b.user_id; });
  return matrix;
}

FeatureVector featurize_for_prediction(const CategoryCounts& counts, const FeatureSpace& space, FeatureMode mode,
                                       Taxonomy taxonomy) {
  const auto projected = project_counts(counts, taxonomy);
  if (mode == FeatureMode::Relative) return normalize_known_counts(projected, space);
  CategoryCounts known;
  for (const auto& [path, n] : projected) {
    if (space.index_of(path)) known.emplace(path, n);
  }
  if (sum_counts(known) <= 0) throw Error(ErrorCode::ZeroTotal, "no likes in known categories");
  return absolute_counts(known, space);
}

FeatureMatrix build_matrix_in_space(const Dataset& dataset, const FeatureSpace& space, std::int64_t threshold,
                                    FeatureMode mode, Taxonomy taxonomy) {
  FeatureMatrix matrix{space, mode, taxonomy, {}};
  const auto filtered = filter_min_likes(dataset, threshold);
  for (const auto& user : filtered.users()) {
    try {
      matrix.rows.push_back({user.user_id, featurize_for_prediction(user.like_counts, space, mode, taxonomy),
                             user.scores, user.total_likes()});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroTotal) throw;
    }
  }
  std::sort(matrix.rows.begin(), matrix.rows.end(),
            [](const FeatureRow& a, const FeatureRow& b) { return a.user_id < b.user_id; });
  return matrix;
}

void write_matrix_csv(std::ostream& out, const FeatureMatrix& matrix) {
  out << "userid,total_likes";
  for (const auto& path : matrix.space.paths()) out << ',' << path.to_string();
  for (Trait t : kAllTraits) out << ',' << trait_name(t);
  out << '\n';
  for (const auto& row : matrix.rows) {
    out << row.user_id << ',' << row.total_likes;
    for (double x : row.features) out << ',' << csv::format_double(x);
    for (Trait t : kAllTraits) out << ',' << csv::format_double(row.scores[t]);
    out << '\n';
  }
}

}  // namespace likecat
