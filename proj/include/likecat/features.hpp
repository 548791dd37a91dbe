#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "likecat/core.hpp"

namespace likecat {

/// Which levels of the taxonomy become feature dimensions. With Both, a like
/// on (Sports, Boxing Studio) counts toward (Sports) and (Sports, Boxing Studio).
enum class Taxonomy { CategoryOnly, SubcategoryOnly, Both };

enum class FeatureMode { Relative, Absolute };

std::string_view to_string(Taxonomy t);
std::string_view to_string(FeatureMode m);
Taxonomy parse_taxonomy(std::string_view name);
FeatureMode parse_feature_mode(std::string_view name);

struct FeatureOptions {
  FeatureMode mode = FeatureMode::Relative;
  Taxonomy taxonomy = Taxonomy::Both;
  std::int64_t min_likes = 1;
};

struct FeatureRow {
  std::string user_id;
  FeatureVector features;
  Big5Scores scores;
  std::int64_t total_likes = 0;
};

struct FeatureMatrix {
  FeatureSpace space;
  FeatureMode mode = FeatureMode::Relative;
  Taxonomy taxonomy = Taxonomy::Both;
  std::vector<FeatureRow> rows;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
  std::vector<double> targets(Trait trait) const;
  /// Rows at the given positions, in the given order, sharing this matrix's space.
  FeatureMatrix subset(std::span<const std::size_t> positions) const;
};

/// Re-keys like counts according to the taxonomy switch.
CategoryCounts project_counts(const CategoryCounts& counts, Taxonomy taxonomy);

/// Union of all category keys, lexicographically ordered. Throws EmptyDataset.
FeatureSpace build_feature_space(const Dataset& dataset, Taxonomy taxonomy = Taxonomy::Both);

/// Users with total_likes >= threshold; the input is left untouched.
Dataset filter_min_likes(const Dataset& dataset, std::int64_t threshold);

/// count_i / total over the space. Throws ZeroTotal for an empty map and
/// UnknownCategory for a key outside the space.
FeatureVector normalize_counts(const CategoryCounts& counts, const FeatureSpace& space);

/// Prediction-time variant: keys outside the space are dropped and the rest
/// renormalized. Throws ZeroTotal when nothing known remains.
FeatureVector normalize_known_counts(const CategoryCounts& counts, const FeatureSpace& space);

/// Raw counts as reals. Throws UnknownCategory for a key outside the space.
FeatureVector absolute_counts(const CategoryCounts& counts, const FeatureSpace& space);

/// Filter, then per-user features; rows sorted by user_id.
FeatureMatrix build_matrix(const Dataset& dataset, const FeatureSpace& space, std::int64_t threshold,
                           FeatureMode mode, Taxonomy taxonomy = Taxonomy::Both);

/// Like build_matrix, but for a space fixed elsewhere (a saved model's):
/// categories outside the space are dropped and users left with no known
/// like are skipped.
FeatureMatrix build_matrix_in_space(const Dataset& dataset, const FeatureSpace& space, std::int64_t threshold,
                                    FeatureMode mode, Taxonomy taxonomy);

/// Features for a prediction-time user, dropping categories unknown to the space.
FeatureVector featurize_for_prediction(const CategoryCounts& counts, const FeatureSpace& space, FeatureMode mode,
                                       Taxonomy taxonomy);

/// `userid,total_likes,<category columns>,ope,con,ext,agr,neu`.
void write_matrix_csv(std::ostream& out, const FeatureMatrix& matrix);

}  // namespace likecat
