#pragma once

#include <unistd.h>

#include <functional>
#include <string>
#include <vector>

#include "likecat/core.hpp"
#include "likecat/error.hpp"
#include "likecat/features.hpp"
#include "likecat/rng.hpp"

namespace likecat::testing {

inline Big5Scores scores(double o, double c = 3.0, double e = 3.0, double a = 3.0, double n = 3.0) {
  return validate_scores({o, c, e, a, n});
}

inline Big5Scores uniform_scores(double v) { return scores(v, v, v, v, v); }

/// Matrix with dimension names d00.. and the given openness targets; the
/// other traits copy the openness value.
inline FeatureMatrix matrix_from(const std::vector<FeatureVector>& rows, const std::vector<double>& targets) {
  std::vector<CategoryPath> paths;
  const std::size_t d = rows.empty() ? 0 : rows.front().size();
  for (std::size_t j = 0; j < d; ++j) paths.emplace_back("d" + std::string(j < 10 ? "0" : "") + std::to_string(j));
  FeatureMatrix m{FeatureSpace(paths), FeatureMode::Relative, Taxonomy::Both, {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string id = "u" + std::string(i < 10 ? "000" : i < 100 ? "00" : i < 1000 ? "0" : "") + std::to_string(i);
    m.rows.push_back({id, rows[i], uniform_scores(targets[i]), 1});
  }
  return m;
}

/// Random rows with entries in [0,1) and targets in [1,5].
inline FeatureMatrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FeatureVector> rows(n, FeatureVector(d));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : rows[i]) x = rng.uniform();
    y[i] = rng.uniform(1.0, 5.0);
  }
  return matrix_from(rows, y);
}

template <typename F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  throw std::logic_error("expected a likecat::Error");
}

}  // namespace likecat::testing

#include <filesystem>
#include <fstream>
#include <sstream>

namespace likecat::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("likecat_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace likecat::testing
