#include "likecat/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <filesystem>
#include <fstream>

#include "csv.hpp"
#include "likecat/error.hpp"
#include "likecat/rng.hpp"

namespace likecat {

namespace {

// Each category exposes this many distinct page ids in emitted tables.
constexpr std::int64_t kPagesPerCategory = 3;

std::string padded(std::size_t value, std::size_t width) {
  auto s = std::to_string(value);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); }

}  // namespace

void SyntheticSpec::validate() const {
  if (n_users < 2) invalid("n_users must be >= 2");
  if (n_categories < 1) invalid("n_categories must be >= 1");
  if (likes_min < 1 || likes_max < likes_min) invalid("need 1 <= likes_min <= likes_max");
  if (!(concentration > 0.0) || !std::isfinite(concentration)) invalid("concentration must be > 0");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) invalid("noise_sigma must be >= 0");
  if (noise_reference_likes && !(*noise_reference_likes > 0.0)) invalid("noise_reference_likes must be > 0");
  if (!(coefficient_range >= 0.0) || !std::isfinite(coefficient_range)) invalid("coefficient_range must be >= 0");
  if (planted) {
    for (const auto& c : planted->coefficients) {
      if (c.size() != n_categories) invalid("planted coefficients need one entry per category");
      for (double v : c) {
        if (!std::isfinite(v)) invalid("planted coefficients must be finite");
      }
    }
    for (double v : planted->intercepts) {
      if (!std::isfinite(v)) invalid("planted intercepts must be finite");
    }
  }
}

std::string synthetic_like_id(std::size_t category, std::int64_t j) {
  return "L" + std::to_string(category) + "_" + std::to_string(j % kPagesPerCategory);
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  SyntheticData out;
  auto& truth = out.truth;

  const std::size_t cat_width = std::to_string(spec.n_categories - 1).size();
  for (std::size_t c = 0; c < spec.n_categories; ++c) truth.categories.emplace_back("Category " + padded(c, cat_width));

  if (spec.planted) {
    truth.planted = *spec.planted;
  } else {
    Rng coef_rng(derive_seed(spec.seed, 0));
    for (std::size_t t = 0; t < 5; ++t) {
      truth.planted.intercepts[t] = 3.0;
      truth.planted.coefficients[t].resize(spec.n_categories);
      for (double& c : truth.planted.coefficients[t]) c = coef_rng.uniform(-spec.coefficient_range, spec.coefficient_range);
    }
  }

  Rng rng(derive_seed(spec.seed, 1));
  const double log_min = std::log(static_cast<double>(spec.likes_min));
  const double log_max = std::log(static_cast<double>(spec.likes_max));
  const std::size_t user_width = std::to_string(spec.n_users - 1).size();
  std::array<double, 5> sq_err{}, sq_err_sq{};

  std::vector<double> cumulative(spec.n_categories);
  std::vector<std::int64_t> counts(spec.n_categories);
  for (std::size_t u = 0; u < spec.n_users; ++u) {
    const auto total = std::clamp<std::int64_t>(std::llround(std::exp(rng.uniform(log_min, log_max))), spec.likes_min,
                                                spec.likes_max);
    const auto pref = rng.dirichlet(spec.n_categories, spec.concentration);
    double acc = 0.0;
    for (std::size_t c = 0; c < spec.n_categories; ++c) cumulative[c] = (acc += pref[c]);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::int64_t l = 0; l < total; ++l) {
      const double r = rng.uniform() * acc;
      auto pos = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin());
      ++counts[std::min(pos, spec.n_categories - 1)];
    }

    const double sigma = spec.noise_reference_likes
                             ? spec.noise_sigma * std::sqrt(*spec.noise_reference_likes / static_cast<double>(total))
                             : spec.noise_sigma;
    std::array<double, 5> planted{}, raw{};
    for (std::size_t t = 0; t < 5; ++t) {
      double v = truth.planted.intercepts[t];
      for (std::size_t c = 0; c < spec.n_categories; ++c) {
        const double basis = spec.basis == TargetBasis::Latent
                                 ? pref[c]
                                 : static_cast<double>(counts[c]) / static_cast<double>(total);
        v += truth.planted.coefficients[t][c] * basis;
      }
      planted[t] = v;
      raw[t] = clamp_score(v + (sigma > 0.0 ? sigma * rng.normal() : 0.0));
      const double e = clamp_score(v) - raw[t];
      sq_err[t] += e * e;
      sq_err_sq[t] += e * e * e * e;
    }

    CategoryCounts like_counts;
    for (std::size_t c = 0; c < spec.n_categories; ++c) {
      if (counts[c] > 0) like_counts.emplace(truth.categories[c], counts[c]);
    }
    out.dataset.add(UserRecord{"u" + padded(u, user_width), validate_scores(raw), std::move(like_counts)});
    truth.planted_values.push_back(planted);
  }

  const auto n = static_cast<double>(spec.n_users);
  for (std::size_t t = 0; t < 5; ++t) {
    const double mse = sq_err[t] / n;
    truth.oracle_rmse[t] = std::sqrt(mse);
    // se(mse) from the spread of squared errors; se(rmse) = se(mse) / (2 rmse).
    const double var_sq = std::max(0.0, sq_err_sq[t] / n - mse * mse);
    const double se_mse = std::sqrt(var_sq / n);
    truth.oracle_rmse_se[t] = truth.oracle_rmse[t] > 0.0 ? se_mse / (2.0 * truth.oracle_rmse[t]) : 0.0;
  }
  return out;
}

namespace {

template <typename T>
void read_spec_key(const nlohmann::json& doc, const char* key, T& field) {
  auto it = doc.find(key);
  if (it == doc.end()) return;
  try {
    field = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    invalid(std::string("'") + key + "' has the wrong type");
  }
}

}  // namespace

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) invalid("synthetic spec must be a JSON object");
  static const std::set<std::string> known = {"n_users",       "n_categories", "likes_min",         "likes_max",
                                              "concentration", "noise_sigma",  "noise_reference_likes",
                                              "basis",         "coefficient_range", "planted",     "seed"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) invalid("unknown synthetic spec key '" + key + "'");
  }
  SyntheticSpec spec;
  read_spec_key(doc, "n_users", spec.n_users);
  read_spec_key(doc, "n_categories", spec.n_categories);
  read_spec_key(doc, "likes_min", spec.likes_min);
  read_spec_key(doc, "likes_max", spec.likes_max);
  read_spec_key(doc, "concentration", spec.concentration);
  read_spec_key(doc, "noise_sigma", spec.noise_sigma);
  read_spec_key(doc, "coefficient_range", spec.coefficient_range);
  read_spec_key(doc, "seed", spec.seed);
  if (auto it = doc.find("noise_reference_likes"); it != doc.end() && !it->is_null()) {
    double ref = 0.0;
    read_spec_key(doc, "noise_reference_likes", ref);
    spec.noise_reference_likes = ref;
  }
  if (auto it = doc.find("basis"); it != doc.end()) {
    const std::string basis = it->is_string() ? it->get<std::string>() : "";
    if (basis == "latent") {
      spec.basis = TargetBasis::Latent;
    } else if (basis == "observed") {
      spec.basis = TargetBasis::Observed;
    } else {
      invalid("basis must be \"latent\" or \"observed\"");
    }
  }
  if (auto it = doc.find("planted"); it != doc.end() && !it->is_null()) {
    PlantedModel planted;
    try {
      for (std::size_t t = 0; t < 5; ++t) {
        const auto& entry = it->at(std::string(trait_name(kAllTraits[t])));
        planted.intercepts[t] = entry.at("intercept").get<double>();
        planted.coefficients[t] = entry.at("coefficients").get<std::vector<double>>();
      }
    } catch (const nlohmann::json::exception& e) {
      invalid(std::string("planted model: ") + e.what());
    }
    spec.planted = std::move(planted);
  }
  spec.validate();
  return spec;
}

nlohmann::json synthetic_spec_to_json(const SyntheticSpec& spec) {
  nlohmann::json doc = {{"n_users", spec.n_users},
                        {"n_categories", spec.n_categories},
                        {"likes_min", spec.likes_min},
                        {"likes_max", spec.likes_max},
                        {"concentration", spec.concentration},
                        {"noise_sigma", spec.noise_sigma},
                        {"basis", spec.basis == TargetBasis::Latent ? "latent" : "observed"},
                        {"coefficient_range", spec.coefficient_range},
                        {"seed", spec.seed}};
  doc["noise_reference_likes"] = spec.noise_reference_likes ? nlohmann::json(*spec.noise_reference_likes) : nullptr;
  return doc;
}

nlohmann::json ground_truth_to_json(const GroundTruth& truth) {
  nlohmann::json planted = nlohmann::json::object(), floor = nlohmann::json::object(),
                 floor_se = nlohmann::json::object();
  for (std::size_t t = 0; t < 5; ++t) {
    const std::string name(trait_name(kAllTraits[t]));
    planted[name] = {{"intercept", truth.planted.intercepts[t]}, {"coefficients", truth.planted.coefficients[t]}};
    floor[name] = truth.oracle_rmse[t];
    floor_se[name] = truth.oracle_rmse_se[t];
  }
  nlohmann::json categories = nlohmann::json::array();
  for (const auto& c : truth.categories) categories.push_back(c.to_string());
  return {{"categories", categories}, {"planted", planted}, {"oracle_rmse", floor}, {"oracle_rmse_se", floor_se}};
}

namespace {

std::ofstream open_table(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

}  // namespace

void write_synthetic_tables(const SyntheticData& data, const SyntheticSpec& spec, const std::string& dir) {
  const std::filesystem::path root(dir);
  std::filesystem::create_directories(root);

  std::map<CategoryPath, std::size_t> category_index;
  for (std::size_t c = 0; c < data.truth.categories.size(); ++c) category_index.emplace(data.truth.categories[c], c);

  auto big5 = open_table(root / "big5.csv");
  auto likes = open_table(root / "user_likes.csv");
  big5 << "userid,ope,con,ext,agr,neu\n";
  likes << "userid,likeid\n";
  std::set<std::string> used_pages;
  for (const auto& user : data.dataset.users()) {
    big5 << user.user_id;
    for (double v : user.scores.values()) big5 << ',' << csv::format_double(v);
    big5 << '\n';
    for (const auto& [path, count] : user.like_counts) {
      const auto c = category_index.at(path);
      for (std::int64_t j = 0; j < count; ++j) {
        const auto page = synthetic_like_id(c, j);
        likes << user.user_id << ',' << page << '\n';
        used_pages.insert(page);
      }
    }
  }

  auto cats = open_table(root / "like_categories.csv");
  cats << "likeid,category,subcategory\n";
  for (std::size_t c = 0; c < data.truth.categories.size(); ++c) {
    for (std::int64_t j = 0; j < kPagesPerCategory; ++j) {
      const auto page = synthetic_like_id(c, j);
      if (!used_pages.contains(page)) continue;
      const auto& path = data.truth.categories[c];
      cats << page << ',' << path.category << ',' << path.subcategory.value_or("") << '\n';
    }
  }

  auto truth = ground_truth_to_json(data.truth);
  truth["spec"] = synthetic_spec_to_json(spec);
  truth["rng"] = std::string(Rng::kIdentifier);
  auto out = open_table(root / "ground_truth.json");
  out << truth.dump(2) << '\n';
}

}  // namespace likecat
