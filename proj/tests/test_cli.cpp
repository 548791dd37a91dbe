#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "likecat/cli.hpp"
#include "likecat/ingest.hpp"
#include "likecat/models/model.hpp"
#include "likecat/synthetic.hpp"
#include "test_util.hpp"

using namespace likecat;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "likecat");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_spec(const testing::TempDir& dir, const json& spec) {
  const auto path = dir / "spec.json";
  testing::write_file(path, spec.dump());
  return path;
}

const json kSpec = {{"n_users", 150}, {"n_categories", 6}, {"basis", "observed"}, {"seed", 3}};

}  // namespace

TEST_CASE("generate writes round-trippable tables deterministically") {
  testing::TempDir dir("cli_gen");
  const auto spec = write_spec(dir, kSpec);
  REQUIRE(run({"generate", "--spec", spec, "--out", dir / "a"}).code == 0);
  REQUIRE(run({"generate", "--spec", spec, "--out", dir / "b"}).code == 0);
  for (const char* f : {"big5.csv", "user_likes.csv", "like_categories.csv", "ground_truth.json"})
    CHECK(testing::read_file(dir / (std::string("a/") + f)) == testing::read_file(dir / (std::string("b/") + f)));

  const auto loaded = load_dataset_dir(dir / "a").first;
  CHECK(loaded == generate_synthetic(synthetic_spec_from_json(kSpec)).dataset);

  const auto tiny = write_spec(dir, {{"n_users", 2}, {"n_categories", 1}});
  CHECK(run({"generate", "--spec", tiny, "--out", dir / "tiny"}).code == 0);
  CHECK(std::filesystem::exists(dir.path() / "tiny" / "ground_truth.json"));

  testing::write_file(dir / "bad.json", "{oops");
  const auto bad = run({"generate", "--spec", dir / "bad.json", "--out", dir / "c"});
  CHECK(bad.code == 1);
  CHECK_FALSE(bad.err.empty());
  const auto invalid = write_spec(dir, {{"n_users", 1}});
  CHECK(run({"generate", "--spec", invalid, "--out", dir / "d"}).code == 2);
}

TEST_CASE("train, predict and evaluate") {
  testing::TempDir dir("cli_train");
  const auto spec = write_spec(dir, kSpec);
  REQUIRE(run({"generate", "--spec", spec, "--out", dir / "data"}).code == 0);

  const auto trained = run({"train", "--data", dir / "data", "--algorithm", "linear", "--trait", "ope", "--out",
                            dir / "ope.model.json"});
  REQUIRE(trained.code == 0);
  const auto report = json::parse(trained.out);
  CHECK(report["training"][0]["train_rmse"].get<double>() < 1e-6);

  CHECK(run({"train", "--data", dir / "data", "--algorithm", "bogus", "--out", dir / "x.json"}).code == 1);
  CHECK(run({"train", "--data", dir / "data", "--algorithm", "linear", "--trait", "xyz", "--out", dir / "x.json"})
            .code == 1);
  testing::write_file(dir / "filter.json", R"({"features": {"min_likes": 100000}})");
  CHECK(run({"train", "--data", dir / "data", "--algorithm", "linear", "--config", dir / "filter.json", "--out",
             dir / "x.json"})
            .code == 2);

  // One-hot input: the prediction is clamp(intercept + coefficient of that category).
  std::ifstream model_in(dir / "ope.model.json");
  const auto model = load_model(model_in);
  const auto& lin = std::get<LinearModel>(model.model);
  testing::write_file(dir / "likes.csv", "likeid\n" + synthetic_like_id(2, 0) + "\n" + synthetic_like_id(2, 1) + "\n");
  const auto pred = run({"predict", "--model", dir / "ope.model.json", "--likes", dir / "likes.csv", "--categories",
                         dir / "data/like_categories.csv"});
  REQUIRE(pred.code == 0);
  const auto p = json::parse(pred.out);
  const auto truth = generate_synthetic(synthetic_spec_from_json(kSpec)).truth;
  const auto dim = model.space.index_of(truth.categories[2]);
  REQUIRE(dim.has_value());
  CHECK(p["ope"].get<double>() == doctest::Approx(clamp_score(lin.intercept + lin.coefficients[*dim])));
  CHECK(p["con"].is_null());

  testing::write_file(dir / "empty.csv", "likeid\n");
  CHECK(run({"predict", "--model", dir / "ope.model.json", "--likes", dir / "empty.csv", "--categories",
             dir / "data/like_categories.csv"})
            .code == 2);

  REQUIRE(run({"train", "--data", dir / "data", "--algorithm", "boosted_trees", "--trait", "all", "--out",
               dir / "all.model.json", "--seed", "4"})
              .code == 0);
  const auto all = json::parse(run({"predict", "--model", dir / "all.model.json", "--likes", dir / "likes.csv",
                                    "--categories", dir / "data/like_categories.csv"})
                                   .out);
  for (const char* t : {"ope", "con", "ext", "agr", "neu"}) {
    CHECK(all[t].get<double>() >= 1.0);
    CHECK(all[t].get<double>() <= 5.0);
  }

  const auto ev = run({"evaluate", "--model", dir / "all.model.json", "--data", dir / "data", "--out",
                       dir / "eval.csv"});
  REQUIRE(ev.code == 0);
  const auto csv = testing::read_file(dir / "eval.csv");
  CHECK(csv.rfind("trait,algorithm,n_test,mse,rmse,mae_pct\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("experiment configs from the command line") {
  testing::TempDir dir("cli_exp");
  const json cfg = {{"seed", 1},
                    {"data", {{"synthetic", {{"n_users", 200}, {"seed", 2}, {"noise_sigma", 0.2}}}}},
                    {"algorithms", {"linear", "boosted_trees", "knn", "mlp"}},
                    {"experiment", {{"type", "comparison"}}}};
  testing::write_file(dir / "cmp.json", cfg.dump());
  REQUIRE(run({"experiment", "--config", dir / "cmp.json", "--out", dir / "r1"}).code == 0);
  REQUIRE(run({"evaluate", "--config", dir / "cmp.json", "--out", dir / "r2"}).code == 0);
  const auto csv = testing::read_file(dir / "r1/comparison.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
  CHECK(csv == testing::read_file(dir / "r2/comparison.csv"));

  auto sweep = cfg;
  sweep["algorithms"] = {"linear"};
  sweep["experiment"] = {{"type", "sweep"}, {"thresholds", {0, 50, 100}}};
  testing::write_file(dir / "sweep.json", sweep.dump());
  REQUIRE(run({"experiment", "--config", dir / "sweep.json", "--out", dir / "s"}).code == 0);
  const auto s = testing::read_file(dir / "s/sweep.csv");
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 3 * 5);

  auto broken = cfg;
  broken["experiment"]["type"] = "party";
  testing::write_file(dir / "broken.json", broken.dump());
  CHECK(run({"experiment", "--config", dir / "broken.json", "--out", dir / "b"}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
}
