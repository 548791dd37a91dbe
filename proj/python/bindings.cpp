#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "likecat/cli.hpp"
#include "likecat/error.hpp"
#include "likecat/eval.hpp"
#include "likecat/experiments.hpp"
#include "likecat/features.hpp"
#include "likecat/ingest.hpp"
#include "likecat/json_io.hpp"
#include "likecat/models/model.hpp"
#include "likecat/rng.hpp"
#include "likecat/synthetic.hpp"

namespace py = pybind11;
using namespace likecat;
using nlohmann::json;

namespace {

// Categories cross the boundary as "category" or "category/subcategory".
CategoryPath parse_path(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return CategoryPath(text);
  return CategoryPath(text.substr(0, slash), text.substr(slash + 1));
}

CategoryCounts to_counts(const std::map<std::string, std::int64_t>& counts) {
  CategoryCounts out;
  for (const auto& [k, v] : counts) out[parse_path(k)] += v;
  return out;
}

FeatureSpace to_space(const std::vector<std::string>& paths) {
  std::vector<CategoryPath> out;
  for (const auto& p : paths) out.push_back(parse_path(p));
  return FeatureSpace(std::move(out));
}

std::vector<std::string> space_names(const FeatureSpace& space) {
  std::vector<std::string> out;
  for (const auto& p : space.paths()) out.push_back(p.to_string());
  return out;
}

py::dict metrics_dict(const RegressionMetrics& m) {
  py::dict d;
  d["n"] = m.n;
  d["mse"] = m.mse;
  d["rmse"] = m.rmse;
  d["mae"] = m.mae;
  d["mae_pct"] = m.mae_pct;
  return d;
}

struct PyMatrix {
  FeatureMatrix matrix;
};

}  // namespace

PYBIND11_MODULE(_likecat, m) {
  m.doc() = "Big Five trait prediction from like-category features";

  static py::handle error_type = py::exception<Error>(m, "LikecatError", PyExc_ValueError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(std::string(e.what()));
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.attr("RNG_IDENTIFIER") = std::string(Rng::kIdentifier);
  m.attr("TRAITS") = std::vector<std::string>{"ope", "con", "ext", "agr", "neu"};

  m.def("validate_scores", [](const std::array<double, 5>& raw) { return validate_scores(raw).values(); });
  m.def("clamp_score", &clamp_score);
  m.def("normalize_counts", [](const std::map<std::string, std::int64_t>& counts, const std::vector<std::string>& space) {
    return normalize_counts(to_counts(counts), to_space(space));
  });
  m.def("knn_distance", [](const std::vector<double>& a, const std::vector<double>& b, double penalty) {
    return knn_distance(a, b, penalty);
  });
  m.def("compute_regression_metrics", [](const std::vector<double>& predicted, const std::vector<double>& actual) {
    return metrics_dict(compute_regression_metrics(predicted, actual));
  });
  m.def("compute_classification_metrics",
        [](const std::vector<int>& predicted, const std::vector<int>& actual, int n_classes) {
          return to_json(compute_classification_metrics(predicted, actual, n_classes)).dump();
        });

  py::class_<Dataset>(m, "Dataset")
      .def("__len__", &Dataset::size)
      .def_property_readonly("user_ids",
                             [](const Dataset& d) {
                               std::vector<std::string> ids;
                               for (const auto& u : d.users()) ids.push_back(u.user_id);
                               return ids;
                             })
      .def("scores", [](const Dataset& d, const std::string& id) {
        const auto* u = d.find(id);
        if (!u) throw py::key_error(id);
        return u->scores.values();
      })
      .def("like_counts", [](const Dataset& d, const std::string& id) {
        const auto* u = d.find(id);
        if (!u) throw py::key_error(id);
        std::map<std::string, std::int64_t> out;
        for (const auto& [p, c] : u->like_counts) out[p.to_string()] = c;
        return out;
      });

  m.def("load_dataset_dir", [](const std::string& dir) { return load_dataset_dir(dir).first; });
  m.def(
      "generate_synthetic",
      [](const std::string& spec_json, const std::optional<std::string>& out_dir) {
        const auto spec = synthetic_spec_from_json(json::parse(spec_json));
        auto data = generate_synthetic(spec);
        if (out_dir) write_synthetic_tables(data, spec, *out_dir);
        return py::make_tuple(std::move(data.dataset), ground_truth_to_json(data.truth).dump());
      },
      py::arg("spec_json"), py::arg("out_dir") = py::none());

  py::class_<PyMatrix>(m, "FeatureMatrix")
      .def("__len__", [](const PyMatrix& x) { return x.matrix.size(); })
      .def_property_readonly("space", [](const PyMatrix& x) { return space_names(x.matrix.space); })
      .def_property_readonly("user_ids",
                             [](const PyMatrix& x) {
                               std::vector<std::string> ids;
                               for (const auto& r : x.matrix.rows) ids.push_back(r.user_id);
                               return ids;
                             })
      .def_property_readonly("rows",
                             [](const PyMatrix& x) {
                               std::vector<FeatureVector> rows;
                               for (const auto& r : x.matrix.rows) rows.push_back(r.features);
                               return rows;
                             })
      .def("targets", [](const PyMatrix& x, const std::string& trait) { return x.matrix.targets(parse_trait(trait)); });

  m.def(
      "build_matrix",
      [](const Dataset& ds, const std::string& mode, const std::string& taxonomy, std::int64_t min_likes) {
        const auto filtered = filter_min_likes(ds, min_likes);
        const auto tax = parse_taxonomy(taxonomy);
        const auto space = build_feature_space(filtered, tax);
        return PyMatrix{build_matrix(filtered, space, min_likes, parse_feature_mode(mode), tax)};
      },
      py::arg("dataset"), py::arg("mode") = "relative", py::arg("taxonomy") = "both", py::arg("min_likes") = 1);

  py::class_<TrainedModel>(m, "Model")
      .def_property_readonly("kind", [](const TrainedModel& t) { return std::string(to_string(t.kind())); })
      .def_property_readonly("trait", [](const TrainedModel& t) { return std::string(trait_name(t.trait)); })
      .def_property_readonly("space", [](const TrainedModel& t) { return space_names(t.space); })
      .def("predict", [](const TrainedModel& t, const std::vector<double>& x) { return predict(t, x); })
      .def("raw_predict", [](const TrainedModel& t, const std::vector<double>& x) { return raw_predict(t, x); })
      .def("predict_counts", [](const TrainedModel& t, const std::map<std::string, std::int64_t>& counts) {
        return predict_counts(t, to_counts(counts));
      })
      .def("predict_class", [](const TrainedModel& t, const std::vector<double>& x) { return predict_class(t, x); })
      .def("evaluate", [](const TrainedModel& t, const PyMatrix& test) { return metrics_dict(evaluate(t, test.matrix).metrics); })
      .def("to_json", [](const TrainedModel& t) { return model_to_json(t).dump(); })
      .def("save", [](const TrainedModel& t, const std::string& path) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
        save_model(out, t);
      });

  m.def("fit", [](const PyMatrix& train, const std::string& trait, const std::string& algorithm_json) {
    return fit_model(train.matrix, parse_trait(trait), algorithm_config_from_json(json::parse(algorithm_json)));
  });
  m.def("load_model", [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    return load_model(in);
  });
  m.def("model_from_json", [](const std::string& text) { return model_from_json(json::parse(text)); });

  m.def("run_experiment", [](const std::string& config_json, const std::string& out_dir, const std::string& relative_to) {
    return run_experiment(json::parse(config_json), out_dir, relative_to).files;
  });
  m.def("config_hash", [](const std::string& config_json) { return config_hash(json::parse(config_json)); });

  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "likecat");
    std::ostringstream out, err;
    int code = 0;
    {
      py::gil_scoped_release release;
      code = cli::run(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  });
}
