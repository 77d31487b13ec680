#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hydrate/pipeline.hpp"

namespace py = pybind11;
using namespace hydrate;
using nlohmann::ordered_json;

namespace {

using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Codes = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>;

RowBlock as_rows(const Matrix& x) {
  if (x.ndim() != 2) throw Error(ErrorKind::invalid_argument, "X must be a 2-D array");
  return {std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
          static_cast<std::size_t>(x.shape(1))};
}

std::vector<ClassLabel> as_labels(const Codes& y) {
  if (y.ndim() != 1) throw Error(ErrorKind::invalid_argument, "y must be a 1-D array");
  std::vector<ClassLabel> out;
  out.reserve(static_cast<std::size_t>(y.size()));
  for (py::ssize_t i = 0; i < y.size(); ++i) {
    const auto label = class_from_code(y.data()[i]);
    if (!label) throw Error(ErrorKind::invalid_argument, "unknown class code " + std::to_string(y.data()[i]));
    out.push_back(*label);
  }
  return out;
}

py::array_t<std::int64_t> to_codes(const std::vector<ClassLabel>& labels) {
  std::vector<std::int64_t> codes(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) codes[i] = class_code(labels[i]);
  return py::array_t<std::int64_t>(static_cast<py::ssize_t>(codes.size()), codes.data());
}

TestConfig test_config(double alpha, const std::string& method) {
  TestConfig c;
  c.alpha = alpha;
  c.method = parse_test_method(method);
  return c;
}

RunConfig run_config(const std::string& config_json) {
  return RunConfig::from_json(config_json.empty() ? ordered_json::object() : ordered_json::parse(config_json));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hydrate-detection core: quality control, classifiers, evaluation and two-sample tests.";

  static py::exception<Error> error(m, "HydrateError", PyExc_ValueError);
  static py::exception<UsageError> usage(m, "UsageError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    } catch (const UsageError& e) {
      PyErr_SetString(usage.ptr(), e.what());
    } catch (const ordered_json::exception& e) {
      PyErr_SetString(usage.ptr(), e.what());
    }
  });

  m.def("class_name", [](int code) {
    const auto label = class_from_code(code);
    if (!label) throw Error(ErrorKind::invalid_argument, "unknown class code " + std::to_string(code));
    return std::string(class_name(*label));
  });

  py::class_<Classifier, std::unique_ptr<Classifier>>(m, "Classifier")
      .def_property_readonly("kind", [](const Classifier& c) { return std::string(c.kind()); })
      .def_property_readonly("n_features", &Classifier::n_features)
      .def(
          "predict",
          [](const Classifier& c, const Matrix& x, unsigned threads) {
            const auto rows = as_rows(x);
            std::vector<ClassLabel> out;
            {
              py::gil_scoped_release release;
              out = c.predict(rows, threads);
            }
            return to_codes(out);
          },
          py::arg("X"), py::arg("threads") = 1)
      .def(
          "scores",
          [](const Classifier& c, const Matrix& x) {
            const auto s = c.predict_scores(as_rows(x));
            py::array_t<double> out({static_cast<py::ssize_t>(s.size()), static_cast<py::ssize_t>(kNumClasses)});
            auto* p = out.mutable_data();
            for (std::size_t i = 0; i < s.size(); ++i) {
              for (std::size_t k = 0; k < kNumClasses; ++k) p[i * kNumClasses + k] = s[i][k];
            }
            return out;
          },
          py::arg("X"))
      .def("to_json", [](const Classifier& c) { return c.to_json().dump(); });

  m.def(
      "fit",
      [](const std::string& kind, const Matrix& x, const Codes& y, const std::string& config_json) {
        const auto rows = as_rows(x);
        const auto labels = as_labels(y);
        const auto config = ClassifierConfig::from_json(config_json.empty() ? ordered_json::object()
                                                                             : ordered_json::parse(config_json));
        const std::vector<std::string> kinds{kind};
        py::gil_scoped_release release;
        return std::move(train_all(rows, labels, config, kinds).front().model);
      },
      py::arg("kind"), py::arg("X"), py::arg("y"), py::arg("config_json") = "");
  m.def(
      "load_model", [](const std::string& text) { return load_model(ordered_json::parse(text)); },
      py::arg("model_json"));

  m.def(
      "evaluate_labels",
      [](const Codes& truth, const Codes& predicted, const std::string& model) {
        return make_report(model, confusion(as_labels(truth), as_labels(predicted))).to_json().dump();
      },
      py::arg("truth"), py::arg("predicted"), py::arg("model") = "model");

  m.def(
      "ks_two_sample",
      [](const std::vector<double>& a, const std::vector<double>& b, const std::string& method, double alpha) {
        const auto r = ks_two_sample(a, b, test_config(alpha, method));
        return py::make_tuple(r.statistic, r.p_value, to_string(r.method));
      },
      py::arg("a"), py::arg("b"), py::arg("method") = "auto", py::arg("alpha") = 0.05);
  m.def(
      "mwu_two_sample",
      [](const std::vector<double>& a, const std::vector<double>& b, const std::string& method, double alpha) {
        const auto r = mwu_two_sample(a, b, test_config(alpha, method));
        return py::make_tuple(r.u, r.p_value, r.z ? py::object(py::float_(*r.z)) : py::object(py::none()),
                              to_string(r.method));
      },
      py::arg("a"), py::arg("b"), py::arg("method") = "auto", py::arg("alpha") = 0.05);
  m.def(
      "compare_models",
      [](const ScoreVectors& scores, double alpha, const std::string& method) {
        const auto config = test_config(alpha, method);
        return comparisons_to_json(compare_models(scores, config), config).dump();
      },
      py::arg("scores"), py::arg("alpha") = 0.05, py::arg("method") = "auto");

  m.def("default_config", [] { return RunConfig{}.to_json().dump(); });
  m.def(
      "run_qc",
      [](const std::string& config_json, const std::string& out) {
        const auto config = run_config(config_json);
        py::gil_scoped_release release;
        return run_qc(config, out).to_json().dump();
      },
      py::arg("config_json"), py::arg("out"));
  m.def(
      "run_pipeline",
      [](const std::string& config_json, const std::string& out) {
        const auto config = run_config(config_json);
        PipelineResult r;
        {
          py::gil_scoped_release release;
          r = run_pipeline(config, out);
        }
        ordered_json j;
        j["quality"] = r.quality.to_json();
        j["models"] = ordered_json::object();
        for (const auto& s : r.models) j["models"][s.name] = s.report.to_json();
        j["comparison"] = r.comparisons ? comparisons_to_json(*r.comparisons, config.stats) : ordered_json();
        return j.dump();
      },
      py::arg("config_json"), py::arg("out"));
}
