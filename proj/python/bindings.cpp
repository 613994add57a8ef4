#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rarepred/error.hpp"
#include "rarepred/experiment.hpp"
#include "rarepred/logistic.hpp"
#include "rarepred/metrics.hpp"
#include "rarepred/resampling.hpp"
#include "rarepred/synth.hpp"
#include "rarepred/validation.hpp"

namespace py = pybind11;
using namespace rarepred;

namespace {

// JSON values cross the boundary as text; the Python side wraps json.loads/dumps.
nlohmann::json from_text(const std::string& text) { return text.empty() ? nlohmann::json::object() : nlohmann::json::parse(text); }

std::vector<ScoredPair> pairs_from(const std::vector<double>& scores, const std::vector<int>& outcomes) {
  return make_pairs(scores, outcomes);
}

Recipe recipe_from(const std::string& spec, std::size_t K, std::uint64_t seed, bool individual_effects,
                   bool standardize) {
  Recipe r;
  r.name = spec;
  r.spec = parse_spec(spec);
  r.K = K;
  r.seed = seed;
  r.encode.individual_effects = individual_effects;
  r.encode.standardize = standardize;
  return r;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Resampled logistic ensembles for rare events in longitudinal panels";
  m.attr("__version__") = RAREPRED_VERSION;

  static py::exception<Error> error(m, "RarepredError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("code") = to_string(e.code());
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<Panel>(m, "Panel")
      .def_property_readonly("schema", &Panel::schema)
      .def_property_readonly("horizons", &Panel::horizon_boundaries)
      .def("__len__", &Panel::size)
      .def("individuals", &Panel::individuals)
      .def("to_csv", [](const Panel& p) {
        std::ostringstream out;
        write_csv(out, p);
        return out.str();
      })
      .def_static(
          "from_csv_text",
          [](const std::string& text, std::optional<TimeIndex> evaluation_start) {
            SchemaConfig cfg;
            cfg.evaluation_start = evaluation_start;
            std::istringstream in(text);
            return read_csv(in, cfg);
          },
          py::arg("text"), py::arg("evaluation_start") = py::none())
      .def_static(
          "from_csv",
          [](const std::string& path, std::optional<TimeIndex> evaluation_start) {
            SchemaConfig cfg;
            cfg.evaluation_start = evaluation_start;
            return ingest_csv(path, cfg);
          },
          py::arg("path"), py::arg("evaluation_start") = py::none());

  m.def(
      "synth_panel", [](const std::string& config_json) { return generate(synth_config_from_json(from_text(config_json))); },
      py::arg("config_json") = "");

  m.def("normalize_spec", [](const std::string& text) { return to_string(parse_spec(text)); });

  m.def("auc", [](const std::vector<double>& s, const std::vector<int>& y) { return auc(pairs_from(s, y)); });
  m.def("peirce", [](const std::vector<double>& s, const std::vector<int>& y) {
    const auto r = peirce(pairs_from(s, y));
    return py::dict(py::arg("index") = r.index, py::arg("gamma_star") = r.gamma_star,
                    py::arg("sensitivity") = r.sensitivity, py::arg("specificity") = r.specificity);
  });
  m.def("roc", [](const std::vector<double>& s, const std::vector<int>& y) {
    const auto c = roc(pairs_from(s, y));
    return py::dict(py::arg("thresholds") = c.thresholds, py::arg("fpr") = c.fpr, py::arg("tpr") = c.tpr);
  });

  m.def(
      "fit_logistic",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::optional<Eigen::VectorXd> w) {
        const DesignMatrix d = w ? DesignMatrix::from_arrays(x, y, *w) : DesignMatrix::from_arrays(x, y);
        const auto f = fit(d);
        return py::dict(py::arg("beta") = f.beta, py::arg("covariance") = f.covariance,
                        py::arg("converged") = f.converged, py::arg("iterations") = f.iterations,
                        py::arg("deviance") = f.final_deviance, py::arg("separation") = f.separation_flag);
      },
      py::arg("x"), py::arg("y"), py::arg("weights") = py::none(),
      "Weighted logistic fit; x must carry the intercept column.");

  m.def(
      "resample",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::string& spec, std::uint64_t seed) {
        const DesignMatrix d = DesignMatrix::from_arrays(x, y);
        const ResampledSet set = apply_chain(d, parse_spec(spec), RngStream(seed));
        const DesignMatrix out = materialize_expanded(d, set);
        return py::dict(py::arg("x") = out.rows, py::arg("y") = out.response,
                        py::arg("row_indices") = set.row_indices,
                        py::arg("n_synthetic") = set.synthetic_rows.size(), py::arg("warnings") = set.warnings);
      },
      py::arg("x"), py::arg("y"), py::arg("spec"), py::arg("seed") = 0,
      "Applies a sampler chain; rows of the result are expanded (duplicates repeated).");

  m.def(
      "evaluate",
      [](const Panel& panel, const std::string& protocol, const std::string& spec, std::size_t K, std::uint64_t seed,
         std::optional<TimeIndex> boundary, bool individual_effects, bool standardize, std::size_t jobs) {
        const Recipe r = recipe_from(spec, K, seed, individual_effects, standardize);
        EvalOptions opts;
        opts.jobs = jobs;
        const ProtocolChoice choice = parse_protocol(protocol);
        const TimeIndex at = boundary ? *boundary : choice.boundary.value_or(panel.horizon_boundaries().front());
        EvalReport rep;
        {
          py::gil_scoped_release release;
          switch (choice.protocol) {
            case Protocol::Longitudinal: rep = longitudinal_eval(panel, r, opts); break;
            case Protocol::Loocv: rep = loocv_eval(panel, r, opts); break;
            case Protocol::Split: rep = split_eval(panel, at, r, opts); break;
          }
        }
        return to_json(rep).dump();
      },
      py::arg("panel"), py::arg("protocol") = "longitudinal", py::arg("spec") = "id", py::arg("K") = 1,
      py::arg("seed") = 0, py::arg("boundary") = py::none(), py::arg("individual_effects") = true,
      py::arg("standardize") = false, py::arg("jobs") = 1);

  m.def(
      "rate_sweep",
      [](const Panel& panel, const std::vector<std::string>& specs, std::size_t repeats, std::size_t K,
         std::uint64_t seed, std::size_t jobs) {
        std::vector<SamplerSpec> grid;
        for (const auto& s : specs) grid.push_back(parse_spec(s));
        EvalOptions opts;
        opts.jobs = jobs;
        SweepTable table;
        {
          py::gil_scoped_release release;
          table = rate_sweep(panel, grid, repeats, K, seed, Recipe{}, opts);
        }
        return to_json(table).dump();
      },
      py::arg("panel"), py::arg("specs"), py::arg("repeats") = 15, py::arg("K") = 1, py::arg("seed") = 0,
      py::arg("jobs") = 1);

  m.def(
      "run_experiment",
      [](const std::string& config_text, std::optional<std::string> outputs) {
        ExperimentConfig config = parse_experiment_config(config_text);
        if (outputs) config.outputs = *outputs;
        RunResult result;
        {
          py::gil_scoped_release release;
          result = run(config);
        }
        std::vector<std::string> artifacts;
        for (const auto& a : result.artifacts) artifacts.push_back(a.string());
        return py::dict(py::arg("manifest") = result.manifest.string(), py::arg("artifacts") = artifacts,
                        py::arg("exit_status") = result.exit_status);
      },
      py::arg("config_text"), py::arg("outputs") = py::none());

  m.def("config_hash", [](const std::string& text) { return config_hash(parse_experiment_config(text)); });
}
