// Python bindings for the estimation core.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "excursion/design.hpp"
#include "excursion/error.hpp"
#include "excursion/estimator.hpp"
#include "excursion/experiment.hpp"
#include "excursion/gaussian.hpp"
#include "excursion/measure.hpp"
#include "excursion/mvn.hpp"
#include "excursion/oracles.hpp"

namespace py = pybind11;
using namespace excursion;

namespace {

py::dict report_dict(const EstimateReport& r) {
  py::dict d;
  d["target"] = target_name(r.target);
  d["b"] = r.level;
  d["estimate"] = r.estimate;
  d["std_err"] = r.std_error;
  d["log_estimate"] = r.log_estimate;
  d["n"] = r.n;
  d["m"] = r.m;
  d["seed"] = r.seed;
  d["wall_time_ms"] = r.wall_time_ms;
  d["errored_replicates"] = r.errored;
  d["required_replicates"] = r.required_replicates;
  return d;
}

PointSet to_points(const Eigen::MatrixXd& pts) {
  PointSet out(static_cast<std::size_t>(pts.cols()));
  std::vector<double> row(out.dim());
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    for (Eigen::Index j = 0; j < pts.cols(); ++j) row[static_cast<std::size_t>(j)] = pts(i, j);
    out.push_back(row);
  }
  return out;
}

ConfigPairs to_pairs(const py::dict& overrides) {
  ConfigPairs out;
  for (const auto& [k, v] : overrides) out[py::str(k)] = py::str(v);
  return out;
}

ExperimentConfig resolve(const std::string& source, const py::dict& overrides) {
  ConfigPairs pairs = is_preset(source) ? preset_pairs(source) : load_config_file(source);
  for (auto& [k, v] : to_pairs(overrides)) pairs[k] = v;
  return build_config(pairs);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rare-event estimation for Gaussian random field excursions";

  auto base = py::register_exception<Error>(m, "ExcursionError", PyExc_RuntimeError);
  py::register_exception<ConfigurationError>(m, "ConfigurationError", base.ptr());
  py::register_exception<InvalidLevelError>(m, "InvalidLevelError", base.ptr());
  py::register_exception<NoHitError>(m, "NoHitError", base.ptr());
  py::register_exception<ReplicateFailureError>(m, "ReplicateFailureError", base.ptr());

  py::class_<FieldModel>(m, "FieldModel")
      .def_property_readonly("dim", &FieldModel::dim)
      .def_property_readonly("lower", [](const FieldModel& f) { return f.domain().lower(); })
      .def_property_readonly("upper", [](const FieldModel& f) { return f.domain().upper(); })
      .def("mean", [](const FieldModel& f, const std::vector<double>& t) { return f.mean(t); })
      .def("sd", [](const FieldModel& f, const std::vector<double>& t) { return f.sd(t); })
      .def("covariance", [](const FieldModel& f, const std::vector<double>& s, const std::vector<double>& t) {
        return f.covariance(s, t);
      });

  m.def(
      "make_field",
      [](const std::string& kernel, std::vector<double> lower, std::vector<double> upper, double length, double power,
         double mean_intercept, std::vector<double> mean_slope) {
        return make_field(BoxDomain(std::move(lower), std::move(upper)),
                          KernelSpec{parse_kernel_kind(kernel), length, power}, MeanSpec{mean_intercept, mean_slope});
      },
      py::arg("kernel"), py::arg("lower"), py::arg("upper"), py::arg("length") = 1.0, py::arg("power") = 2.0,
      py::arg("mean_intercept") = 0.0, py::arg("mean_slope") = std::vector<double>{},
      "Unit-variance field with a built-in kernel (sqexp, exp, powexp, cosine) and an affine mean.");

  m.def("gaussian_tail", &gaussian_tail, py::arg("x"));
  m.def("log_gaussian_tail", &log_gaussian_tail, py::arg("x"));
  m.def("gamma_level", &gamma_level, py::arg("b"));
  m.def("cosine_truth", &cosine_truth, py::arg("b"));
  m.def("cosine_grid_truth", &cosine_grid_truth, py::arg("b"), py::arg("points"));
  m.def("pickands_estimate", &pickands_estimate, py::arg("alpha"), py::arg("b"), py::arg("w_hat"));

  m.def(
      "cov_matrix", [](const FieldModel& f, const Eigen::MatrixXd& points) { return cov_matrix(f, to_points(points)); },
      py::arg("model"), py::arg("points"), "Covariance over the rows of an (n, d) point array.");
  m.def(
      "normalizing_integral", [](const FieldModel& f, double level) { return normalizing_integral(f, level).log_value; },
      py::arg("model"), py::arg("level"), "log of the integral of P(f(t) > level) over the domain.");
  m.def("expected_excursion_measure", &expected_excursion_measure, py::arg("model"), py::arg("b"));
  m.def(
      "cluster_scale",
      [](const FieldModel& f, double b) {
        const ScaleFactors s = cluster_scale(f, b);
        return py::dict(py::arg("correlation") = s.correlation, py::arg("variance") = s.variance,
                        py::arg("zeta") = s.zeta);
      },
      py::arg("model"), py::arg("b"));
  m.def("choose_m", &choose_m, py::arg("eps"), py::arg("model"), py::arg("lam") = 1.0);

  m.def(
      "estimate",
      [](const FieldModel& f, double b, std::size_t n, std::optional<std::size_t> design_size, std::uint64_t seed,
         unsigned workers, std::optional<double> xi, std::optional<double> nu, std::optional<double> scale,
         const std::string& tau_method) {
        const DesignDensity fallback = default_design_density(f.dim());
        DesignDensity density(f.dim(), nu.value_or(fallback.dof()), scale.value_or(fallback.scale()));
        const std::size_t m_design = design_size.value_or(f.dim() == 1 ? 20 : 40);
        if (tau_method != "rejection" && tau_method != "grid") {
          throw ConfigurationError("tau_method must be 'rejection' or 'grid'");
        }
        const TauMethod method = tau_method == "grid" ? TauMethod::GridInversion : TauMethod::Rejection;
        std::optional<IntegrandSpec> integrand;
        if (xi) integrand = IntegrandSpec::constant(*xi);
        LevelEstimate est;
        {
          py::gil_scoped_release release;
          const LevelSetup setup(f, b, m_design, density, method);
          RunOptions opt;
          opt.n = n;
          opt.seed = seed;
          opt.workers = workers;
          est = estimate_level(setup, opt, integrand ? &*integrand : nullptr);
        }
        py::dict out;
        out["tail"] = report_dict(est.tail);
        if (est.integral) out["integral"] = report_dict(*est.integral);
        if (est.conditional) out["conditional"] = report_dict(*est.conditional);
        return out;
      },
      py::arg("model"), py::arg("b"), py::arg("n") = 1000, py::arg("m") = py::none(), py::arg("seed") = 1,
      py::arg("workers") = 0, py::arg("xi") = py::none(), py::arg("nu") = py::none(), py::arg("scale") = py::none(),
      py::arg("tau_method") = "rejection",
      "Tail probability P(sup f > b) and, with a constant integrand xi, the excursion integral and\n"
      "its conditional expectation given the exceedance.");

  m.def(
      "crude_grid_mc",
      [](const FieldModel& f, double b, std::size_t grid_per_axis, std::size_t n, std::uint64_t seed) {
        Rng rng = make_stream(seed, 0);
        return report_dict(crude_grid_mc(f, b, grid_per_axis, n, rng));
      },
      py::arg("model"), py::arg("b"), py::arg("grid_per_axis"), py::arg("n"), py::arg("seed") = 1);

  m.def(
      "run_table",
      [](const std::string& source, const py::dict& overrides) {
        const ExperimentConfig c = resolve(source, overrides);
        std::vector<TableRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_table(c);
        }
        py::list out;
        for (const TableRow& r : rows) {
          py::dict d = report_dict(r.report);
          d["true_value"] = r.truth ? py::cast(*r.truth) : py::none();
          d["config_digest"] = c.digest();
          out.append(d);
        }
        return out;
      },
      py::arg("source"), py::arg("overrides") = py::dict(),
      "Run a preset (table1..table4) or a config file; overrides are key = value settings.");

  m.def(
      "run_pickands",
      [](const py::dict& overrides) {
        const ExperimentConfig c = resolve("pickands", overrides);
        std::vector<PickandsRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_pickands(c);
        }
        py::list out;
        for (const PickandsRow& r : rows) {
          py::dict d = report_dict(r.tail);
          d["alpha"] = r.alpha;
          d["H_hat"] = r.estimate;
          d["H_std_err"] = r.std_error;
          out.append(d);
        }
        return out;
      },
      py::arg("overrides") = py::dict());
}
