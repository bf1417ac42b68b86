#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fpqmc/ensemble.hpp"
#include "fpqmc/errors.hpp"
#include "fpqmc/morton.hpp"
#include "fpqmc/normal.hpp"
#include "fpqmc/scenarios.hpp"
#include "fpqmc/simulation.hpp"
#include "fpqmc/sobol.hpp"
#include "fpqmc/stats.hpp"

namespace py = pybind11;
using namespace fpqmc;

namespace {

py::array_t<double> sobol_points(std::size_t n, std::size_t dims, std::uint64_t start) {
  SobolGenerator gen(dims);
  gen.seek(start);
  py::array_t<double> out({n, dims});
  gen.next_block(n, std::span<double>(out.mutable_data(), n * dims));
  return out;
}

py::dict moments_dict(py::array_t<double, py::array::c_style | py::array::forcecast> v) {
  if (v.ndim() != 2 || v.shape(1) != 3) throw py::value_error("velocities must have shape (n, 3)");
  std::vector<Vec3> vel(v.shape(0));
  auto r = v.unchecked<2>();
  for (py::ssize_t i = 0; i < v.shape(0); ++i) vel[i] = {r(i, 0), r(i, 1), r(i, 2)};
  const CellMoments m = compute_moments(vel);
  py::dict d;
  d["count"] = m.count;
  d["mean"] = m.mean;
  d["energy"] = m.energy;
  d["stress"] = m.stress;
  d["heat_flux"] = m.heat_flux;
  return d;
}

// (repetitions, steps, cells, quantities)
py::array_t<double> run(const ScenarioConfig& c, unsigned workers) {
  std::vector<MomentSeries> runs;
  {
    py::gil_scoped_release release;
    runs = run_scenario(c, workers);
  }
  py::array_t<double> out({runs.size(), c.steps, c.cells, kQuantityCount});
  double* p = out.mutable_data();
  for (const auto& s : runs) p = std::copy(s.values.begin(), s.values.end(), p);
  return out;
}

py::list uniform_demo(const std::vector<std::size_t>& particles, std::size_t reps, std::uint64_t seed,
                      const std::string& window) {
  std::vector<ConvergenceRecord> recs;
  const FitWindow w = parse_fit_window(window);
  {
    py::gil_scoped_release release;
    recs = run_uniform_demo(particles, reps, seed, w);
  }
  py::list out;
  for (const auto& r : recs) {
    py::dict d;
    d["strategy"] = r.strategy;
    d["quantity"] = r.quantity;
    d["points"] = r.points;
    d["slope"] = r.fitted ? py::cast(r.slope) : py::none();
    d["exact"] = r.exact;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = "0.1.0";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<StaleReferenceError>(m, "StaleReferenceError", PyExc_RuntimeError);

  py::list names;
  for (std::size_t q = 0; q < kQuantityCount; ++q) names.append(std::string(quantity_name(q)));
  m.attr("QUANTITIES") = py::tuple(names);

  m.def("strategies", [] {
    std::vector<std::string> out;
    for (Strategy s : all_strategies()) out.emplace_back(strategy_name(s));
    return out;
  });

  m.def("sobol_points", &sobol_points, py::arg("n"), py::arg("dims") = 3, py::arg("start") = 0,
        "Unshifted Sobol' points with indices start .. start + n - 1.");
  m.def("inverse_normal_cdf", py::vectorize(&inverse_normal_cdf), py::arg("u"));
  m.def("morton_interleave", &morton_interleave, py::arg("ix"), py::arg("iy"), py::arg("iz"));
  m.def("morton_deinterleave", &morton_deinterleave, py::arg("key"));
  m.def("compute_moments", &moments_dict, py::arg("velocities"));
  m.def(
      "fit_slope",
      [](const std::vector<std::pair<double, double>>& points) { return fit_slope(points).slope; },
      py::arg("points"), "Least-squares slope of log2(error) against log2(N).");

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_property_readonly("scenario", [](const ScenarioConfig& c) { return std::string(scenario_name(c.id)); })
      .def_property(
          "strategy", [](const ScenarioConfig& c) { return std::string(strategy_name(c.strategy)); },
          [](ScenarioConfig& c, const std::string& s) { c.strategy = parse_strategy(s); })
      .def_readwrite("particles", &ScenarioConfig::particles)
      .def_readwrite("repetitions", &ScenarioConfig::repetitions)
      .def_readwrite("steps", &ScenarioConfig::steps)
      .def_readwrite("cells", &ScenarioConfig::cells)
      .def_readwrite("dt", &ScenarioConfig::dt)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("upper_wall_velocity", &ScenarioConfig::upper_wall_velocity)
      .def_readwrite("upper_wall_temperature", &ScenarioConfig::upper_wall_temperature)
      .def("validate", &ScenarioConfig::validate)
      .def("canonical", &ScenarioConfig::canonical);

  m.def(
      "default_config", [](const std::string& name) { return default_config(parse_scenario(name)); },
      py::arg("scenario"));
  m.def("run_scenario", &run, py::arg("config"), py::arg("workers") = 0,
        "Scaled moments as an array of shape (repetitions, steps, cells, quantities).");
  m.def("run_uniform_demo", &uniform_demo, py::arg("particles"), py::arg("repetitions"), py::arg("seed") = 1,
        py::arg("window") = "full");
}
