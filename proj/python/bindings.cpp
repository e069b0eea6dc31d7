#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hydrob/harness.hpp"
#include "hydrob/io.hpp"

namespace py = pybind11;
using namespace hydrob;

namespace {

// Physical samples of a scalar field, shape (n1, n2, ny); n2 = 1 when d_h = 1.
py::array_t<double> physical_array(const SpectralField& f, int comp) {
  const auto p = to_physical(f.slice(comp, 1));
  const Grid& g = f.grid();
  py::array_t<double> out({g.n1(), g.n2(), g.ny()});
  std::copy(p.values().begin(), p.values().end(), out.mutable_data());
  return out;
}

SpectralField from_array(const Grid& grid, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (static_cast<std::size_t>(a.size()) != grid.size())
    throw std::invalid_argument("sample array does not match the grid size");
  return to_spectral(grid, 1, std::span<const double>(a.data(), grid.size()));
}

}  // namespace

PYBIND11_MODULE(_hydrob, m) {
  m.doc() = "Hydrostatic Oldroyd-B thin-strip solver";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<WeightOverflowError>(m, "WeightOverflowError", PyExc_OverflowError);

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, int, int, double>(), py::arg("dh"), py::arg("nh"), py::arg("ny"),
           py::arg("lh") = 2.0 * std::numbers::pi)
      .def_property_readonly("horizontal_dims", &Grid::horizontal_dims)
      .def_property_readonly("nh", &Grid::nh)
      .def_property_readonly("ny", &Grid::ny)
      .def_property_readonly("lh", &Grid::lh)
      .def_property_readonly("shape", [](const Grid& g) { return py::make_tuple(g.n1(), g.n2(), g.ny()); });

  py::class_<MaterialParams>(m, "MaterialParams")
      .def(py::init<double, double>(), py::arg("theta"), py::arg("b"))
      .def_property_readonly("theta", &MaterialParams::theta)
      .def_property_readonly("b", &MaterialParams::b)
      .def_property_readonly("sigma", &MaterialParams::sigma);

  m.def("g1", &g1, py::arg("m"), py::arg("sigma"));
  m.def("g2", &g2, py::arg("m"), py::arg("sigma"));
  m.def("stress_closure", [](double q1, double q2, const MaterialParams& p) {
    const auto t = stress_closure({q1, q2}, p);
    return py::make_tuple(t.t13, t.t23);
  });
  m.def("stress_derived", [](double q1, double q2, double t13, double t23, const MaterialParams& p) {
    const auto d = stress_derived({q1, q2}, t13, t23, p);
    return py::make_tuple(d.t11, d.t22, d.t33, d.t12);
  });
  m.def("algebraic_oracle", [](double q1, double q2, const MaterialParams& p) {
    return algebraic_oracle({q1, q2}, p).as_array();
  }, "All six stresses (t11, t22, t33, t12, t13, t23) from the linear system.");

  m.def("anisotropic_norm", [](const Grid& g, py::array_t<double> samples, double s1, double s2, double r) {
    return anisotropic_norm(from_array(g, samples), NormSpec{s1, s2, r});
  }, py::arg("grid"), py::arg("samples"), py::arg("s1") = 0.0, py::arg("s2") = 0.0, py::arg("r") = 0.0);
  m.def("derivative", [](const Grid& g, py::array_t<double> samples, const std::string& axis, int order) {
    const Axis ax = axis == "x1" ? Axis::X1 : axis == "x2" ? Axis::X2 : axis == "y" ? Axis::Y
        : throw std::invalid_argument("axis must be x1, x2 or y");
    return physical_array(derivative(from_array(g, samples), ax, order), 0);
  }, py::arg("grid"), py::arg("samples"), py::arg("axis"), py::arg("order") = 1);
  m.def("dealias", [](const Grid& g, py::array_t<double> samples) {
    return physical_array(dealias(from_array(g, samples)), 0);
  });

  m.def("fit_rate", [](std::vector<double> eps, std::vector<double> err) {
    const auto f = fit_rate(eps, err);
    return py::dict(py::arg("slope") = f.slope, py::arg("intercept") = f.intercept,
                    py::arg("residual") = f.residual);
  });
  m.def("relaxation_decay_error", [](const Grid& g, double eps, double t_final, int steps,
                                     const MaterialParams& p, std::uint64_t seed) {
    return relaxation_decay_error(g, eps, t_final, steps, p, seed);
  }, py::arg("grid"), py::arg("eps"), py::arg("t_final"), py::arg("steps"), py::arg("material"),
     py::arg("seed") = 1);

  m.def("default_config", [] { return serialize_config(RunConfig{}); },
        "Default configuration as INI text.");
  m.def("normalize_config", [](const std::string& text, const std::string& mode) {
    return serialize_config(load_config(text, parse_mode(mode)));
  }, "Validates INI text for a mode and returns it with defaults filled in.");
  m.def("execute", [](const std::string& text, const std::string& mode, const std::string& out) {
    const auto config = parse_config(text);
    ExecuteResult r;
    {
      py::gil_scoped_release release;
      r = execute(config, parse_mode(mode), out);
    }
    return py::make_tuple(r.exit_code, r.summary, r.message);
  }, py::arg("config_text"), py::arg("mode"), py::arg("out_dir"),
     "Runs a mode, writes its artifacts, returns (exit_code, summary_json, message).");
  m.def("limit_final_velocity", [](const std::string& text) {
    const auto config = load_config(text, Mode::Limit);
    LimitRun run;
    {
      py::gil_scoped_release release;
      run = run_limit(config);
    }
    return physical_array(run.final_state->u, 0);
  }, "First horizontal velocity component at t_final, shape (n1, n2, ny).");

  m.attr("__version__") = std::string(version());
}
