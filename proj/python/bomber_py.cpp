#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bomber/model.hpp"
#include "bomber/montecarlo.hpp"
#include "bomber/solver.hpp"
#include "bomber/verify.hpp"

namespace py = pybind11;
using namespace bomber;

namespace {

py::array_t<double> field_as_array(const solver::SolutionGrid& g,
                                   const std::vector<double>& field) {
  const auto nx = static_cast<py::ssize_t>(g.spec().nx);
  const auto nt = static_cast<py::ssize_t>(g.spec().nt);
  // Row j is the t_j slice over all x.
  return py::array_t<double>({nt, nx}, field.data());
}

}  // namespace

PYBIND11_MODULE(_bomber, m) {
  m.doc() = "Bomber Problem: closed-form K/P in R1/R2, integral-equation "
            "grid solver, verification checks, Monte Carlo simulation";

  py::register_exception<unsupported_region_error>(m, "UnsupportedRegionError",
                                                   PyExc_ValueError);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<double>(), py::arg("u"))
      .def_property_readonly("u", &ModelParams::u)
      .def_property_readonly("v", &ModelParams::v);

  py::class_<State>(m, "State")
      .def(py::init<double, double>(), py::arg("x"), py::arg("t"))
      .def_readonly("x", &State::x)
      .def_readonly("t", &State::t);

  py::enum_<Region>(m, "Region")
      .value("R1", Region::R1)
      .value("R2", Region::R2)
      .value("Outside", Region::Outside);

  py::class_<QuadratureConfig>(m, "QuadratureConfig")
      .def(py::init<>())
      .def_readwrite("abs_tol", &QuadratureConfig::abs_tol)
      .def_readwrite("rel_tol", &QuadratureConfig::rel_tol)
      .def_readwrite("max_subdivisions", &QuadratureConfig::max_subdivisions);

  // model
  m.def("survival_kernel", &model::survival_kernel, py::arg("y"),
        py::arg("params"));
  m.def("boundary_f", &model::boundary_f, py::arg("t"), py::arg("params"));
  m.def("boundary_f_inverse", &model::boundary_f_inverse, py::arg("x"),
        py::arg("params"));
  m.def("classify_region", &model::classify_region, py::arg("state"),
        py::arg("params"));
  m.def("closed_form_K", &model::closed_form_K, py::arg("state"),
        py::arg("params"));
  m.def("closed_form_P", &model::closed_form_P, py::arg("state"),
        py::arg("params"), py::arg("quad") = QuadratureConfig{});
  m.def("unimodal_argmax", &model::unimodal_argmax, py::arg("x"),
        py::arg("B"));
  m.def("g1", &model::g1, py::arg("y"), py::arg("s"), py::arg("x"),
        py::arg("params"));
  m.def("q_integrand", &model::q_integrand, py::arg("y"), py::arg("s"),
        py::arg("params"));
  m.def("q2", &model::q2, py::arg("y"), py::arg("s"), py::arg("params"),
        py::arg("quad") = QuadratureConfig{});

  // solver
  py::enum_<solver::Scheme>(m, "Scheme")
      .value("Euler", solver::Scheme::Euler)
      .value("RK4", solver::Scheme::RK4);

  py::class_<solver::GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_readwrite("x_max", &solver::GridSpec::x_max)
      .def_readwrite("t_max", &solver::GridSpec::t_max)
      .def_readwrite("nx", &solver::GridSpec::nx)
      .def_readwrite("nt", &solver::GridSpec::nt)
      .def_readwrite("scheme", &solver::GridSpec::scheme)
      .def_property_readonly("dx", &solver::GridSpec::dx)
      .def_property_readonly("dt", &solver::GridSpec::dt);

  py::class_<solver::SolutionGrid>(m, "SolutionGrid")
      .def_property_readonly("spec", &solver::SolutionGrid::spec)
      .def("pbar",
           [](const solver::SolutionGrid& g) {
             return field_as_array(g, g.pbar());
           },
           "pbar values, shape (nt, nx)")
      .def("kstar",
           [](const solver::SolutionGrid& g) {
             return field_as_array(g, g.kstar());
           },
           "recorded maximizers, shape (nt, nx)")
      .def("x_node", &solver::SolutionGrid::x_node)
      .def("t_node", &solver::SolutionGrid::t_node);

  m.def("solve_integral_equation", &solver::solve_integral_equation,
        py::arg("params"), py::arg("spec"));
  m.def(
      "inner_max",
      [](double x, const std::function<double(double)>& slice,
         const ModelParams& p, int scan_points) {
        const auto r = solver::inner_max(x, slice, p, scan_points);
        return py::make_tuple(r.y, r.value);
      },
      py::arg("x"), py::arg("pbar_slice"), py::arg("params"),
      py::arg("scan_points") = 129);
  m.def("numeric_P", &solver::numeric_P, py::arg("grid"), py::arg("state"));
  m.def("numeric_K", &solver::numeric_K, py::arg("grid"), py::arg("state"));
  m.def(
      "interpolate",
      [](const std::vector<double>& values, double dx, double xq, bool linear) {
        return solver::interpolate(values, dx, xq,
                                   linear ? solver::InterpKind::Linear
                                          : solver::InterpKind::MonotoneCubic);
      },
      py::arg("values"), py::arg("dx"), py::arg("x_query"),
      py::arg("linear") = false);

  // verify
  py::class_<verify::ResidualReport>(m, "ResidualReport")
      .def_readonly("lhs", &verify::ResidualReport::lhs)
      .def_readonly("rhs", &verify::ResidualReport::rhs)
      .def_readonly("residual", &verify::ResidualReport::residual);

  m.def(
      "residual_check",
      [](const std::function<double(double, double)>& P_fn, const State& s,
         const ModelParams& p, const QuadratureConfig& quad) {
        return verify::residual_check(
            [&](const State& q) { return P_fn(q.x, q.t); }, s, p, quad);
      },
      py::arg("P_fn"), py::arg("state"), py::arg("params"),
      py::arg("quad") = QuadratureConfig{});

  py::class_<verify::BoundaryEstimate>(m, "BoundaryEstimate")
      .def_readonly("t", &verify::BoundaryEstimate::t)
      .def_readonly("x_detected", &verify::BoundaryEstimate::x_detected)
      .def_readonly("x_analytic", &verify::BoundaryEstimate::x_analytic)
      .def_readonly("gap", &verify::BoundaryEstimate::gap);

  m.def("boundary_detect", &verify::boundary_detect, py::arg("grid"),
        py::arg("t"), py::arg("tol"));

  // montecarlo
  py::class_<montecarlo::Policy>(m, "Policy")
      .def_static("closed_form", &montecarlo::Policy::closed_form,
                  py::arg("fallback") = nullptr, py::keep_alive<0, 1>())
      .def_static("grid_interpolated", &montecarlo::Policy::grid_interpolated,
                  py::arg("grid"), py::keep_alive<0, 1>())
      .def_static("spend_all", &montecarlo::Policy::spend_all)
      .def_static("fractional", &montecarlo::Policy::fractional, py::arg("c"))
      .def("allocation", &montecarlo::Policy::allocation, py::arg("state"),
           py::arg("params"));

  py::class_<montecarlo::SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("n_runs", &montecarlo::SimConfig::n_runs)
      .def_readwrite("seed", &montecarlo::SimConfig::seed)
      .def_readwrite("n_streams", &montecarlo::SimConfig::n_streams);

  py::class_<montecarlo::SimResult>(m, "SimResult")
      .def_readonly("p_hat", &montecarlo::SimResult::p_hat)
      .def_readonly("std_err", &montecarlo::SimResult::std_err)
      .def_readonly("n_runs", &montecarlo::SimResult::n_runs);

  py::class_<montecarlo::RngStream>(m, "RngStream")
      .def(py::init<uint64_t, uint64_t, uint64_t>(), py::arg("seed"),
           py::arg("stream"), py::arg("run"))
      .def("next_unit", &montecarlo::RngStream::next_unit)
      .def("next_exponential", &montecarlo::RngStream::next_exponential);

  m.def(
      "simulate_mission",
      [](const montecarlo::Policy& pol, const State& s0, const ModelParams& p,
         montecarlo::RngStream& rng) {
        return montecarlo::simulate_mission(pol, s0, p, rng);
      },
      py::arg("policy"), py::arg("state"), py::arg("params"), py::arg("rng"));
  m.def("estimate_survival", &montecarlo::estimate_survival, py::arg("policy"),
        py::arg("state"), py::arg("params"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
}
