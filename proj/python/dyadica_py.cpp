#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <bit>

#include "dyadica/analysis.hpp"
#include "dyadica/cli.hpp"
#include "dyadica/errors.hpp"
#include "dyadica/fracops.hpp"
#include "dyadica/haar.hpp"
#include "dyadica/paracomm.hpp"
#include "dyadica/weights.hpp"

namespace py = pybind11;
using namespace dyadica;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Axis axis_for(py::ssize_t n) {
  if (n < 2 || !std::has_single_bit(static_cast<std::size_t>(n))) {
    throw ShapeError("axis length must be a power of two >= 2, got " + std::to_string(n));
  }
  return Axis(std::countr_zero(static_cast<std::size_t>(n)));
}

GridFunction to_grid(const Array& a) {
  std::vector<double> v(a.data(), a.data() + a.size());
  if (a.ndim() == 1) return GridFunction(axis_for(a.shape(0)), std::move(v));
  if (a.ndim() == 2) return GridFunction(axis_for(a.shape(0)), axis_for(a.shape(1)), std::move(v));
  throw ShapeError("expected a 1-D or 2-D array");
}

Array to_array(const GridFunction& f) {
  std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(f.extent(0))};
  if (f.dims() == 2) shape.push_back(static_cast<py::ssize_t>(f.extent(1)));
  Array out(shape);
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

SystemPair pair_for(const GridFunction& f, std::size_t offset1, std::size_t offset2) {
  if (f.dims() != 2) throw ShapeError("expected a 2-D array");
  return {DyadicSystem(f.axis(0), offset1), DyadicSystem(f.axis(1), offset2)};
}

}  // namespace

PYBIND11_MODULE(_dyadica, m) {
  m.doc() = "Dyadic harmonic analysis on the discretized torus";
  m.attr("__version__") = kVersion;

  // Later registrations are tried first, so the base class goes first.
  py::register_exception<Error>(m, "DyadicaError", PyExc_RuntimeError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<ConfigurationError>(m, "ConfigurationError", PyExc_ValueError);

  m.def(
      "haar_forward",
      [](const Array& values, std::size_t offset) {
        const GridFunction f = to_grid(values);
        return to_array(haar_forward(f.values(), DyadicSystem(f.axis(), offset)));
      },
      py::arg("values"), py::arg("offset") = 0,
      "Haar coefficients of a 1-D cell-average array; slot 0 holds the mean.");
  m.def(
      "haar_inverse",
      [](const Array& coefficients, std::size_t offset) {
        const GridFunction c = to_grid(coefficients);
        return to_array(haar_inverse(c.values(), DyadicSystem(c.axis(), offset)));
      },
      py::arg("coefficients"), py::arg("offset") = 0);

  m.def(
      "frac_integral", [](const Array& f, double lambda) { return to_array(frac_integral(to_grid(f), lambda)); },
      py::arg("f"), py::arg("lam"), "Periodic fractional integral of a 1-D array.");
  m.def(
      "partial_frac_integral",
      [](const Array& f, double lambda, int axis) { return to_array(partial_frac_integral(to_grid(f), lambda, axis)); },
      py::arg("f"), py::arg("lam"), py::arg("axis"));
  m.def(
      "frac_maximal",
      [](const Array& f, double lambda, std::size_t offset) {
        const GridFunction g = to_grid(f);
        return to_array(frac_maximal(g, DyadicSystem(g.axis(), offset), lambda));
      },
      py::arg("f"), py::arg("lam"), py::arg("offset") = 0);
  m.def(
      "dyadic_maximal",
      [](const Array& f, std::size_t offset) {
        const GridFunction g = to_grid(f);
        return to_array(dyadic_maximal(g, DyadicSystem(g.axis(), offset)));
      },
      py::arg("f"), py::arg("offset") = 0);
  m.def(
      "strong_maximal", [](const Array& f) { return to_array(strong_maximal(to_grid(f))); }, py::arg("f"));
  m.def(
      "square_function",
      [](const Array& f, std::size_t offset) {
        const GridFunction g = to_grid(f);
        return to_array(square_function(g, DyadicSystem(g.axis(), offset)));
      },
      py::arg("f"), py::arg("offset") = 0);

  m.def(
      "exponent_solve",
      [](double p, double lambda) {
        const ExponentTriple t = exponent_solve(p, lambda);
        return py::make_tuple(t.p, t.q);
      },
      py::arg("p"), py::arg("lam"), "Returns (p, q) with 1/q = lam - 1 + 1/p.");
  m.def(
      "power_weight",
      [](int level, double alpha, double center) { return to_array(power_weight(Axis(level), alpha, center).base()); },
      py::arg("level"), py::arg("alpha"), py::arg("center") = 0.5);
  m.def(
      "ap_characteristic", [](const Array& w, double p) { return ap_characteristic(Weight(to_grid(w)), p); },
      py::arg("w"), py::arg("p"));
  m.def(
      "apq_characteristic",
      [](const Array& w, double p, double q) { return apq_characteristic(Weight(to_grid(w)), p, q); }, py::arg("w"),
      py::arg("p"), py::arg("q"));

  m.def(
      "paraproduct",
      [](const std::string& tag, const Array& b, const Array& f, std::size_t offset1, std::size_t offset2) {
        const GridFunction bb = to_grid(b);
        return to_array(paraproduct(para_tag_from_string(tag), bb, to_grid(f), pair_for(bb, offset1, offset2)));
      },
      py::arg("tag"), py::arg("b"), py::arg("f"), py::arg("offset1") = 0, py::arg("offset2") = 0,
      "Tags A1..A8 and W.");
  m.def(
      "decompose_product",
      [](const Array& b, const Array& f, std::size_t offset1, std::size_t offset2) {
        const GridFunction bb = to_grid(b);
        const DecompositionReport r = decompose_product(bb, to_grid(f), pair_for(bb, offset1, offset2));
        py::dict parts;
        for (ParaTag t : kParaTags) parts[to_string(t)] = to_array(r.part(t));
        py::dict out;
        out["parts"] = parts;
        out["corrections"] = to_array(r.corrections);
        out["residual"] = r.residual;
        out["scale"] = r.scale;
        return out;
      },
      py::arg("b"), py::arg("f"), py::arg("offset1") = 0, py::arg("offset2") = 0);
  m.def(
      "commutator",
      [](const Array& b, const Array& f, double lambda1, double lambda2) {
        return to_array(commutator(to_grid(b), to_grid(f), CommutatorSpec::iterated(lambda1, lambda2)));
      },
      py::arg("b"), py::arg("f"), py::arg("lam1"), py::arg("lam2"), "Iterated commutator [I1, [b, I2]] f.");
  m.def(
      "inner_commutator",
      [](const Array& b, const Array& f, double lambda) {
        return to_array(commutator(to_grid(b), to_grid(f), CommutatorSpec::inner(lambda)));
      },
      py::arg("b"), py::arg("f"), py::arg("lam"), "b I f - I(b f), along axis 1 for 2-D input.");

  m.def(
      "run_checks",
      [](const std::string& config_json) {
        const ExperimentConfig c = parse_config(config_json);
        Report r;
        {
          py::gil_scoped_release release;
          r = run_checks(c);
        }
        return report_json(r);
      },
      py::arg("config_json"), "Runs a suite from a JSON config and returns the report as JSON text.");
}
