#include <optional>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "critp/error.hpp"
#include "critp/functional.hpp"
#include "critp/mesh.hpp"
#include "critp/nehari.hpp"
#include "critp/optimizer.hpp"
#include "critp/verify.hpp"

namespace py = pybind11;
using namespace critp;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

GridFunction to_field(const Mesh& mesh, const Array& values) {
  if (values.ndim() != 1) throw Error(ErrorKind::Dimension, "expected a 1-D array");
  const double* data = values.data();
  return GridFunction(mesh, std::vector<double>(data, data + values.size()));
}

Array to_array(const GridFunction& u) {
  Array out(static_cast<py::ssize_t>(u.size()));
  std::copy(u.values().begin(), u.values().end(), out.mutable_data());
  return out;
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["set"] = to_string(r.k);
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["energy"] = r.energy;
  d["constraint_residual_pos"] = r.constraint_residual_pos;
  d["constraint_residual_neg"] = r.constraint_residual_neg;
  d["max_iterate_constraint_residual"] = r.max_iterate_constraint_residual;
  d["projected_residual"] = r.projected_residual;
  d["threshold"] = r.threshold;
  d["below_threshold"] = r.below_threshold;
  d["energy_history"] = r.energy_history;
  d["error"] = r.error;
  return d;
}

py::dict check_dict(const CheckReport& c) {
  py::dict d;
  d["name"] = c.name;
  d["passed"] = c.passed();
  py::list items;
  for (const auto& m : c.measurements) {
    py::dict item;
    item["name"] = m.name;
    item["value"] = m.value;
    item["tolerance"] = m.tolerance;
    item["ok"] = m.ok();
    items.append(item);
  }
  d["measurements"] = items;
  return d;
}

KIndex to_kindex(int k) {
  if (k < 1 || k > 3) throw Error(ErrorKind::Config, "set index must be 1, 2 or 3");
  return static_cast<KIndex>(k);
}

Part to_part(int which) {
  if (which != 1 && which != 2) throw Error(ErrorKind::Config, "which must be 1 or 2");
  return static_cast<Part>(which);
}

}  // namespace

PYBIND11_MODULE(_critp, m) {
  m.doc() = "Sign-restricted Nehari descent for the critical p-Laplace energy";

  static py::exception<Error> error(m, "CritpError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<Mesh>(m, "Mesh")
      .def_property_readonly("dimension", &Mesh::dimension)
      .def_property_readonly("resolution", &Mesh::resolution)
      .def_property_readonly("num_vertices", &Mesh::num_vertices)
      .def_property_readonly("num_simplices", &Mesh::num_simplices)
      .def("coords", [](const Mesh& mesh) {
        py::array_t<double> out({static_cast<py::ssize_t>(mesh.num_vertices()),
                                 static_cast<py::ssize_t>(mesh.dimension())});
        auto view = out.mutable_unchecked<2>();
        for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
          auto x = mesh.coords(v);
          for (int d = 0; d < mesh.dimension(); ++d) view(v, d) = x[d];
        }
        return out;
      })
      .def("boundary", [](const Mesh& mesh) {
        py::array_t<bool> out(static_cast<py::ssize_t>(mesh.num_vertices()));
        auto view = out.mutable_unchecked<1>();
        for (std::size_t v = 0; v < mesh.num_vertices(); ++v) view(v) = mesh.is_boundary(v);
        return out;
      })
      .def("integrate", [](const Mesh& mesh, const Array& values) {
        return integrate(mesh, {values.data(), static_cast<std::size_t>(values.size())});
      });
  m.def("build_mesh", &build_mesh, py::arg("dim"), py::arg("res"));

  py::class_<RunParameters>(m, "RunParameters")
      .def(py::init([](double p, int dim, double lambda, double eps) {
             RunParameters params{p, dim, lambda, eps};
             params.validate();
             return params;
           }),
           py::arg("p") = 2.0, py::arg("dim") = 3, py::arg("lam") = 50.0,
           py::arg("eps") = 1e-8)
      .def_readwrite("p", &RunParameters::p)
      .def_readwrite("dimension", &RunParameters::dimension)
      .def_readwrite("lam", &RunParameters::lambda)
      .def_readwrite("eps", &RunParameters::eps)
      .def_property_readonly("critical_exponent", &RunParameters::critical_exponent);

  py::class_<Nonlinearity>(m, "Nonlinearity")
      .def(py::init([](const std::string& family, double q, double r) {
             return Nonlinearity::with_default_constants(parse_family(family), q, r);
           }),
           py::arg("family") = "signed", py::arg("q") = 4.0, py::arg("r") = 4.0)
      .def_readonly("q", &Nonlinearity::q)
      .def_readonly("r", &Nonlinearity::r)
      .def_readonly("c1", &Nonlinearity::c1)
      .def_readonly("c3", &Nonlinearity::c3)
      .def_readonly("c4", &Nonlinearity::c4)
      .def_readonly("k2", &Nonlinearity::k2)
      .def("eval", [](const Nonlinearity& nl, double u) {
        const NonlinValue v = nl.eval(u);
        return py::make_tuple(v.f, v.F, v.f_u);
      });

  m.def("energy", [](const Mesh& mesh, const Nonlinearity& nl, const RunParameters& params,
                     const Array& u) { return energy(mesh, nl, params, to_field(mesh, u)); });
  m.def("energy_residual", [](const Mesh& mesh, const Nonlinearity& nl,
                              const RunParameters& params, const Array& u) {
    return to_array(energy_residual(mesh, nl, params, to_field(mesh, u)));
  });
  m.def("best_sobolev_constant", &best_sobolev_constant, py::arg("p"), py::arg("dim"));
  m.def("sobolev_threshold", &sobolev_threshold);

  m.def("scale_on_coefficients",
        [](double A, double B, double C, double p, double pstar, double q, double lambda,
           double c3) {
          const ScaleResult r = scale_on_coefficients({A, B, C}, p, pstar, q, lambda, c3);
          return py::make_tuple(r.t_lambda, r.t1_bracket);
        },
        py::arg("A"), py::arg("B"), py::arg("C"), py::arg("p"), py::arg("pstar"),
        py::arg("q"), py::arg("lam"), py::arg("c3") = 1.0);
  m.def("constraint_phi", [](const Mesh& mesh, const Nonlinearity& nl,
                             const RunParameters& params, const Array& u, int which) {
    return constraint_phi(mesh, nl, params, to_field(mesh, u), to_part(which));
  });
  m.def("scale_to_manifold", [](const Mesh& mesh, const Nonlinearity& nl,
                                const RunParameters& params, const Array& w, int which) {
    const ScaleResult r = scale_to_manifold(mesh, nl, params, to_field(mesh, w), to_part(which));
    return py::make_tuple(r.t_lambda, r.t1_bracket, r.relative_residual);
  });
  m.def("tangent_project", [](const Mesh& mesh, const Nonlinearity& nl,
                              const RunParameters& params, const Array& u, const Array& v,
                              int k) {
    return to_array(tangent_project(mesh, nl, params, to_field(mesh, u), to_field(mesh, v),
                                    to_kindex(k)));
  });
  m.def("initial_point", [](const Mesh& mesh, const Nonlinearity& nl,
                            const RunParameters& params, int k, std::uint64_t seed) {
    return to_array(initial_point(mesh, nl, params, to_kindex(k), seed));
  }, py::arg("mesh"), py::arg("nl"), py::arg("params"), py::arg("k"), py::arg("seed") = 0);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init([](const RunParameters& params, const Nonlinearity& nl, int res,
                       int max_iters, double grad_tol, double constraint_tol,
                       std::uint64_t seed) {
             SolverConfig c;
             c.params = params;
             c.nl = nl;
             c.resolution = res;
             c.max_iters = max_iters;
             c.grad_tol = grad_tol;
             c.constraint_tol = constraint_tol;
             c.seed = seed;
             c.validate();
             return c;
           }),
           py::arg("params"), py::arg("nl"), py::arg("res") = 8,
           py::arg("max_iters") = 5000, py::arg("grad_tol") = 1e-7,
           py::arg("constraint_tol") = 1e-10, py::arg("seed") = 0);

  m.def("solve_three", [](const SolverConfig& config) {
    const Mesh mesh = build_mesh(config.params.dimension, config.resolution);
    std::optional<SolutionTriple> solved;
    {
      py::gil_scoped_release release;
      solved.emplace(solve_three(mesh, config));
    }
    const SolutionTriple& t = *solved;
    py::dict d;
    d["u1"] = to_array(t.u1);
    d["u2"] = to_array(t.u2);
    d["u3"] = to_array(t.u3);
    d["reports"] = py::make_tuple(report_dict(t.r1), report_dict(t.r2), report_dict(t.r3));
    d["distinct"] = t.distinct;
    d["error"] = t.error;
    py::list checks;
    for (const CheckReport& c :
         verify_fields(mesh, config.nl, config.params, {t.u1, t.u2, t.u3},
                       {config.constraint_tol, 1e-9, 10.0 * config.grad_tol})) {
      checks.append(check_dict(c));
    }
    d["checks"] = checks;
    return d;
  });

  m.def("lambda_sweep", [](const SolverConfig& config, const std::vector<double>& lambdas,
                           bool solve) {
    std::vector<SweepRow> rows;
    {
      py::gil_scoped_release release;
      rows = lambda_sweep(config, lambdas, solve);
    }
    py::list out;
    for (const SweepRow& row : rows) {
      py::dict d;
      d["lambda"] = row.lambda;
      d["t_lambda"] = row.t_lambda;
      d["t1_bracket"] = row.t1_bracket;
      d["energies"] = py::make_tuple(row.energy[0], row.energy[1], row.energy[2]);
      d["below_threshold"] = py::make_tuple(row.below_threshold[0], row.below_threshold[1],
                                            row.below_threshold[2]);
      d["error"] = row.error;
      out.append(d);
    }
    return out;
  }, py::arg("config"), py::arg("lambdas"), py::arg("solve") = true);
}
