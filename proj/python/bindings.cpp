#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gaussgraph/commands.hpp"

namespace py = pybind11;
using namespace gaussgraph;

namespace {

PyObject* error_type = nullptr;  // owned by the module

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

py::dict assembly_dict(const CurvatureAssembly& a) {
  std::vector<double> K(a.nodes.size()), margin(a.nodes.size());
  for (size_t i = 0; i < a.nodes.size(); ++i) {
    K[i] = a.nodes[i].K;
    margin[i] = a.nodes[i].margin;
  }
  py::dict d;
  d["K"] = to_array(K);
  d["node_margin"] = to_array(margin);
  d["admissible"] = a.admissible;
  d["margin"] = a.margin;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Prescribed Gauss curvature graphs: kernels, solver and diagnostics";

  error_type = py::exception<Error>(m, "GaussGraphError").ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = error_name(e.code());
      exc.attr("exit_code") = exit_code_for(e.code());
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  py::class_<ChartSpec>(m, "Chart")
      .def_static("euclidean", &ChartSpec::euclidean, py::arg("n") = 2)
      .def_static("hyperbolic", &ChartSpec::hyperbolic, py::arg("n"), py::arg("offset"))
      .def_static("epsilon_family", &ChartSpec::epsilon_family, py::arg("n"), py::arg("epsilon"),
                  py::arg("normalized") = true)
      .def_static("parse", &parse_chart_id)
      .def_readonly("n", &ChartSpec::n)
      .def_property_readonly("id", [](const ChartSpec& c) { return chart_id(c); })
      .def("__repr__", [](const ChartSpec& c) { return "<Chart " + chart_id(c) + ">"; });

  py::class_<GridDomain, std::shared_ptr<GridDomain>>(m, "Domain")
      .def_static("ball",
                  [](int n, std::array<int, 2> shape, Point center, double radius) {
                    return std::const_pointer_cast<GridDomain>(GridDomain::ball(n, shape, center, radius));
                  },
                  py::arg("n"), py::arg("shape"), py::arg("center"), py::arg("radius"))
      .def_static("box",
                  [](int n, std::array<int, 2> shape, Point lo, Point hi) {
                    return std::const_pointer_cast<GridDomain>(GridDomain::box(n, shape, lo, hi));
                  },
                  py::arg("n"), py::arg("shape"), py::arg("lo"), py::arg("hi"))
      .def_property_readonly("shape", &GridDomain::shape)
      .def_property_readonly("spacing", &GridDomain::spacing)
      .def_property_readonly("interior_count", &GridDomain::interior_count)
      .def_property_readonly("interior_nodes", &GridDomain::interior_nodes)
      .def("coord", &GridDomain::coord);

  py::class_<GraphFunction>(m, "GraphFunction")
      .def(py::init([](std::shared_ptr<GridDomain> d) { return GraphFunction(d); }))
      .def_static("from_function",
                  [](std::shared_ptr<GridDomain> d, py::function fn) {
                    return GraphFunction::from_function(d, [&](const Point& x) { return fn(x[0], x[1]).cast<double>(); });
                  })
      .def_property(
          "values", [](const GraphFunction& f) { return to_array(f.values()); },
          [](GraphFunction& f, const std::vector<double>& v) {
            if (v.size() != f.values().size()) throw Error(ErrorCode::InvalidArgument, "wrong number of values");
            f.values() = v;
          })
      .def("interior_values", [](const GraphFunction& f) { return to_array(f.interior_values()); });

  m.def("alpha_of_theta", &alpha_of_theta);
  m.def("theta_of_alpha", &theta_of_alpha);
  m.def("equidistant_curvature", &equidistant_curvature);
  m.def("sectional_curvature", [](const ChartSpec& c, std::vector<double> p, std::vector<double> X,
                                  std::vector<double> Y) { return sectional_curvature(c, p, X, Y); });
  m.def("jacobi_zeroth_order", &jacobi_zeroth_order);

  m.def("assemble_curvature", [](const GraphFunction& f, const ChartSpec& c) {
    return assembly_dict(assemble_curvature(f, c));
  });
  m.def("oracle_curvature", [](const GraphFunction& f, const ChartSpec& c) {
    const auto o = curvature_oracle(f, c);
    std::vector<double> K(o.nodes.size());
    for (size_t i = 0; i < K.size(); ++i) K[i] = o.nodes[i].K;
    return to_array(K);
  });
  m.def("sphere_cap", [](const ChartSpec& c, std::shared_ptr<GridDomain> d, double k) {
    return sphere_cap_barrier(c, d, k);
  });
  m.def("stability", [](const GraphFunction& f, const ChartSpec& c) {
    const auto r = stability_check(f, c);
    py::dict d;
    d["stable"] = r.stable;
    d["max_witness"] = r.max_witness;
    d["witness"] = to_array(r.witness);
    return d;
  });
  m.def(
      "newton_solve",
      [](const GraphFunction& init, const ChartSpec& c, double k, double tol) {
        NewtonOptions o;
        o.tol = tol;
        const auto r = newton_solve(init, SolveTarget::constant(c, init.domain(), k), o);
        py::dict d;
        d["f"] = r.f;
        d["iterations"] = r.iterations;
        d["residual"] = r.residual;
        d["margin"] = r.margin;
        return d;
      },
      py::arg("init"), py::arg("chart"), py::arg("k"), py::arg("tol") = 1e-9);

  m.def("read_grid", [](const std::string& path) {
    auto g = read_grid_file(path);
    return py::make_tuple(g.chart, g.f);
  });
  m.def("write_grid", &write_grid_file);

  // Runs one CLI command from a JSON config string; returns (exit code, summary JSON text).
  m.def(
      "run",
      [](const std::string& command, const std::string& config, int jobs) {
        nlohmann::json s;
        int rc = 0;
        {
          py::gil_scoped_release release;
          const RunConfig c = parse_config(config, "<python>");
          if (command == "curvature") rc = cmd_curvature(c, &s);
          else if (command == "solve") rc = cmd_solve(c, &s);
          else if (command == "validate") rc = cmd_validate(c, &s);
          else if (command == "sweep") rc = cmd_sweep(c, jobs, &s);
          else throw Error(ErrorCode::InvalidArgument, "unknown command '" + command + "'");
        }
        return py::make_tuple(rc, s.is_null() ? std::string("{}") : s.dump());
      },
      py::arg("command"), py::arg("config"), py::arg("jobs") = 1);
}
