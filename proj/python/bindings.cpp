#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fraclab/experiment.hpp"
#include "fraclab/frac_calc.hpp"
#include "fraclab/kantorovich.hpp"
#include "fraclab/kernel.hpp"
#include "fraclab/mollifier.hpp"
#include "fraclab/stats.hpp"
#include "fraclab/turbulence.hpp"

namespace py = pybind11;
using namespace fraclab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) {
    throw std::invalid_argument("expected a 1D array");
  }
  return {a.data(), a.data() + a.size()};
}

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Field periodic_field(const Array& values, double length) {
  Field f;
  f.dim = 1;
  f.points = static_cast<std::size_t>(values.size());
  f.length = length;
  f.periodic = true;
  f.values = to_vector(values);
  f.validate();
  return f;
}

ScalarFn wrap_callable(const py::function& fn) {
  return [fn](std::span<const double> x) {
    py::gil_scoped_acquire gil;
    if (x.size() == 1) {
      return fn(x[0]).cast<double>();
    }
    return fn(std::vector<double>(x.begin(), x.end())).cast<double>();
  };
}

GridSpec make_grid(int n, std::size_t dim) {
  return GridSpec{n, static_cast<int>(dim),
                  Box{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)}};
}

}  // namespace

PYBIND11_MODULE(_fraclab, m) {
  m.doc() = "Stochastic Kantorovich operators, fractional calculus and mollifier experiments";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<KernelParams>(m, "KernelParams")
      .def(py::init([](double q, double lambda, int K, double tail_tol) {
             KernelParams p{q, lambda, K, tail_tol};
             p.validate();
             return p;
           }),
           py::arg("q") = 1.0, py::arg("lam") = 1.0, py::arg("K") = 40,
           py::arg("tail_tol") = 1e-13)
      .def_readonly("q", &KernelParams::q)
      .def_readonly("lam", &KernelParams::lambda)
      .def_readonly("K", &KernelParams::trunc_radius)
      .def("__repr__", [](const KernelParams& p) {
        return "KernelParams(q=" + std::to_string(p.q) + ", lam=" + std::to_string(p.lambda) +
               ", K=" + std::to_string(p.trunc_radius) + ")";
      });

  m.def("eval_g", &eval_g, py::arg("params"), py::arg("x"));
  m.def("eval_g_prime", &eval_g_prime, py::arg("params"), py::arg("x"));
  m.def("eval_M", &eval_M, py::arg("params"), py::arg("x"));
  m.def("eval_Phi", &eval_Phi, py::arg("params"), py::arg("x"));
  m.def("eval_Z", [](const KernelParams& p, const std::vector<double>& x) { return eval_Z(p, x); },
        py::arg("params"), py::arg("x"));
  m.def("partition_sum", [](const KernelParams& p, double x) { return partition_sum(p, x); },
        py::arg("params"), py::arg("x"));

  m.def("gamma_fn", &gamma_fn, py::arg("x"));
  m.def("mittag_leffler", py::overload_cast<double, double>(&mittag_leffler), py::arg("alpha"),
        py::arg("z"));
  m.def("caputo_l1",
        [](const Array& f, double t0, double t1, double alpha) {
          const std::vector<double> v = to_vector(f);
          if (v.size() < 2) {
            throw std::invalid_argument("caputo_l1: need at least 2 samples");
          }
          return to_array(caputo_l1(v, TimeGrid{t0, t1, v.size() - 1}, FracOrder(alpha)));
        },
        py::arg("f"), py::arg("t0"), py::arg("t1"), py::arg("alpha"));
  m.def("frac_laplacian",
        [](const Array& u, double length, double s) {
          return to_array(frac_laplacian(periodic_field(u, length), s).values);
        },
        py::arg("u"), py::arg("length"), py::arg("s"));
  m.def("gagliardo_seminorm",
        [](const Array& f, double spacing, double alpha) {
          return gagliardo_seminorm(to_vector(f), spacing, FracOrder(alpha));
        },
        py::arg("f"), py::arg("spacing"), py::arg("alpha"));

  m.def("apply_expectation",
        [](const py::function& f, const std::vector<double>& x, int n, const KernelParams& p) {
          const ScalarFn fn = wrap_callable(f);
          return apply_expectation(fn, x, make_grid(n, x.size()), p);
        },
        py::arg("f"), py::arg("x"), py::arg("n"), py::arg("params") = KernelParams{});
  m.def("sample",
        [](const py::function& f, const std::vector<double>& x, int n, const KernelParams& p,
           double sigma, std::uint64_t seed, std::uint64_t replicate) {
          const ScalarFn fn = wrap_callable(f);
          return sample(fn, x, make_grid(n, x.size()), p,
                        NoiseModel{sigma, seed, NoiseKind::cell_multiplier}, replicate);
        },
        py::arg("f"), py::arg("x"), py::arg("n"), py::arg("params") = KernelParams{},
        py::arg("sigma") = 0.1, py::arg("seed") = 42, py::arg("replicate") = 0);
  m.def("variance_closed_form",
        [](const py::function& f, const std::vector<double>& x, int n, const KernelParams& p,
           double sigma) {
          const ScalarFn fn = wrap_callable(f);
          return variance_closed_form(fn, x, make_grid(n, x.size()), p, sigma);
        },
        py::arg("f"), py::arg("x"), py::arg("n"), py::arg("params") = KernelParams{},
        py::arg("sigma") = 0.1);

  m.def("mollify",
        [](const Array& u, double length, int n, double gamma) {
          return to_array(mollify(periodic_field(u, length), ScaledKernel{make_bump(1), n, gamma}).values);
        },
        py::arg("u"), py::arg("length"), py::arg("n"), py::arg("gamma") = 0.0);
  m.def("c_phi", [](double alpha) { return c_phi(make_bump(1), alpha); }, py::arg("alpha"));
  m.def("bump_normalization", [](int dim) { return make_bump(dim).normalization; },
        py::arg("dim") = 1);

  m.def("energy_dissipation",
        [](const Array& u, double length, double nu, double s) {
          FracFlowParams p;
          p.nu = nu;
          p.s = s;
          return energy_dissipation(periodic_field(u, length), p);
        },
        py::arg("u"), py::arg("length"), py::arg("nu"), py::arg("s"));
  m.def("frac_burgers_solve",
        [](const Array& u0, double alpha, double s, double nu, double sigma_f, double t1,
           std::size_t steps, std::uint64_t seed, bool nonlinear) {
          const Field f = periodic_field(u0, 2.0 * 3.141592653589793);
          const PeriodicGrid grid{f.length, f.points, 1};
          const Trajectory traj = frac_burgers_solve(f, FracFlowParams{alpha, s, nu, sigma_f}, grid,
                                                     TimeGrid{0.0, t1, steps}, seed, {nonlinear});
          py::array_t<double> out({traj.snapshots.size(), f.points});
          auto view = out.mutable_unchecked<2>();
          for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
            for (std::size_t j = 0; j < f.points; ++j) {
              view(i, j) = traj.snapshots[i].values[j];
            }
          }
          return py::make_tuple(to_array(traj.times), out);
        },
        py::arg("u0"), py::arg("alpha"), py::arg("s"), py::arg("nu"), py::arg("sigma_f") = 0.0,
        py::arg("t1") = 1.0, py::arg("steps") = 256, py::arg("seed") = 42,
        py::arg("nonlinear") = true);

  m.def("fit_slope",
        [](const std::vector<double>& x, const std::vector<double>& y) {
          const SlopeEstimate s = fit_slope(x, y);
          return py::make_tuple(s.slope, s.half_width);
        },
        py::arg("x"), py::arg("y"));

  m.def("run_experiment",
        [](const py::dict& cfg) {
          const nlohmann::json overrides = nlohmann::json::parse(
              py::module_::import("json").attr("dumps")(cfg).cast<std::string>());
          const RunConfig config = parse_config_text("", overrides);
          ExperimentReport report;
          {
            py::gil_scoped_release release;
            report = run(config);
          }
          py::list checks;
          for (const Check& c : report.checks) {
            checks.append(py::make_tuple(c.name, c.passed, c.detail));
          }
          py::dict out;
          out["experiment"] = report.experiment;
          out["passed"] = report.passed();
          out["checks"] = checks;
          out["csv"] = report_to_csv(report);
          return out;
        },
        py::arg("config"));
}
