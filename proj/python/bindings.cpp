#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hestonwlse/asymptotics.hpp"
#include "hestonwlse/estimators.hpp"
#include "hestonwlse/model.hpp"
#include "hestonwlse/montecarlo.hpp"
#include "hestonwlse/path_io.hpp"
#include "hestonwlse/sde_sim.hpp"
#include "hestonwlse/special_fn.hpp"

namespace py = pybind11;
using namespace hestonwlse;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

template <class M, py::ssize_t N>
py::array_t<double> square(const M& m) {
  return py::array_t<double>({N, N}, m.v.data());
}

py::array_t<double> to_array(const Mat2& m) { return square<Mat2, 2>(m); }
py::array_t<double> to_array(const Mat4& m) { return square<Mat4, 4>(m); }

McConfig mc_config(const SimConfig& sim, std::size_t n_paths, unsigned threads) {
  McConfig cfg;
  cfg.sim = sim;
  cfg.n_paths = n_paths;
  cfg.threads = threads;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_hestonwlse, m) {
  m.doc() = "Weighted least squares drift estimation for the Heston model";

  // Messages start with the error kind, e.g. "ZeroHit: ...".
  py::register_exception<EstimationError>(m, "EstimationError", PyExc_RuntimeError);
  py::register_exception<AsymptoticsError>(m, "AsymptoticsError", PyExc_ArithmeticError);

  py::class_<HestonParams>(m, "HestonParams")
      .def(py::init([](double a, double b, double alpha, double beta, double rho) {
             return HestonParams{a, b, alpha, beta, rho};
           }),
           py::arg("a") = 1.0, py::arg("b") = -2.0, py::arg("alpha") = 0.0, py::arg("beta") = -0.5,
           py::arg("rho") = -0.7)
      .def_readwrite("a", &HestonParams::a)
      .def_readwrite("b", &HestonParams::b)
      .def_readwrite("alpha", &HestonParams::alpha)
      .def_readwrite("beta", &HestonParams::beta)
      .def_readwrite("rho", &HestonParams::rho)
      .def("__repr__", [](const HestonParams& p) {
        return "HestonParams(a=" + py::repr(py::float_(p.a)).cast<std::string>() +
               ", b=" + py::repr(py::float_(p.b)).cast<std::string>() +
               ", alpha=" + py::repr(py::float_(p.alpha)).cast<std::string>() +
               ", beta=" + py::repr(py::float_(p.beta)).cast<std::string>() +
               ", rho=" + py::repr(py::float_(p.rho)).cast<std::string>() + ")";
      });

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init([](double dt, double t_end, std::uint64_t seed, double psi_crit, std::optional<double> x0,
                       double y0, bool stationary_init) {
             return SimConfig{dt, t_end, seed, psi_crit, x0, y0, stationary_init};
           }),
           py::arg("dt") = 0.01, py::arg("t_end") = 70.0, py::arg("seed") = 1, py::arg("psi_crit") = 1.5,
           py::arg("x0") = py::none(), py::arg("y0") = 0.0, py::arg("stationary_init") = false)
      .def_readwrite("dt", &SimConfig::dt)
      .def_readwrite("t_end", &SimConfig::t_end)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("psi_crit", &SimConfig::psi_crit)
      .def_readwrite("x0", &SimConfig::x0)
      .def_readwrite("y0", &SimConfig::y0)
      .def_readwrite("stationary_init", &SimConfig::stationary_init);

  py::class_<PathGrid>(m, "PathGrid")
      .def(py::init<double, double, std::vector<double>, std::vector<double>>(), py::arg("dt"), py::arg("t_end"),
           py::arg("x"), py::arg("y"))
      .def_property_readonly("dt", &PathGrid::dt)
      .def_property_readonly("t_end", &PathGrid::t_end)
      .def_property_readonly("x", [](const PathGrid& p) { return to_array(p.x()); })
      .def_property_readonly("y", [](const PathGrid& p) { return to_array(p.y()); })
      .def("truncated", &PathGrid::truncated, py::arg("t_end"))
      .def("__len__", &PathGrid::size);

  py::class_<QuadEstimate>(m, "QuadEstimate")
      .def_readonly("a_hat", &QuadEstimate::a_hat)
      .def_readonly("b_hat", &QuadEstimate::b_hat)
      .def_readonly("alpha_hat", &QuadEstimate::alpha_hat)
      .def_readonly("beta_hat", &QuadEstimate::beta_hat)
      .def_readonly("t_end", &QuadEstimate::t_end)
      .def_property_readonly("gram", [](const QuadEstimate& e) { return to_array(e.gram); })
      .def_property_readonly("u", [](const QuadEstimate& e) { return std::vector<double>{e.u[0], e.u[1]}; })
      .def_property_readonly("v", [](const QuadEstimate& e) { return std::vector<double>{e.v[0], e.v[1]}; });

  m.def("validate", py::overload_cast<const HestonParams&>(&validate), py::arg("params"));
  m.def("stationary_mean", &stationary_mean, py::arg("params"));

  m.def("simulate", &simulate, py::arg("params"), py::arg("config") = SimConfig{}, py::arg("path_index") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("save_path", &save_path, py::arg("filename"), py::arg("path"));
  m.def("load_path", &load_path, py::arg("filename"));

  m.def("wlse", &wlse, py::arg("path"), py::arg("c"));
  m.def("mle", &mle, py::arg("path"));
  m.def("wlse_b_known_a", &wlse_b_known_a, py::arg("path"), py::arg("c"), py::arg("a"));
  m.def("wlse_a_known_b", &wlse_a_known_b, py::arg("path"), py::arg("c"), py::arg("b"));
  m.def("mle_b_known_a", &mle_b_known_a, py::arg("path"), py::arg("a"));
  m.def("mle_a_known_b", &mle_a_known_b, py::arg("path"), py::arg("b"));

  m.def("upper_incomplete_gamma", &upper_incomplete_gamma, py::arg("alpha"), py::arg("y"));
  m.def("exponential_integral_e1", &exponential_integral_e1, py::arg("y"));

  m.def(
      "psi",
      [](const HestonParams& p, double c) {
        const auto k = psi(p, {c});
        return py::make_tuple(k.psi_c, k.phi_c);
      },
      py::arg("params"), py::arg("c"));
  m.def(
      "asymptotic_covariance",
      [](const HestonParams& p, double c) {
        const auto cov = asymptotic_covariance(p, {c});
        py::dict d;
        d["psi_c"] = cov.coefficients.psi_c;
        d["phi_c"] = cov.coefficients.phi_c;
        d["A"] = to_array(cov.A);
        d["L"] = to_array(cov.L);
        d["ALA"] = to_array(cov.ALA);
        d["Lambda"] = to_array(cov.Lambda);
        d["sigma11"] = cov.sigma.sigma11;
        d["sigma12"] = cov.sigma.sigma12;
        d["sigma22"] = cov.sigma.sigma22;
        d["sigma_inv_limit"] = cov.sigma_inv_limit ? py::object(to_array(*cov.sigma_inv_limit)) : py::none();
        return d;
      },
      py::arg("params"), py::arg("c"));
  m.def(
      "mle_covariance_limit", [](const HestonParams& p) { return to_array(mle_covariance_limit(p)); },
      py::arg("params"));

  // Experiments return the JSON report text; the Python wrapper decodes it.
  m.def(
      "_run_consistency",
      [](const HestonParams& p, double c, const std::vector<double>& horizons, const SimConfig& sim,
         std::size_t n_paths, unsigned threads) {
        return report_to_json(run_consistency(p, c, horizons, mc_config(sim, n_paths, threads)));
      },
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "_run_clt",
      [](const HestonParams& p, double c, const SimConfig& sim, std::size_t n_paths, unsigned threads) {
        return report_to_json(run_clt(p, c, mc_config(sim, n_paths, threads)));
      },
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "_run_c_sweep",
      [](const HestonParams& p, const std::vector<double>& c_values, const SimConfig& sim, std::size_t n_paths,
         unsigned threads) { return report_to_json(run_c_sweep(p, c_values, mc_config(sim, n_paths, threads))); },
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "_run_mle_vs_wlse",
      [](const HestonParams& p, double c, const SimConfig& sim, std::size_t n_paths, unsigned threads) {
        return report_to_json(run_mle_vs_wlse(p, c, mc_config(sim, n_paths, threads)));
      },
      py::call_guard<py::gil_scoped_release>());
}
