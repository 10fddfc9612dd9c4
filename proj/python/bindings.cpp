#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "l2plus/copositive_sdp.hpp"
#include "l2plus/harmonic.hpp"
#include "l2plus/hinf.hpp"
#include "l2plus/io.hpp"
#include "l2plus/report.hpp"
#include "l2plus/timedomain.hpp"

namespace py = pybind11;
using namespace l2plus;

namespace {

NormKind norm_kind(const std::string& p) {
  if (p == "1") return NormKind::L1;
  if (p == "2") return NormKind::L2;
  if (p == "inf") return NormKind::Linf;
  throw Error(ErrorKind::InvalidArgument, "p must be \"1\", \"2\" or \"inf\"");
}

}  // namespace

PYBIND11_MODULE(_l2plus, m) {
  m.doc() = "Bounds on the L2 induced norm of LTI systems for nonnegative inputs";

  py::register_exception<Error>(m, "L2PlusError", PyExc_RuntimeError);

  py::class_<StateSpace>(m, "StateSpace")
      .def(py::init([](Matrix A, Matrix B, Matrix C, Matrix D, std::string name) {
             StateSpace s{std::move(A), std::move(B), std::move(C), std::move(D),
                          std::move(name)};
             return validate(s);
           }),
           py::arg("A"), py::arg("B"), py::arg("C"), py::arg("D"), py::arg("name") = "")
      .def_static("static_gain", &StateSpace::static_gain, py::arg("D"))
      .def_readwrite("A", &StateSpace::A)
      .def_readwrite("B", &StateSpace::B)
      .def_readwrite("C", &StateSpace::C)
      .def_readwrite("D", &StateSpace::D)
      .def_readwrite("name", &StateSpace::name)
      .def_property_readonly("n", &StateSpace::n)
      .def_property_readonly("n_w", &StateSpace::n_w)
      .def_property_readonly("n_z", &StateSpace::n_z)
      .def("to_json", &system_to_json);

  m.def("parse_system", &parse_system, py::arg("text"));
  m.def("read_system", &read_system, py::arg("path"));
  m.def("subtract", &subtract, py::arg("sys1"), py::arg("sys2"));
  m.def("is_internally_positive", &is_internally_positive, py::arg("sys"));
  m.def("freq_response", &freq_response, py::arg("sys"), py::arg("omega"));

  py::class_<PeakInfo>(m, "PeakInfo")
      .def_property_readonly("kind", [](const PeakInfo& p) { return to_string(p.kind); })
      .def_readonly("omega", &PeakInfo::omega)
      .def_readonly("gain", &PeakInfo::gain)
      .def_readonly("v", &PeakInfo::v);
  m.def("hinf_norm", &hinf_norm, py::arg("sys"), py::arg("rel_tol") = 1e-9);

  py::class_<UpperBoundResult>(m, "UpperBoundResult")
      .def_readonly("alpha", &UpperBoundResult::alpha)
      .def_readonly("N", &UpperBoundResult::N)
      .def_readonly("gamma", &UpperBoundResult::gamma)
      .def_property_readonly("status", [](const UpperBoundResult& r) {
        return conic::to_string(r.solver_status);
      })
      .def_property_readonly("ok", &UpperBoundResult::ok)
      .def_property_readonly("P", [](const UpperBoundResult& r) { return r.certificate.P; })
      .def_property_readonly("M", [](const UpperBoundResult& r) { return r.certificate.M; });
  m.def(
      "upper_bound",
      [](const StateSpace& sys, double alpha, int N) { return upper_bound(sys, alpha, N); },
      py::arg("sys"), py::arg("alpha"), py::arg("N"));

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("cells", &SweepResult::cells)
      .def_readonly("best_gamma", &SweepResult::best_gamma)
      .def_readonly("best_alpha", &SweepResult::best_alpha)
      .def_readonly("best_N", &SweepResult::best_N)
      .def_readonly("any_ok", &SweepResult::any_ok);
  m.def(
      "sweep",
      [](const StateSpace& sys, const std::vector<double>& alphas, int N_max, int threads) {
        py::gil_scoped_release release;
        return sweep(sys, alphas, N_max, {}, threads);
      },
      py::arg("sys"), py::arg("alphas"), py::arg("N_max"), py::arg("threads") = 1);

  py::class_<UpsilonResult>(m, "UpsilonResult")
      .def_readonly("N", &UpsilonResult::N)
      .def_readonly("upsilon", &UpsilonResult::upsilon)
      .def_readonly("omega", &UpsilonResult::omega);
  m.def(
      "upsilon", [](const StateSpace& sys, int N) { return upsilon(sys, N); }, py::arg("sys"),
      py::arg("N"));
  m.def(
      "upsilon_sequence",
      [](const StateSpace& sys, int N_max) { return upsilon_sequence(sys, N_max); },
      py::arg("sys"), py::arg("N_max"));

  m.def(
      "fourier_coeffs", [](int N) { return fourier_coeffs(N).a; }, py::arg("N"),
      "Coefficients a_0..a_N of max(2 cos t, 0) with a_1 = 1.");
  m.def("parseval_check", &parseval_check, py::arg("N"));
  m.def("matrix_l2plus_lower", &matrix_l2plus_lower, py::arg("M"));
  m.def(
      "matrix_l2plus_bruteforce",
      [](const Matrix& M, std::uint64_t seed) {
        BruteForceOptions o;
        o.seed = seed;
        return matrix_l2plus_bruteforce(M, o);
      },
      py::arg("M"), py::arg("seed") = 1);
  m.def(
      "sip_qp_oracle",
      [](int N, int grid_points) {
        const SipResult r = sip_qp_oracle(N, grid_points);
        return py::make_tuple(r.value, r.coeffs);
      },
      py::arg("N"), py::arg("grid_points"));

  m.def(
      "delay_demo",
      [](double L, const std::string& p) {
        const DelayDemoResult r = delay_demo(L, norm_kind(p));
        py::dict d;
        d["ratio"] = r.ratio;
        d["achieved_norm"] = r.achieved_norm;
        d["achieved_plus_norm"] = r.achieved_plus_norm;
        d["dt"] = r.dt;
        return d;
      },
      py::arg("L"), py::arg("p"));
  m.def(
      "empirical_gain",
      [](const StateSpace& sys, double omega, const CVector& v, int measure_periods) {
        return empirical_gain(sys, omega, v, settle_periods_for(sys, omega), measure_periods);
      },
      py::arg("sys"), py::arg("omega"), py::arg("v"), py::arg("measure_periods") = 4);

  m.def(
      "certify",
      [](const StateSpace& sys, std::vector<double> alphas, int max_degree, int max_harmonics,
         double solver_tol, int threads) {
        CertifyOptions o;
        o.alphas = std::move(alphas);
        o.max_degree = max_degree;
        o.max_harmonics = max_harmonics;
        o.solver_tol = solver_tol;
        o.threads = threads;
        std::string json;
        {
          py::gil_scoped_release release;
          json = report_json(certify(sys, o));
        }
        return json;
      },
      py::arg("sys"), py::arg("alphas") = std::vector<double>{-0.8, -1.0, -1.2},
      py::arg("max_degree") = 15, py::arg("max_harmonics") = 200, py::arg("solver_tol") = 1e-8,
      py::arg("threads") = 0, "Runs both bounds and returns the JSON report text.");
}
