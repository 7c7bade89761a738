#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kclab/algebra.hpp"
#include "kclab/app.hpp"
#include "kclab/errors.hpp"
#include "kclab/sequence.hpp"
#include "kclab/witnesses.hpp"

namespace py = pybind11;
using namespace kclab;

namespace {

std::vector<HermitianMatrix> hermitians(const std::vector<Matrix>& ms) {
  std::vector<HermitianMatrix> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.emplace_back(m);
  return out;
}

MeasurementProtocol qubit_protocol(const std::vector<Matrix>& hamiltonians, double t, const std::vector<std::string>& axes) {
  std::vector<Axis> parsed;
  for (const auto& a : axes) parsed.push_back(axis_from_string(a));
  return qubit_xy_protocol(DephasingModel(hermitians(hamiltonians), t), parsed);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Kolmogorov-consistency checks for probe-based sequential measurements.";
  m.attr("__version__") = KCLAB_VERSION;

  py::register_exception<Error>(m, "KclabError", PyExc_ValueError);

  m.def(
      "kc_check",
      [](const std::vector<Matrix>& hamiltonians, double t, const std::vector<std::string>& axes, int n_max) {
        const auto report = check_kc_all(qubit_protocol(hamiltonians, t, axes), n_max);
        py::dict out;
        out["consistent"] = report.consistent;
        out["max_operator_defect"] = report.max_operator_defect;
        out["n2j1_consistent"] = report.n2j1_consistent;
        out["entries"] = report.defects.size();
        return out;
      },
      py::arg("hamiltonians"), py::arg("t"), py::arg("axes"), py::arg("n_max"),
      "Operator-level KC defects of a qubit-probe X/Y protocol.");

  m.def(
      "joint_distribution",
      [](const std::vector<Matrix>& hamiltonians, double t, const std::vector<std::string>& axes, const Matrix& rho) {
        const auto protocol = qubit_protocol(hamiltonians, t, axes);
        return full_distribution(protocol, DensityMatrix(rho), static_cast<int>(axes.size())).probabilities();
      },
      py::arg("hamiltonians"), py::arg("t"), py::arg("axes"), py::arg("rho"),
      "Probabilities of all outcome sequences, first step most significant.");

  m.def(
      "kc_defect",
      [](const std::vector<Matrix>& hamiltonians, double t, const std::vector<std::string>& axes, const Matrix& rho,
         int n, int j, const std::vector<int>& fixed) {
        return kc_defect_state(qubit_protocol(hamiltonians, t, axes), DensityMatrix(rho), n, j, fixed);
      },
      py::arg("hamiltonians"), py::arg("t"), py::arg("axes"), py::arg("rho"), py::arg("n"), py::arg("j"),
      py::arg("fixed"));

  m.def(
      "is_commutative",
      [](const std::vector<Matrix>& hamiltonians) {
        const auto r = is_commutative(hermitians(hamiltonians));
        return py::make_tuple(r.commutative, r.max_commutator_norm);
      },
      py::arg("hamiltonians"));

  m.def(
      "algebra_dimension",
      [](const std::vector<Matrix>& generators) { return generate_algebra(hermitians(generators)).dimension(); },
      py::arg("generators"));

  m.def(
      "run",
      [](const std::string& config, std::optional<std::string> out_dir, std::optional<std::uint64_t> seed) {
        CommandOptions opts;
        opts.out_dir = std::move(out_dir);
        opts.seed = seed;
        std::ostringstream log;
        const int code = run_command(config, opts, log);
        return py::make_tuple(code, log.str());
      },
      py::arg("config"), py::arg("out_dir") = py::none(), py::arg("seed") = py::none(),
      "Same as `kclab run`; returns (exit_code, diagnostics).");
}
