#include "kclab/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "kclab/errors.hpp"

namespace kclab {

std::vector<Matrix> oracle_kraus(const MeasurementProtocol& protocol, std::size_t step) {
  const auto& model = protocol.step_model(step);
  const auto& ket = protocol.preparation().ket();
  const auto& meter = protocol.basis(step);
  const Complex minus_i(0.0, -1.0);
  std::vector<Matrix> unitaries;
  for (const auto& h : model.hamiltonians()) unitaries.push_back((minus_i * model.step_time() * h.matrix()).exp());

  std::vector<Matrix> kraus;
  for (int m = 0; m < meter.size(); ++m) {
    Matrix k = Matrix::Zero(model.system_dim(), model.system_dim());
    for (int i = 0; i < model.probe_dim(); ++i)
      k += ket(i) * std::conj(meter.state(m)(i)) * unitaries[static_cast<std::size_t>(i)];
    kraus.push_back(k);
  }
  return kraus;
}

namespace {

double trace_probability(const Matrix& rho, const Matrix& r) { return (rho * (r.adjoint() * r)).trace().real(); }

}  // namespace

double oracle_probability(const MeasurementProtocol& protocol, const Matrix& rho, const OutcomeSequence& seq) {
  if (seq.empty() || seq.size() > protocol.steps()) throw ProtocolError("oracle_probability: bad sequence length");
  Matrix r = Matrix::Identity(rho.rows(), rho.cols());
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const auto kraus = oracle_kraus(protocol, k);
    if (seq[k] < 0 || seq[k] >= static_cast<int>(kraus.size())) throw LabelError("oracle_probability: bad label");
    r = kraus[static_cast<std::size_t>(seq[k])] * r;
  }
  return trace_probability(rho, r);
}

double oracle_probability_without(const MeasurementProtocol& protocol, const Matrix& rho, int n, int j,
                                  const OutcomeSequence& fixed) {
  if (fixed.size() + 1 != static_cast<std::size_t>(n)) throw ProtocolError("oracle: fixed has the wrong length");
  Matrix r = Matrix::Identity(rho.rows(), rho.cols());
  std::size_t next = 0;
  for (int k = 0; k < n; ++k) {
    if (k == j - 1) continue;
    const auto kraus = oracle_kraus(protocol, static_cast<std::size_t>(k));
    r = kraus.at(static_cast<std::size_t>(fixed[next++])) * r;
  }
  return trace_probability(rho, r);
}

double oracle_kc_defect_state(const MeasurementProtocol& protocol, const Matrix& rho, int n, int j,
                              const OutcomeSequence& fixed) {
  if (n < 2 || j < 1 || j > n - 1 || static_cast<std::size_t>(n) > protocol.steps())
    throw ProtocolError("oracle_kc_defect_state: need 2 <= n <= steps and 1 <= j <= n-1");
  double total = 0.0;
  for (int mj = 0; mj < protocol.basis(static_cast<std::size_t>(j - 1)).size(); ++mj) {
    OutcomeSequence seq = fixed;
    seq.insert(seq.begin() + (j - 1), mj);
    total += oracle_probability(protocol, rho, seq);
  }
  return total - oracle_probability_without(protocol, rho, n, j, fixed);
}

OracleReport run_oracle(const MeasurementProtocol& protocol, const std::vector<std::pair<std::string, DensityMatrix>>& states,
                        int n_max, const Tolerances& tol, double threshold) {
  if (n_max < 1 || static_cast<std::size_t>(n_max) > protocol.steps())
    throw ProtocolError("oracle: n_max must be in [1, protocol steps]");
  check_enumeration_capacity(protocol.probe_dim(), n_max, tol);

  bool commuting = true;
  for (std::size_t k = 0; k < protocol.steps() && commuting; ++k) {
    const auto& hams = protocol.step_model(k).hamiltonians();
    for (std::size_t a = 0; a < hams.size(); ++a)
      for (std::size_t b = a + 1; b < hams.size(); ++b)
        if (commutator_norm(hams[a].matrix(), hams[b].matrix()) > 1e-12) commuting = false;
  }

  std::vector<std::vector<Matrix>> effects;
  for (std::size_t k = 0; k < static_cast<std::size_t>(n_max); ++k) {
    std::vector<Matrix> e;
    for (const auto& kr : oracle_kraus(protocol, k)) e.push_back(kr.adjoint() * kr);
    effects.push_back(std::move(e));
  }

  OracleReport report;
  report.threshold = threshold;
  for (const auto& [name, rho] : states) {
    for (int n = 1; n <= n_max; ++n) {
      const auto dist = full_distribution(protocol, rho, n, tol);
      OracleComparison c;
      c.state = name;
      c.n = n;
      c.entries = dist.size();
      if (commuting) c.product_form_discrepancy = 0.0;
      for (std::size_t idx = 0; idx < dist.size(); ++idx) {
        const auto seq = dist.sequence(idx);
        c.max_discrepancy = std::max(c.max_discrepancy, std::abs(oracle_probability(protocol, rho.matrix(), seq) - dist.at(idx)));
        if (commuting) {
          Matrix prod = Matrix::Identity(rho.dim(), rho.dim());
          for (std::size_t k = 0; k < seq.size(); ++k) prod = effects[k][static_cast<std::size_t>(seq[k])] * prod;
          const double pf = (rho.matrix() * prod).trace().real();
          c.product_form_discrepancy = std::max(*c.product_form_discrepancy, std::abs(pf - dist.at(idx)));
        }
      }
      report.max_discrepancy = std::max(report.max_discrepancy, c.max_discrepancy);
      if (c.product_form_discrepancy)
        report.max_product_form_discrepancy =
            std::max(report.max_product_form_discrepancy.value_or(0.0), *c.product_form_discrepancy);
      report.comparisons.push_back(std::move(c));
    }
  }
  report.agrees = report.max_discrepancy <= threshold;
  return report;
}

}  // namespace kclab
