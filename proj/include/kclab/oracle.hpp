#pragma once

// Brute-force recomputation of sequence probabilities. Unitaries come from a
// Pade matrix exponential, Kraus operators are rebuilt from the raw kets and
// every history is a fresh product; nothing is shared with sequence.cpp.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kclab/dephasing.hpp"
#include "kclab/sequence.hpp"

namespace kclab {

/// Kraus operators of step k, rebuilt from scratch.
std::vector<Matrix> oracle_kraus(const MeasurementProtocol& protocol, std::size_t step);

/// tr(rho R^dag R) with R = K_{m_n} ... K_{m_1} for the first seq.size() steps.
double oracle_probability(const MeasurementProtocol& protocol, const Matrix& rho, const OutcomeSequence& seq);

/// Same, for the protocol with step j (1-based) skipped.
double oracle_probability_without(const MeasurementProtocol& protocol, const Matrix& rho, int n, int j,
                                  const OutcomeSequence& fixed);

/// sum_{m_j} P_n - P_{n-1} on the naive path.
double oracle_kc_defect_state(const MeasurementProtocol& protocol, const Matrix& rho, int n, int j,
                              const OutcomeSequence& fixed);

struct OracleComparison {
  std::string state;
  int n = 0;
  std::size_t entries = 0;
  double max_discrepancy = 0.0;
  /// max |P_n - tr(rho E_{m_n} ... E_{m_1})|, only for commuting models.
  std::optional<double> product_form_discrepancy;
};

struct OracleReport {
  std::vector<OracleComparison> comparisons;
  double max_discrepancy = 0.0;
  std::optional<double> max_product_form_discrepancy;
  double threshold = 1e-11;
  bool agrees = true;
};

/// Compares full_distribution against the naive path for every state and
/// 1 <= n <= n_max. The product form is checked when the conditional
/// Hamiltonians commute.
OracleReport run_oracle(const MeasurementProtocol& protocol, const std::vector<std::pair<std::string, DensityMatrix>>& states,
                        int n_max, const Tolerances& tol = {}, double threshold = 1e-11);

}  // namespace kclab
