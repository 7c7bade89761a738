#pragma once

// Joint statistics of outcome sequences and Kolmogorov-consistency (KC)
// defects. Step indices n and j follow the usual 1-based convention of
// delta P_{n,j}: n is the number of measurements, j the marginalised step.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kclab/dephasing.hpp"
#include "kclab/linalg.hpp"
#include "kclab/tolerances.hpp"

namespace kclab {

/// Outcome labels in chronological order: element k is the outcome of step k+1.
using OutcomeSequence = std::vector<int>;

struct HistoryOperator {
  HermitianMatrix q;
  OutcomeSequence sequence;
};

/// Q = R^dag R with R = K_{m_n} ... K_{m_1}, using the first seq.size() steps.
/// Throws LabelError for out-of-range labels, ProtocolError if seq is longer
/// than the protocol.
HistoryOperator history_operator(const MeasurementProtocol& protocol, const OutcomeSequence& seq,
                                 const Tolerances& tol = {});

/// Same as history_operator, over an arbitrary ordered subset of protocol
/// steps (0-based indices, one outcome per listed step).
Matrix history_matrix(const MeasurementProtocol& protocol, std::span<const std::size_t> steps,
                      std::span<const int> outcomes);

/// tr(rho q), clipped into [0, 1] when it leaves the interval by at most
/// probability_clip; NumericalFault beyond that.
double joint_probability(const DensityMatrix& rho, const HermitianMatrix& q, const Tolerances& tol = {});
inline double joint_probability(const DensityMatrix& rho, const HistoryOperator& h, const Tolerances& tol = {}) {
  return joint_probability(rho, h.q, tol);
}

/// Probabilities of all d^n sequences, stored lexicographically in
/// (m_1, ..., m_n) with m_1 most significant.
class JointDistribution {
 public:
  JointDistribution(int steps, int outcomes, std::vector<double> probabilities);

  int steps() const noexcept { return steps_; }
  int outcomes() const noexcept { return outcomes_; }
  std::size_t size() const noexcept { return probabilities_.size(); }
  const std::vector<double>& probabilities() const noexcept { return probabilities_; }

  double at(std::size_t index) const { return probabilities_.at(index); }
  double operator()(const OutcomeSequence& seq) const { return at(index_of(seq)); }
  std::size_t index_of(const OutcomeSequence& seq) const;
  OutcomeSequence sequence(std::size_t index) const;
  double total() const;

  /// Sum over the outcome of step j (1-based); a distribution over n-1 steps.
  JointDistribution marginalize(int j) const;

 private:
  int steps_;
  int outcomes_;
  std::vector<double> probabilities_;
};

/// Throws CapacityError when d_P^n exceeds tol.enumeration_cap.
void check_enumeration_capacity(int outcomes, int n, const Tolerances& tol);

JointDistribution full_distribution(const MeasurementProtocol& protocol, const DensityMatrix& rho, int n,
                                    const Tolerances& tol = {});

/// D = sum_{m_j} Q_n(...) - Q_{n-1}(...), where the (n-1)-step history uses
/// the protocol with step j deleted. `fixed` holds the n-1 remaining
/// outcomes in chronological order. Requires 1 <= j <= n-1.
HermitianMatrix kc_defect_operator(const MeasurementProtocol& protocol, int n, int j, const OutcomeSequence& fixed,
                                   const Tolerances& tol = {});

/// delta P_{n,j} = sum_{m_j} P_n(...) - P_{n-1}(...), from probabilities.
double kc_defect_state(const MeasurementProtocol& protocol, const DensityMatrix& rho, int n, int j,
                       const OutcomeSequence& fixed, const Tolerances& tol = {});

struct KCDefect {
  int n;
  int j;
  OutcomeSequence fixed;
  double operator_norm;  // Frobenius norm of the defect operator
  std::optional<double> state_defect;
};

struct KCReport {
  int n_max = 0;
  std::vector<KCDefect> defects;
  double max_operator_defect = 0.0;
  std::optional<double> max_state_defect;
  bool consistent = true;
  bool n2j1_consistent = true;  // operator test at (n=2, j=1) alone
  bool n2j1_decides = true;  // (n=2, j=1) verdict equals the full verdict
  Tolerances tolerances;
};

/// Every defect operator for 2 <= n <= n_max, 1 <= j <= n-1 and all fixed
/// outcome assignments, in lexicographic order.
KCReport check_kc_all(const MeasurementProtocol& protocol, int n_max, const Tolerances& tol = {});
/// As above, additionally recording tr(rho D) for every entry.
KCReport check_kc_all(const MeasurementProtocol& protocol, int n_max, const DensityMatrix& rho,
                      const Tolerances& tol = {});

struct FixedPointResult {
  bool is_fixed;  // |K^dag[a] - a|_F <= fixed_point tolerance
  double residual;
  std::vector<double> commutator_norms;  // |[H_i, a]|_F per conditional Hamiltonian
  bool commutes;  // max commutator norm <= commutator tolerance
  /// Fixed and commuting with every U_i but not with every H_i: the step time
  /// sits on a resonance where some U_i loses spectral resolution of H_i.
  bool resonant;
};

/// Fixed points of the nonselective observable map coincide with the
/// operators commuting with every H_i (full-support preparation, away from
/// resonant step times). Throws PreconditionError for a zero-weight
/// preparation component and NumericalFault when the two sides disagree
/// away from their cut-offs and the disagreement is not a resonance.
FixedPointResult fixed_point_check(const HermitianMatrix& a, const DephasingModel& model,
                                   const PreparationState& prep, const Tolerances& tol = {});

}  // namespace kclab
