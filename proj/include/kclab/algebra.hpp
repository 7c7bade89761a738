#pragma once

// Measurement-free analysis of the operator algebra generated by the
// conditional Hamiltonians.

#include <span>
#include <string>
#include <vector>

#include "kclab/dephasing.hpp"
#include "kclab/linalg.hpp"
#include "kclab/tolerances.hpp"

namespace kclab {

struct AlgebraBasis {
  std::vector<HermitianMatrix> generators;
  std::vector<Matrix> basis;  // Hilbert-Schmidt orthonormal
  bool closed = false;
  /// Singular values within three decades of the null-space cut (commutant only).
  std::vector<double> cut_spectrum;

  int dimension() const noexcept { return static_cast<int>(basis.size()); }
};

/// Span of all products of {1} and the generators. Starts from the
/// orthonormalised generators and adds pairwise products until the dimension
/// stops growing.
AlgebraBasis generate_algebra(std::span<const HermitianMatrix> generators, const Tolerances& tol = {});

struct CommutativityResult {
  bool commutative;
  double max_commutator_norm;
};

/// max_{i<j} |[g_i, g_j]|_F <= tol.commutator.
CommutativityResult is_commutative(std::span<const HermitianMatrix> generators, const Tolerances& tol = {});
CommutativityResult is_commutative(std::span<const Matrix> elements, const Tolerances& tol = {});

struct ClassicalityResult {
  bool classical;
  double max_trace;  // max_{i,j} |tr(rho [b_i, b_j])|
};

/// tr(rho [A, B]) = 0 on the whole algebra; basis pairs suffice by linearity.
ClassicalityResult classical_wrt_state(const DensityMatrix& rho, const AlgebraBasis& algebra,
                                       const Tolerances& tol = {});

struct NondegeneracyResult {
  bool nondegenerate;
  double min_gap;  // +inf in dimension 1
};

NondegeneracyResult effect_nondegenerate(const HermitianMatrix& e, double gap_tol = Tolerances{}.gap);

/// Pair of common eigenvectors (0-based, ascending in the reference
/// combination) whose level spacing is the same for every H_i.
struct LevelPair {
  int first;
  int second;
  double max_deviation;
};

struct SpacingAnalysis {
  Matrix eigenbasis;  // columns: common eigenvectors
  std::vector<std::vector<double>> levels;  // levels[i][l] = <l|H_i|l>
  std::vector<LevelPair> pairs;
};

/// Throws PreconditionError unless the Hamiltonians commute pairwise.
SpacingAnalysis spacing_analysis(std::span<const HermitianMatrix> hamiltonians, const Tolerances& tol = {});
std::vector<LevelPair> spacing_degeneracy_predicate(std::span<const HermitianMatrix> hamiltonians,
                                                    const Tolerances& tol = {});

struct SpacingCrossCheck {
  bool confirmed;
  double max_effect_gap;  // max over flagged pairs and effects of |e_l(m) - e_l'(m)|
  double max_offdiagonal;  // effects must be diagonal in the common eigenbasis
  double max_spectrum_mismatch;  // sorted diagonal vs direct eigenvalues
};

/// Confirms every flagged pair against the eigenvalues of the given effects.
SpacingCrossCheck spacing_cross_check(const SpacingAnalysis& analysis, std::span<const HermitianMatrix> effects,
                                      const Tolerances& tol = {});

/// {A : [A, G_j] = 0 for all j} from the null space of the stacked maps
/// vec(A) -> vec([A, G_j]). Singular values <= tol.nullspace span the null space.
AlgebraBasis commutant_basis(std::span<const Matrix> ops, const Tolerances& tol = {});

struct EntanglementResult {
  bool zero_entanglement;
  std::vector<double> state_differences;  // |U_i rho U_i^dag - U_j rho U_j^dag|_F, pairs i<j
  std::vector<double> unitary_commutators;  // |[U_i, U_j]|_F, pairs i<j; empty for a qubit probe
};

/// No probe-system entanglement after one step from a product state with
/// the given system state.
EntanglementResult zero_entanglement_condition(const DensityMatrix& rho, const DephasingModel& model,
                                               const Tolerances& tol = {});

struct EffectDegeneracy {
  std::size_t step;
  int outcome;
  NondegeneracyResult result;
};

struct AlgebraReport {
  int dimension = 0;
  bool closed = false;
  bool commutative = false;
  double max_commutator_norm = 0.0;
  std::vector<EffectDegeneracy> effects;
  bool all_effects_nondegenerate = false;
  bool all_effects_degenerate = false;
  int commutant_dimension = 0;  // commutant of {H_i}
  int unitary_commutant_dimension = 0;  // commutant of {U_i}, the nonselective fixed points
  std::vector<double> commutant_cut_spectrum;
};

AlgebraReport analyze_algebra(const MeasurementProtocol& protocol, const Tolerances& tol = {});

}  // namespace kclab
