#pragma once

// Probe-system pure dephasing: H = sum_i |i><i| (x) H_i. One projective
// prepare/evolve/measure cycle on the probe induces the Kraus operators
// K_m = sum_i <i|gamma><m|i> U_i on the system.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kclab/linalg.hpp"

namespace kclab {

/// Conditional Hamiltonians {H_i} (one per probe pointer state, hbar = 1)
/// and the step duration t.
class DephasingModel {
 public:
  DephasingModel(std::vector<HermitianMatrix> hamiltonians, double step_time);

  int probe_dim() const noexcept { return static_cast<int>(hamiltonians_.size()); }
  int system_dim() const noexcept { return static_cast<int>(hamiltonians_.front().dim()); }
  const std::vector<HermitianMatrix>& hamiltonians() const noexcept { return hamiltonians_; }
  const HermitianMatrix& hamiltonian(int i) const { return hamiltonians_.at(static_cast<std::size_t>(i)); }
  double step_time() const noexcept { return step_time_; }

  DephasingModel with_step_time(double t) const { return DephasingModel(hamiltonians_, t); }

 private:
  std::vector<HermitianMatrix> hamiltonians_;
  double step_time_;
};

/// H_i = eps_i 1 + H_S + v_i V_S.
DephasingModel build_conditional_hamiltonians(const HermitianMatrix& h_system, const HermitianMatrix& v_system,
                                              std::span<const double> epsilons, std::span<const double> couplings,
                                              double step_time = 0.0);

/// Probe preparation |gamma>, stored as ket components <i|gamma>.
class PreparationState {
 public:
  explicit PreparationState(Vector ket, double tol = Tolerances{}.normalization);
  /// (1, ..., 1) / sqrt(d); |+x> for a qubit.
  static PreparationState uniform(int d);

  int dim() const noexcept { return static_cast<int>(ket_.size()); }
  const Vector& ket() const noexcept { return ket_; }
  /// gamma(i) = <gamma|i>.
  Complex amplitude(int i) const { return std::conj(ket_(i)); }
  double weight(int i) const { return std::norm(ket_(i)); }

 private:
  Vector ket_;
};

enum class Axis { X, Y, Custom };

std::string to_string(Axis axis);
Axis axis_from_string(const std::string& name);

/// Orthonormal probe basis {|m>}; outcome label m is the column index. Each
/// outcome carries a measurement value (+1/-1 for the qubit axes).
class MeterBasis {
 public:
  MeterBasis(std::vector<Vector> states, std::vector<double> values, Axis axis = Axis::Custom,
             double tol = Tolerances{}.normalization);

  /// Eigenbasis of sigma_x: label 0 = |+x>, label 1 = |-x>.
  static MeterBasis qubit_x();
  /// Eigenbasis of the probe's sigma_y = i|0><1| - i|1><0|: label 0 = |+y> =
  /// (1, -i)/sqrt(2), label 1 = |-y>. With |+x> preparation this gives
  /// K_+- = (U_0 +- i U_1)/2.
  static MeterBasis qubit_y();
  /// Discrete Fourier basis with values 0..d-1; for d = 2 this is qubit_x().
  static MeterBasis fourier(int d);

  int size() const noexcept { return static_cast<int>(states_.size()); }
  const Vector& state(int m) const { return states_.at(static_cast<std::size_t>(m)); }
  /// m(i) = <m|i>.
  Complex amplitude(int m, int i) const { return std::conj(state(m)(i)); }
  double value(int m) const { return values_.at(static_cast<std::size_t>(m)); }
  const std::vector<double>& values() const noexcept { return values_; }
  Axis axis() const noexcept { return axis_; }

  MeterBasis with_values(std::vector<double> values) const { return MeterBasis(states_, std::move(values), axis_); }

 private:
  std::vector<Vector> states_;
  std::vector<double> values_;
  Axis axis_;
};

/// Kraus operators and effects induced on the system by one probe cycle.
/// Construction verifies E_m = K_m^dag K_m, sum_m E_m = 1 and E_m >= 0.
struct InducedMeasurement {
  std::vector<Matrix> kraus;
  std::vector<HermitianMatrix> effects;

  int outcomes() const noexcept { return static_cast<int>(kraus.size()); }
};

std::vector<UnitaryMatrix> conditional_unitaries(const DephasingModel& model);

/// K_m = sum_i conj(gamma(i)) m(i) U_i, E_m = K_m^dag K_m. Throws
/// InvariantViolation if the effects do not form a POVM.
InducedMeasurement induced_kraus(const DephasingModel& model, const PreparationState& prep, const MeterBasis& meter,
                                 const Tolerances& tol = {});
InducedMeasurement induced_kraus(std::span<const UnitaryMatrix> unitaries, const PreparationState& prep,
                                 const MeterBasis& meter, const Tolerances& tol = {});

/// Sequence of prepare/evolve/measure cycles. The preparation is reused at
/// every step; each step has its own meter basis. Steps normally share one
/// model (same H_i and t); piecewise() protocols give each step its own
/// dynamics and are experimental.
class MeasurementProtocol {
 public:
  MeasurementProtocol(DephasingModel model, PreparationState preparation, std::vector<MeterBasis> bases,
                      const Tolerances& tol = {});

  /// One model per step (e.g. piecewise-constant classical noise).
  static MeasurementProtocol piecewise(std::vector<DephasingModel> step_models, PreparationState preparation,
                                       std::vector<MeterBasis> bases, const Tolerances& tol = {});

  std::size_t steps() const noexcept { return bases_.size(); }
  int probe_dim() const noexcept { return preparation_.dim(); }
  int system_dim() const noexcept { return step_models_.front().system_dim(); }
  bool is_piecewise() const noexcept { return piecewise_; }

  const DephasingModel& model() const noexcept { return step_models_.front(); }
  const DephasingModel& step_model(std::size_t k) const { return step_models_.at(k); }
  const PreparationState& preparation() const noexcept { return preparation_; }
  const MeterBasis& basis(std::size_t k) const { return bases_.at(k); }
  const std::vector<MeterBasis>& bases() const noexcept { return bases_; }
  const InducedMeasurement& step(std::size_t k) const { return induced_.at(k); }

  /// Protocol with step k (0-based) removed; remaining steps keep their order.
  MeasurementProtocol without_step(std::size_t k) const;
  /// First n steps.
  MeasurementProtocol truncated(std::size_t n) const;

 private:
  MeasurementProtocol() = default;
  void build(const Tolerances& tol);

  std::vector<DephasingModel> step_models_;
  PreparationState preparation_{Vector::Ones(1)};
  std::vector<MeterBasis> bases_;
  std::vector<InducedMeasurement> induced_;
  bool piecewise_ = false;
};

/// |+x> preparation with the sigma_x / sigma_y eigenbases named by `axes`.
MeasurementProtocol qubit_xy_protocol(const DephasingModel& model, std::span<const Axis> axes,
                                      const Tolerances& tol = {});
/// Same basis at each of `steps` steps.
MeasurementProtocol single_axis_protocol(const DephasingModel& model, const PreparationState& prep,
                                         const MeterBasis& meter, std::size_t steps, const Tolerances& tol = {});

enum class Direction { State, Observable };

/// Nonselective (outcome-discarding) map: sum_i |gamma(i)|^2 U_i a U_i^dag in the
/// state direction, sum_i |gamma(i)|^2 U_i^dag a U_i in the observable direction.
HermitianMatrix nonselective_apply(const DephasingModel& model, const PreparationState& prep,
                                   const HermitianMatrix& a, Direction direction);

}  // namespace kclab
