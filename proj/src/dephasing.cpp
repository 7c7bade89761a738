#include "kclab/dephasing.hpp"

#include <cmath>
#include <numbers>

#include "kclab/errors.hpp"

namespace kclab {

DephasingModel::DephasingModel(std::vector<HermitianMatrix> hamiltonians, double step_time)
    : hamiltonians_(std::move(hamiltonians)), step_time_(step_time) {
  if (hamiltonians_.empty()) throw DimensionError("DephasingModel: at least one conditional Hamiltonian required");
  const Index d = hamiltonians_.front().dim();
  for (const auto& h : hamiltonians_)
    if (h.dim() != d) throw DimensionError("DephasingModel: conditional Hamiltonians differ in dimension");
  if (!std::isfinite(step_time_)) throw InvariantViolation("DephasingModel: step time must be finite");
}

DephasingModel build_conditional_hamiltonians(const HermitianMatrix& h_system, const HermitianMatrix& v_system,
                                              std::span<const double> epsilons, std::span<const double> couplings,
                                              double step_time) {
  if (epsilons.size() != couplings.size())
    throw DimensionError("build_conditional_hamiltonians: epsilon and coupling lists differ in length");
  if (epsilons.size() < 2) throw DimensionError("build_conditional_hamiltonians: probe dimension must be >= 2");
  if (h_system.dim() != v_system.dim())
    throw DimensionError("build_conditional_hamiltonians: H_S and V_S differ in dimension");
  const Index d = h_system.dim();
  std::vector<HermitianMatrix> hs;
  hs.reserve(epsilons.size());
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    Matrix h = epsilons[i] * Matrix::Identity(d, d) + h_system.matrix() + couplings[i] * v_system.matrix();
    hs.push_back(HermitianMatrix::symmetrized(h));
  }
  return DephasingModel(std::move(hs), step_time);
}

PreparationState::PreparationState(Vector ket, double tol) : ket_(std::move(ket)) {
  if (ket_.size() == 0) throw DimensionError("PreparationState: empty amplitude vector");
  const double n2 = ket_.squaredNorm();
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > tol)
    throw InvariantViolation("PreparationState: sum |gamma(i)|^2 = " + std::to_string(n2) + " is not 1");
}

PreparationState PreparationState::uniform(int d) {
  if (d < 1) throw DimensionError("PreparationState::uniform: dimension must be positive");
  return PreparationState(Vector::Ones(d) / std::sqrt(static_cast<double>(d)));
}

std::string to_string(Axis axis) {
  switch (axis) {
    case Axis::X: return "X";
    case Axis::Y: return "Y";
    case Axis::Custom: return "custom";
  }
  return "custom";
}

Axis axis_from_string(const std::string& name) {
  if (name == "X" || name == "x") return Axis::X;
  if (name == "Y" || name == "y") return Axis::Y;
  if (name == "custom") return Axis::Custom;
  throw ProtocolError("unknown measurement axis '" + name + "'");
}

MeterBasis::MeterBasis(std::vector<Vector> states, std::vector<double> values, Axis axis, double tol)
    : states_(std::move(states)), values_(std::move(values)), axis_(axis) {
  const std::size_t d = states_.size();
  if (d == 0) throw DimensionError("MeterBasis: empty basis");
  if (values_.size() != d) throw DimensionError("MeterBasis: one measurement value per state required");
  for (const auto& s : states_)
    if (static_cast<std::size_t>(s.size()) != d)
      throw DimensionError("MeterBasis: need exactly d states of length d");
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      const Complex g = states_[a].dot(states_[b]);
      const double target = a == b ? 1.0 : 0.0;
      if (std::abs(g - target) > tol) throw InvariantViolation("MeterBasis: states are not orthonormal");
    }
}

MeterBasis MeterBasis::qubit_x() {
  const double s = std::numbers::sqrt2 / 2.0;
  Vector plus(2), minus(2);
  plus << s, s;
  minus << s, -s;
  return MeterBasis({plus, minus}, {1.0, -1.0}, Axis::X);
}

MeterBasis MeterBasis::qubit_y() {
  const double s = std::numbers::sqrt2 / 2.0;
  Vector plus(2), minus(2);
  plus << Complex(s, 0.0), Complex(0.0, -s);
  minus << Complex(s, 0.0), Complex(0.0, s);
  return MeterBasis({plus, minus}, {1.0, -1.0}, Axis::Y);
}

MeterBasis MeterBasis::fourier(int d) {
  if (d < 1) throw DimensionError("MeterBasis::fourier: dimension must be positive");
  std::vector<Vector> states;
  std::vector<double> values;
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int m = 0; m < d; ++m) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = std::polar(norm, 2.0 * std::numbers::pi * m * i / d);
    states.push_back(v);
    values.push_back(static_cast<double>(m));
  }
  if (d == 2) return qubit_x();
  return MeterBasis(std::move(states), std::move(values), Axis::Custom);
}

std::vector<UnitaryMatrix> conditional_unitaries(const DephasingModel& model) {
  std::vector<UnitaryMatrix> out;
  out.reserve(model.hamiltonians().size());
  for (const auto& h : model.hamiltonians()) out.push_back(unitary_from_hamiltonian(h, model.step_time()));
  return out;
}

InducedMeasurement induced_kraus(std::span<const UnitaryMatrix> unitaries, const PreparationState& prep,
                                 const MeterBasis& meter, const Tolerances& tol) {
  const int dp = prep.dim();
  if (static_cast<int>(unitaries.size()) != dp || meter.size() != dp)
    throw DimensionError("induced_kraus: preparation, meter basis and model disagree on probe dimension");
  const Index ds = unitaries.front().dim();

  InducedMeasurement out;
  Matrix total = Matrix::Zero(ds, ds);
  for (int m = 0; m < dp; ++m) {
    Matrix k = Matrix::Zero(ds, ds);
    for (int i = 0; i < dp; ++i) k += std::conj(prep.amplitude(i)) * meter.amplitude(m, i) * unitaries[i].matrix();
    const Matrix e = k.adjoint() * k;
    auto effect = HermitianMatrix::symmetrized(e);
    if ((effect.matrix() - e).norm() > tol.effect_kraus * std::max(1.0, e.norm()))
      throw InvariantViolation("induced_kraus: effect is not K^dag K");
    if (min_eigenvalue(effect) < -tol.povm) throw InvariantViolation("induced_kraus: effect is not positive");
    total += effect.matrix();
    out.kraus.push_back(std::move(k));
    out.effects.push_back(std::move(effect));
  }
  const double defect = (total - Matrix::Identity(ds, ds)).norm();
  if (defect > tol.povm)
    throw InvariantViolation("induced_kraus: |sum_m E_m - 1|_F = " + std::to_string(defect) +
                             " (meter basis not orthonormal?)");
  return out;
}

InducedMeasurement induced_kraus(const DephasingModel& model, const PreparationState& prep, const MeterBasis& meter,
                                 const Tolerances& tol) {
  const auto us = conditional_unitaries(model);
  return induced_kraus(us, prep, meter, tol);
}

MeasurementProtocol::MeasurementProtocol(DephasingModel model, PreparationState preparation,
                                         std::vector<MeterBasis> bases, const Tolerances& tol)
    : preparation_(std::move(preparation)), bases_(std::move(bases)) {
  if (bases_.empty()) throw ProtocolError("MeasurementProtocol: at least one step required");
  step_models_.assign(bases_.size(), model);
  build(tol);
}

MeasurementProtocol MeasurementProtocol::piecewise(std::vector<DephasingModel> step_models,
                                                   PreparationState preparation, std::vector<MeterBasis> bases,
                                                   const Tolerances& tol) {
  if (bases.empty()) throw ProtocolError("MeasurementProtocol: at least one step required");
  if (step_models.size() != bases.size())
    throw ProtocolError("MeasurementProtocol::piecewise: one model per step required");
  MeasurementProtocol p;
  p.step_models_ = std::move(step_models);
  p.preparation_ = std::move(preparation);
  p.bases_ = std::move(bases);
  p.piecewise_ = true;
  p.build(tol);
  return p;
}

void MeasurementProtocol::build(const Tolerances& tol) {
  const int dp = preparation_.dim();
  const int ds = step_models_.front().system_dim();
  for (const auto& m : step_models_) {
    if (m.probe_dim() != dp) throw DimensionError("MeasurementProtocol: model and preparation disagree on d_P");
    if (m.system_dim() != ds) throw DimensionError("MeasurementProtocol: step models disagree on d_S");
  }
  for (const auto& b : bases_)
    if (b.size() != dp) throw DimensionError("MeasurementProtocol: meter basis does not match d_P");

  induced_.clear();
  induced_.reserve(bases_.size());
  if (!piecewise_) {
    // Shared dynamics: compute the unitaries once, and reuse the induced
    // measurement for repeated bases.
    const auto us = conditional_unitaries(step_models_.front());
    for (std::size_t k = 0; k < bases_.size(); ++k) {
      bool reused = false;
      for (std::size_t p = 0; p < k && !reused; ++p)
        if (bases_[p].axis() != Axis::Custom && bases_[p].axis() == bases_[k].axis()) {
          induced_.push_back(induced_[p]);
          reused = true;
        }
      if (!reused) induced_.push_back(induced_kraus(us, preparation_, bases_[k], tol));
    }
  } else {
    for (std::size_t k = 0; k < bases_.size(); ++k)
      induced_.push_back(induced_kraus(step_models_[k], preparation_, bases_[k], tol));
  }
}

MeasurementProtocol MeasurementProtocol::without_step(std::size_t k) const {
  if (k >= steps()) throw ProtocolError("without_step: step index out of range");
  if (steps() == 1) throw ProtocolError("without_step: cannot remove the only step");
  MeasurementProtocol p = *this;
  p.step_models_.erase(p.step_models_.begin() + static_cast<std::ptrdiff_t>(k));
  p.bases_.erase(p.bases_.begin() + static_cast<std::ptrdiff_t>(k));
  p.induced_.erase(p.induced_.begin() + static_cast<std::ptrdiff_t>(k));
  return p;
}

MeasurementProtocol MeasurementProtocol::truncated(std::size_t n) const {
  if (n == 0 || n > steps()) throw ProtocolError("truncated: step count out of range");
  MeasurementProtocol p = *this;
  p.step_models_.resize(n, step_models_.front());
  p.bases_.resize(n, bases_.front());
  p.induced_.resize(n);
  return p;
}

MeasurementProtocol qubit_xy_protocol(const DephasingModel& model, std::span<const Axis> axes,
                                      const Tolerances& tol) {
  if (model.probe_dim() != 2) throw DimensionError("qubit_xy_protocol: probe must be a qubit");
  if (axes.empty()) throw ProtocolError("qubit_xy_protocol: at least one axis required");
  std::vector<MeterBasis> bases;
  for (Axis a : axes) {
    if (a == Axis::X)
      bases.push_back(MeterBasis::qubit_x());
    else if (a == Axis::Y)
      bases.push_back(MeterBasis::qubit_y());
    else
      throw ProtocolError("qubit_xy_protocol: only X and Y axes are supported");
  }
  return MeasurementProtocol(model, PreparationState::uniform(2), std::move(bases), tol);
}

MeasurementProtocol single_axis_protocol(const DephasingModel& model, const PreparationState& prep,
                                         const MeterBasis& meter, std::size_t steps, const Tolerances& tol) {
  if (steps == 0) throw ProtocolError("single_axis_protocol: at least one step required");
  return MeasurementProtocol(model, prep, std::vector<MeterBasis>(steps, meter), tol);
}

HermitianMatrix nonselective_apply(const DephasingModel& model, const PreparationState& prep,
                                   const HermitianMatrix& a, Direction direction) {
  if (a.dim() != model.system_dim()) throw DimensionError("nonselective_apply: operand dimension mismatch");
  if (prep.dim() != model.probe_dim()) throw DimensionError("nonselective_apply: preparation dimension mismatch");
  const auto us = conditional_unitaries(model);
  Matrix out = Matrix::Zero(a.dim(), a.dim());
  for (int i = 0; i < model.probe_dim(); ++i) {
    const Matrix& u = us[static_cast<std::size_t>(i)].matrix();
    if (direction == Direction::State)
      out += prep.weight(i) * (u * a.matrix() * u.adjoint());
    else
      out += prep.weight(i) * (u.adjoint() * a.matrix() * u);
  }
  return HermitianMatrix::symmetrized(out);
}

}  // namespace kclab
