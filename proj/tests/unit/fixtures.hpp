#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "kclab/dephasing.hpp"
#include "kclab/linalg.hpp"

namespace fixtures {

using namespace kclab;

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

// H_up = sigma_z, H_down = sigma_x.
inline DephasingModel pauli_model(double t = kHalfPi) {
  return DephasingModel({HermitianMatrix(pauli::z()), HermitianMatrix(pauli::x())}, t);
}

inline MeasurementProtocol pauli_protocol(Axis axis, std::size_t steps, double t = kHalfPi) {
  std::vector<Axis> axes(steps, axis);
  return qubit_xy_protocol(pauli_model(t), axes);
}

inline Vector plus_y_ket() {
  Vector v(2);
  v << 1.0, Complex(0.0, 1.0);
  return v / std::numbers::sqrt2;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace fixtures
