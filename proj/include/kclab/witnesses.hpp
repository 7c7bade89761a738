#pragma once

// Scalar noncommutativity witnesses assembled from KC defects.

#include <span>
#include <string>

#include "kclab/sequence.hpp"

namespace kclab {

enum class WitnessKind { DeltaP, DeltaCorr, Delta21, Delta32, LG };

std::string to_string(WitnessKind kind);

struct WitnessReport {
  WitnessKind kind;
  int n = 0;
  int j = 0;
  std::string axis;
  std::string value_convention;  // "pm1" or "01"
  double value = 0.0;
  bool nonzero = false;  // |value| > tolerance
  double tolerance = 0.0;
  std::string fingerprint;
};

WitnessReport make_witness_report(WitnessKind kind, int n, int j, std::string axis, std::string convention,
                                  double value, const Tolerances& tol, std::string fingerprint = {});

/// Delta_{n,j} = sum over the non-j outcomes of (prod_{k != j} value(m_k)) * delta P_{n,j}.
/// `values` maps outcome labels to measurement values.
double delta_correlation(const MeasurementProtocol& protocol, const DensityMatrix& rho, int n, int j,
                         std::span<const double> values, const Tolerances& tol = {});

/// <sigma_a(t2)>_{t1} - <sigma_a(t2 - t1)> for a two-step single-axis qubit
/// protocol, values +1 (label 0) / -1 (label 1).
double delta_2_1(const MeasurementProtocol& protocol, const DensityMatrix& rho, const Tolerances& tol = {});

/// sum_{m3, m1} m3 m1 delta P_{3,2}(m3, m1) for a three-step single-axis qubit
/// protocol.
double delta_3_2(const MeasurementProtocol& protocol, const DensityMatrix& rho, const Tolerances& tol = {});

struct LGResult {
  double p2_plus_plus;  // P_2(+, +)
  double p1_plus;  // P_1(+), one step of the same duration
  double p2_minus_minus;  // P_2(-, -)
  double delta;  // P_2(+,+) - P_1(+) + P_2(-,-)
  /// sum_{m_1} P_2(m_1, +) - P_1(+), the {0,1}-valued two-time correlation
  /// difference; zero whenever KC holds.
  double delta_kc;
  bool lg_satisfied;  // P_2(+,+) <= P_1(+) + witness tolerance
  /// P_1(+) for a single step of duration 2t (continuous evolution, no
  /// intermediate re-preparation). Diagnostic only.
  double p1_plus_double_time;
  std::string note;
};

/// Two-time Leggett-Garg form P_2(+,+) <= P_1(+) with the {0, 1} value
/// convention (+ -> 1, - -> 0) on a two-step X protocol.
LGResult lg_check(const MeasurementProtocol& protocol, const DensityMatrix& rho, const Tolerances& tol = {});

}  // namespace kclab
