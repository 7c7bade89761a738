#include "kclab/witnesses.hpp"

#include <cmath>

#include "kclab/errors.hpp"

namespace kclab {

namespace {

void require_qubit_single_axis(const MeasurementProtocol& protocol, std::size_t steps, const char* what) {
  if (protocol.probe_dim() != 2) throw ProtocolError(std::string(what) + ": probe must be a qubit");
  if (protocol.steps() != steps)
    throw ProtocolError(std::string(what) + ": expected a " + std::to_string(steps) + "-step protocol");
  const Axis a = protocol.basis(0).axis();
  if (a == Axis::Custom) throw ProtocolError(std::string(what) + ": steps must measure along X or Y");
  for (std::size_t k = 1; k < steps; ++k)
    if (protocol.basis(k).axis() != a) throw ProtocolError(std::string(what) + ": all steps must share one axis");
}

constexpr double pm1(int label) { return label == 0 ? 1.0 : -1.0; }

}  // namespace

std::string to_string(WitnessKind kind) {
  switch (kind) {
    case WitnessKind::DeltaP: return "deltaP";
    case WitnessKind::DeltaCorr: return "delta_corr";
    case WitnessKind::Delta21: return "delta21";
    case WitnessKind::Delta32: return "delta32";
    case WitnessKind::LG: return "lg";
  }
  return "unknown";
}

WitnessReport make_witness_report(WitnessKind kind, int n, int j, std::string axis, std::string convention,
                                  double value, const Tolerances& tol, std::string fingerprint) {
  WitnessReport r;
  r.kind = kind;
  r.n = n;
  r.j = j;
  r.axis = std::move(axis);
  r.value_convention = std::move(convention);
  r.value = value;
  r.tolerance = tol.witness;
  r.nonzero = std::abs(value) > tol.witness;
  r.fingerprint = std::move(fingerprint);
  return r;
}

double delta_correlation(const MeasurementProtocol& protocol, const DensityMatrix& rho, int n, int j,
                         std::span<const double> values, const Tolerances& tol) {
  const int d = protocol.probe_dim();
  if (static_cast<int>(values.size()) != d) throw ProtocolError("delta_correlation: one value per outcome required");
  if (n < 2 || j < 1 || j > n - 1) throw ProtocolError("delta_correlation: need n >= 2 and 1 <= j <= n-1");
  if (static_cast<std::size_t>(n) > protocol.steps()) throw ProtocolError("delta_correlation: n exceeds protocol");
  check_enumeration_capacity(d, n - 1, tol);

  std::size_t count = 1;
  for (int k = 0; k < n - 1; ++k) count *= static_cast<std::size_t>(d);
  double total = 0.0;
  OutcomeSequence fixed(static_cast<std::size_t>(n - 1));
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rest = idx;
    double weight = 1.0;
    for (int k = n - 2; k >= 0; --k) {
      fixed[static_cast<std::size_t>(k)] = static_cast<int>(rest % static_cast<std::size_t>(d));
      rest /= static_cast<std::size_t>(d);
      weight *= values[static_cast<std::size_t>(fixed[static_cast<std::size_t>(k)])];
    }
    if (weight == 0.0) continue;
    total += weight * kc_defect_state(protocol, rho, n, j, fixed, tol);
  }
  return total;
}

double delta_2_1(const MeasurementProtocol& protocol, const DensityMatrix& rho, const Tolerances& tol) {
  require_qubit_single_axis(protocol, 2, "delta_2_1");
  const auto p2 = full_distribution(protocol, rho, 2, tol);
  double with_intermediate = 0.0;
  for (int m2 = 0; m2 < 2; ++m2)
    for (int m1 = 0; m1 < 2; ++m1) with_intermediate += pm1(m2) * p2({m1, m2});
  const auto p1 = full_distribution(protocol.without_step(0), rho, 1, tol);
  double without = 0.0;
  for (int m2 = 0; m2 < 2; ++m2) without += pm1(m2) * p1({m2});
  return with_intermediate - without;
}

double delta_3_2(const MeasurementProtocol& protocol, const DensityMatrix& rho, const Tolerances& tol) {
  require_qubit_single_axis(protocol, 3, "delta_3_2");
  double total = 0.0;
  for (int m3 = 0; m3 < 2; ++m3)
    for (int m1 = 0; m1 < 2; ++m1)
      total += pm1(m3) * pm1(m1) * kc_defect_state(protocol, rho, 3, 2, {m1, m3}, tol);
  return total;
}

LGResult lg_check(const MeasurementProtocol& protocol, const DensityMatrix& rho, const Tolerances& tol) {
  require_qubit_single_axis(protocol, 2, "lg_check");
  if (protocol.basis(0).axis() != Axis::X) throw ProtocolError("lg_check: the two-time form uses X measurements");

  LGResult r{};
  const auto p2 = full_distribution(protocol, rho, 2, tol);
  r.p2_plus_plus = p2({0, 0});
  r.p2_minus_minus = p2({1, 1});
  r.p1_plus = full_distribution(protocol.without_step(0), rho, 1, tol)({0});
  r.delta = r.p2_plus_plus - r.p1_plus + r.p2_minus_minus;
  r.delta_kc = r.p2_plus_plus + p2({1, 0}) - r.p1_plus;
  r.lg_satisfied = r.p2_plus_plus <= r.p1_plus + tol.witness;

  const auto& model = protocol.model();
  const auto doubled =
      MeasurementProtocol(model.with_step_time(2.0 * model.step_time()), protocol.preparation(), {protocol.basis(0)}, tol);
  r.p1_plus_double_time = full_distribution(doubled, rho, 1, tol)({0});
  r.note =
      "values + -> 1, - -> 0; both steps re-prepare |+x>, so P_1(+) is a single step of the same duration. "
      "delta = 0 with P_2(-,-) >= 0 implies P_2(+,+) <= P_1(+). Under re-preparation delta is not a KC "
      "quantity (it equals P_2(-,-) - P_2(-,+) when KC holds); delta_kc = sum_{m_1} P_2(m_1, +) - P_1(+) is. "
      "Post-selection without re-preparation is not modelled; p1_plus_double_time gives the single-step "
      "probability after duration 2t.";
  return r;
}

}  // namespace kclab
