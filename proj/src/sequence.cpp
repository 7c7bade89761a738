#include "kclab/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kclab/errors.hpp"

namespace kclab {

namespace {

void check_labels(const MeasurementProtocol& protocol, std::span<const std::size_t> steps,
                  std::span<const int> outcomes) {
  if (steps.size() != outcomes.size()) throw LabelError("one outcome per step required");
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k] >= protocol.steps()) throw ProtocolError("sequence is longer than the protocol");
    const int d = protocol.step(steps[k]).outcomes();
    if (outcomes[k] < 0 || outcomes[k] >= d)
      throw LabelError("outcome label " + std::to_string(outcomes[k]) + " invalid for step " +
                       std::to_string(steps[k] + 1));
  }
}

std::vector<std::size_t> first_steps(std::size_t n) {
  std::vector<std::size_t> s(n);
  std::iota(s.begin(), s.end(), std::size_t{0});
  return s;
}

void check_defect_args(const MeasurementProtocol& protocol, int n, int j, const OutcomeSequence& fixed) {
  if (n < 2) throw ProtocolError("KC defect needs n >= 2");
  if (static_cast<std::size_t>(n) > protocol.steps()) throw ProtocolError("n exceeds the protocol length");
  if (j == n)
    throw ProtocolError("j = n marginalises the final measurement, which is always consistent (defect 0)");
  if (j < 1 || j > n) throw ProtocolError("j must satisfy 1 <= j <= n-1");
  if (fixed.size() != static_cast<std::size_t>(n - 1)) throw LabelError("fixed outcomes must have length n-1");
}

// Step indices / outcomes of the full sequence with m_j inserted at position j-1.
OutcomeSequence with_inserted(const OutcomeSequence& fixed, int j, int mj) {
  OutcomeSequence seq = fixed;
  seq.insert(seq.begin() + (j - 1), mj);
  return seq;
}

std::vector<std::size_t> steps_without(int n, int j) {
  std::vector<std::size_t> s;
  for (int k = 0; k < n; ++k)
    if (k != j - 1) s.push_back(static_cast<std::size_t>(k));
  return s;
}

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int k = 0; k < exp; ++k) r *= base;
  return r;
}

}  // namespace

Matrix history_matrix(const MeasurementProtocol& protocol, std::span<const std::size_t> steps,
                      std::span<const int> outcomes) {
  check_labels(protocol, steps, outcomes);
  const Index ds = protocol.system_dim();
  Matrix r = Matrix::Identity(ds, ds);
  for (std::size_t k = 0; k < steps.size(); ++k) r = protocol.step(steps[k]).kraus[outcomes[k]] * r;
  return r.adjoint() * r;
}

HistoryOperator history_operator(const MeasurementProtocol& protocol, const OutcomeSequence& seq,
                                 const Tolerances& tol) {
  if (seq.empty()) throw LabelError("history_operator: empty sequence");
  if (seq.size() > protocol.steps()) throw ProtocolError("history_operator: sequence longer than protocol");
  const auto steps = first_steps(seq.size());
  auto q = HermitianMatrix::symmetrized(history_matrix(protocol, steps, seq));
  // 0 <= Q <= 1
  Eigen::SelfAdjointEigenSolver<Matrix> solver(q.matrix(), Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  if (ev(0) < -tol.povm || ev(ev.size() - 1) > 1.0 + tol.povm)
    throw NumericalFault("history_operator: spectrum leaves [0, 1]");
  return HistoryOperator{std::move(q), seq};
}

double joint_probability(const DensityMatrix& rho, const HermitianMatrix& q, const Tolerances& tol) {
  if (rho.dim() != q.dim()) throw DimensionError("joint_probability: dimension mismatch");
  const Complex p = hs_inner(rho.matrix(), q.matrix());  // tr(rho q), rho Hermitian
  if (std::abs(p.imag()) > 1e-12 * std::max(1.0, std::abs(p.real())))
    throw NumericalFault("joint_probability: imaginary residue " + std::to_string(p.imag()));
  double v = p.real();
  if (v < 0.0) {
    if (v < -tol.probability_clip) throw NumericalFault("joint_probability: negative probability " + std::to_string(v));
    v = 0.0;
  } else if (v > 1.0) {
    if (v > 1.0 + tol.probability_clip) throw NumericalFault("joint_probability: probability above 1");
    v = 1.0;
  }
  return v;
}

JointDistribution::JointDistribution(int steps, int outcomes, std::vector<double> probabilities)
    : steps_(steps), outcomes_(outcomes), probabilities_(std::move(probabilities)) {
  if (steps < 1 || outcomes < 1) throw DimensionError("JointDistribution: steps and outcomes must be positive");
  if (probabilities_.size() != ipow(static_cast<std::size_t>(outcomes), steps))
    throw DimensionError("JointDistribution: table size is not outcomes^steps");
}

std::size_t JointDistribution::index_of(const OutcomeSequence& seq) const {
  if (seq.size() != static_cast<std::size_t>(steps_)) throw LabelError("JointDistribution: sequence length mismatch");
  std::size_t idx = 0;
  for (int m : seq) {
    if (m < 0 || m >= outcomes_) throw LabelError("JointDistribution: outcome label out of range");
    idx = idx * static_cast<std::size_t>(outcomes_) + static_cast<std::size_t>(m);
  }
  return idx;
}

OutcomeSequence JointDistribution::sequence(std::size_t index) const {
  OutcomeSequence seq(static_cast<std::size_t>(steps_));
  for (int k = steps_ - 1; k >= 0; --k) {
    seq[static_cast<std::size_t>(k)] = static_cast<int>(index % static_cast<std::size_t>(outcomes_));
    index /= static_cast<std::size_t>(outcomes_);
  }
  return seq;
}

double JointDistribution::total() const { return std::accumulate(probabilities_.begin(), probabilities_.end(), 0.0); }

JointDistribution JointDistribution::marginalize(int j) const {
  if (steps_ < 2) throw ProtocolError("marginalize: need at least two steps");
  if (j < 1 || j > steps_) throw ProtocolError("marginalize: step out of range");
  std::vector<double> out(ipow(static_cast<std::size_t>(outcomes_), steps_ - 1), 0.0);
  for (std::size_t idx = 0; idx < probabilities_.size(); ++idx) {
    OutcomeSequence seq = sequence(idx);
    seq.erase(seq.begin() + (j - 1));
    std::size_t r = 0;
    for (int m : seq) r = r * static_cast<std::size_t>(outcomes_) + static_cast<std::size_t>(m);
    out[r] += probabilities_[idx];
  }
  return JointDistribution(steps_ - 1, outcomes_, std::move(out));
}

void check_enumeration_capacity(int outcomes, int n, const Tolerances& tol) {
  double count = std::pow(static_cast<double>(outcomes), n);
  if (count > static_cast<double>(tol.enumeration_cap))
    throw CapacityError("enumeration of d_P^n = " + std::to_string(outcomes) + "^" + std::to_string(n) + " = " +
                        std::to_string(static_cast<long double>(count)) + " sequences exceeds the cap of " +
                        std::to_string(tol.enumeration_cap));
}

JointDistribution full_distribution(const MeasurementProtocol& protocol, const DensityMatrix& rho, int n,
                                    const Tolerances& tol) {
  if (n < 1 || static_cast<std::size_t>(n) > protocol.steps())
    throw ProtocolError("full_distribution: n must be in [1, protocol steps]");
  if (rho.dim() != protocol.system_dim()) throw DimensionError("full_distribution: state dimension mismatch");
  const int d = protocol.probe_dim();
  check_enumeration_capacity(d, n, tol);

  std::vector<double> probs;
  probs.reserve(ipow(static_cast<std::size_t>(d), n));
  const Index ds = protocol.system_dim();

  // Depth-first in lexicographic order; prefixes[k] = K_{m_k} ... K_{m_1}.
  std::vector<Matrix> prefixes(static_cast<std::size_t>(n) + 1, Matrix::Identity(ds, ds));
  OutcomeSequence seq(static_cast<std::size_t>(n), 0);
  for (int k = 0; k < n; ++k) prefixes[k + 1] = protocol.step(k).kraus[0] * prefixes[k];
  while (true) {
    const Matrix& r = prefixes[static_cast<std::size_t>(n)];
    probs.push_back(joint_probability(rho, HermitianMatrix::symmetrized(r.adjoint() * r), tol));
    int k = n - 1;
    while (k >= 0 && seq[static_cast<std::size_t>(k)] == d - 1) --k;
    if (k < 0) break;
    ++seq[static_cast<std::size_t>(k)];
    for (int l = k + 1; l < n; ++l) seq[static_cast<std::size_t>(l)] = 0;
    for (int l = k; l < n; ++l)
      prefixes[static_cast<std::size_t>(l) + 1] =
          protocol.step(static_cast<std::size_t>(l)).kraus[seq[static_cast<std::size_t>(l)]] *
          prefixes[static_cast<std::size_t>(l)];
  }
  JointDistribution dist(n, d, std::move(probs));
  if (std::abs(dist.total() - 1.0) > tol.distribution_sum)
    throw NumericalFault("full_distribution: probabilities sum to " + std::to_string(dist.total()));
  return dist;
}

HermitianMatrix kc_defect_operator(const MeasurementProtocol& protocol, int n, int j, const OutcomeSequence& fixed,
                                   const Tolerances&) {
  check_defect_args(protocol, n, j, fixed);
  const auto all = first_steps(static_cast<std::size_t>(n));
  const auto reduced = steps_without(n, j);
  const int dj = protocol.step(static_cast<std::size_t>(j - 1)).outcomes();
  Matrix d = -history_matrix(protocol, reduced, fixed);
  for (int mj = 0; mj < dj; ++mj) d += history_matrix(protocol, all, with_inserted(fixed, j, mj));
  return HermitianMatrix::symmetrized(d);
}

double kc_defect_state(const MeasurementProtocol& protocol, const DensityMatrix& rho, int n, int j,
                       const OutcomeSequence& fixed, const Tolerances& tol) {
  check_defect_args(protocol, n, j, fixed);
  if (rho.dim() != protocol.system_dim()) throw DimensionError("kc_defect_state: state dimension mismatch");
  const auto all = first_steps(static_cast<std::size_t>(n));
  const auto reduced = steps_without(n, j);
  const int dj = protocol.step(static_cast<std::size_t>(j - 1)).outcomes();
  double sum = 0.0;
  for (int mj = 0; mj < dj; ++mj)
    sum += joint_probability(
        rho, HermitianMatrix::symmetrized(history_matrix(protocol, all, with_inserted(fixed, j, mj))), tol);
  return sum - joint_probability(rho, HermitianMatrix::symmetrized(history_matrix(protocol, reduced, fixed)), tol);
}

namespace {

KCReport check_kc_impl(const MeasurementProtocol& protocol, int n_max, const DensityMatrix* rho,
                       const Tolerances& tol) {
  if (n_max < 1) throw ProtocolError("check_kc_all: n_max must be >= 1");
  if (static_cast<std::size_t>(n_max) > protocol.steps())
    throw ProtocolError("check_kc_all: n_max exceeds the protocol length");
  const int d = protocol.probe_dim();
  check_enumeration_capacity(d, n_max, tol);

  KCReport report;
  report.n_max = n_max;
  report.tolerances = tol;
  if (rho != nullptr) report.max_state_defect = 0.0;

  for (int n = 2; n <= n_max; ++n) {
    const std::size_t count = ipow(static_cast<std::size_t>(d), n - 1);
    for (int j = 1; j <= n - 1; ++j) {
      for (std::size_t idx = 0; idx < count; ++idx) {
        OutcomeSequence fixed(static_cast<std::size_t>(n - 1));
        std::size_t rest = idx;
        for (int k = n - 2; k >= 0; --k) {
          fixed[static_cast<std::size_t>(k)] = static_cast<int>(rest % static_cast<std::size_t>(d));
          rest /= static_cast<std::size_t>(d);
        }
        const auto dop = kc_defect_operator(protocol, n, j, fixed, tol);
        KCDefect entry{n, j, fixed, dop.matrix().norm(), std::nullopt};
        if (rho != nullptr) {
          entry.state_defect = kc_defect_state(protocol, *rho, n, j, fixed, tol);
          report.max_state_defect = std::max(*report.max_state_defect, std::abs(*entry.state_defect));
        }
        report.max_operator_defect = std::max(report.max_operator_defect, entry.operator_norm);
        if (entry.operator_norm > tol.kc) {
          report.consistent = false;
          if (n == 2) report.n2j1_consistent = false;
        }
        report.defects.push_back(std::move(entry));
      }
    }
  }
  report.n2j1_decides = report.n2j1_consistent == report.consistent;
  return report;
}

}  // namespace

KCReport check_kc_all(const MeasurementProtocol& protocol, int n_max, const Tolerances& tol) {
  return check_kc_impl(protocol, n_max, nullptr, tol);
}

KCReport check_kc_all(const MeasurementProtocol& protocol, int n_max, const DensityMatrix& rho,
                      const Tolerances& tol) {
  return check_kc_impl(protocol, n_max, &rho, tol);
}

FixedPointResult fixed_point_check(const HermitianMatrix& a, const DephasingModel& model,
                                   const PreparationState& prep, const Tolerances& tol) {
  for (int i = 0; i < prep.dim(); ++i)
    if (!(prep.weight(i) > 0.0))
      throw PreconditionError("fixed_point_check: preparation has zero weight on pointer state " + std::to_string(i));
  FixedPointResult out;
  out.residual = (nonselective_apply(model, prep, a, Direction::Observable).matrix() - a.matrix()).norm();
  out.is_fixed = out.residual <= tol.fixed_point;
  double max_comm = 0.0;
  for (const auto& h : model.hamiltonians()) {
    out.commutator_norms.push_back(commutator_norm(h.matrix(), a.matrix()));
    max_comm = std::max(max_comm, out.commutator_norms.back());
  }
  out.commutes = max_comm <= tol.commutator;
  out.resonant = false;
  if (out.is_fixed != out.commutes) {
    constexpr double margin = 1e3;
    const bool residual_clear = out.residual > margin * tol.fixed_point;
    const bool commutator_clear = max_comm > margin * tol.commutator;
    if (out.is_fixed) {
      double max_u = 0.0;
      for (const auto& u : conditional_unitaries(model)) max_u = std::max(max_u, commutator_norm(u.matrix(), a.matrix()));
      out.resonant = max_u <= margin * tol.commutator;
    }
    // One side is far above its cut while the other is below its own.
    if ((out.is_fixed && commutator_clear && !out.resonant) || (out.commutes && residual_clear))
      throw NumericalFault("fixed_point_check: fixed-point and commutant predicates disagree (residual " +
                           std::to_string(out.residual) + ", max commutator " + std::to_string(max_comm) + ")");
  }
  return out;
}

}  // namespace kclab
