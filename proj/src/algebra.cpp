#include "kclab/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "kclab/errors.hpp"

namespace kclab {

namespace {

void require_common_dim(std::span<const HermitianMatrix> ops, const char* what) {
  if (ops.empty()) throw PreconditionError(std::string(what) + ": empty operator list");
  for (const auto& op : ops)
    if (op.dim() != ops.front().dim()) throw DimensionError(std::string(what) + ": operators of different size");
}

// Two-pass Gram-Schmidt step against an orthonormal basis; the candidate is
// normalised first so the rank cut is relative. Candidates below rank_tol *
// reference are rounding noise (e.g. a product of orthogonal projectors).
bool try_extend(std::vector<Matrix>& basis, const Matrix& candidate, double rank_tol, double reference) {
  const double scale = hs_norm(candidate);
  if (!(scale > rank_tol * reference)) return false;
  Matrix r = candidate / scale;
  for (int pass = 0; pass < 2; ++pass)
    for (const Matrix& b : basis) r -= hs_inner(b, r) * b;
  const double n = hs_norm(r);
  if (n < rank_tol) return false;
  basis.push_back(r / n);
  return true;
}

}  // namespace

AlgebraBasis generate_algebra(std::span<const HermitianMatrix> generators, const Tolerances& tol) {
  require_common_dim(generators, "generate_algebra");
  const Index d = generators.front().dim();
  const auto limit = static_cast<std::size_t>(d * d);

  AlgebraBasis out;
  out.generators.assign(generators.begin(), generators.end());
  double reference = std::sqrt(static_cast<double>(d));
  for (const auto& g : generators) reference = std::max(reference, hs_norm(g.matrix()));
  // Generators at noise level would turn rounding errors into new directions.
  std::vector<Matrix> gens;
  for (const auto& g : generators)
    if (hs_norm(g.matrix()) > tol.rank * reference) gens.push_back(g.matrix());

  try_extend(out.basis, Matrix::Identity(d, d), tol.rank, reference);
  for (const auto& g : gens) try_extend(out.basis, g, tol.rank, reference);

  // Closing under right multiplication by the generators closes the span of
  // all words, hence under arbitrary products.
  std::size_t frontier = 0;
  while (frontier < out.basis.size() && out.basis.size() < limit) {
    const std::size_t end = out.basis.size();
    for (std::size_t k = frontier; k < end && out.basis.size() < limit; ++k)
      for (const auto& g : gens) {
        try_extend(out.basis, out.basis[k] * g, tol.rank, hs_norm(g));
        if (out.basis.size() >= limit) break;
      }
    frontier = end;
  }
  out.closed = true;
  return out;
}

CommutativityResult is_commutative(std::span<const HermitianMatrix> generators, const Tolerances& tol) {
  std::vector<Matrix> ms;
  ms.reserve(generators.size());
  for (const auto& g : generators) ms.push_back(g.matrix());
  return is_commutative(std::span<const Matrix>(ms), tol);
}

CommutativityResult is_commutative(std::span<const Matrix> elements, const Tolerances& tol) {
  if (elements.empty()) throw PreconditionError("is_commutative: empty operator list");
  double worst = 0.0;
  for (std::size_t i = 0; i < elements.size(); ++i)
    for (std::size_t j = i + 1; j < elements.size(); ++j)
      worst = std::max(worst, commutator_norm(elements[i], elements[j]));
  return {worst <= tol.commutator, worst};
}

ClassicalityResult classical_wrt_state(const DensityMatrix& rho, const AlgebraBasis& algebra, const Tolerances& tol) {
  if (!algebra.closed) throw PreconditionError("classical_wrt_state: algebra basis is not closed");
  double worst = 0.0;
  const auto& b = algebra.basis;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      if (b[i].rows() != rho.dim()) throw DimensionError("classical_wrt_state: state and algebra differ in size");
      worst = std::max(worst, std::abs((rho.matrix() * commutator(b[i], b[j])).trace()));
    }
  return {worst <= tol.commutator, worst};
}

NondegeneracyResult effect_nondegenerate(const HermitianMatrix& e, double gap_tol) {
  if (e.dim() == 1) return {true, std::numeric_limits<double>::infinity()};
  const auto eig = hermitian_eig(e);
  double gap = std::numeric_limits<double>::infinity();
  for (Index k = 1; k < eig.values.size(); ++k) gap = std::min(gap, eig.values(k) - eig.values(k - 1));
  return {gap > gap_tol, gap};
}

SpacingAnalysis spacing_analysis(std::span<const HermitianMatrix> hamiltonians, const Tolerances& tol) {
  require_common_dim(hamiltonians, "spacing_degeneracy_predicate");
  const auto comm = is_commutative(hamiltonians, tol);
  if (!comm.commutative)
    throw PreconditionError("spacing_degeneracy_predicate: Hamiltonians do not commute (max |[H_i, H_j]|_F = " +
                            std::to_string(comm.max_commutator_norm) + ")");
  const Index d = hamiltonians.front().dim();

  // A generic real combination separates every joint eigenspace.
  Matrix mix = Matrix::Zero(d, d);
  double c = 1.0;
  for (const auto& h : hamiltonians) {
    mix += c * h.matrix();
    c = std::fmod(c * 1.6180339887498949 + 0.3141592653589793, 1.0) + 0.5;
  }
  SpacingAnalysis out;
  out.eigenbasis = hermitian_eig(HermitianMatrix::symmetrized(mix)).vectors.matrix();

  out.levels.resize(hamiltonians.size());
  for (std::size_t i = 0; i < hamiltonians.size(); ++i) {
    const Matrix diag = out.eigenbasis.adjoint() * hamiltonians[i].matrix() * out.eigenbasis;
    for (Index l = 0; l < d; ++l) out.levels[i].push_back(diag(l, l).real());
  }
  for (int l = 0; l < d; ++l)
    for (int lp = l + 1; lp < d; ++lp) {
      const double ref = out.levels[0][l] - out.levels[0][lp];
      double dev = 0.0;
      for (const auto& lev : out.levels) dev = std::max(dev, std::abs((lev[l] - lev[lp]) - ref));
      if (dev <= tol.spacing) out.pairs.push_back({l, lp, dev});
    }
  return out;
}

std::vector<LevelPair> spacing_degeneracy_predicate(std::span<const HermitianMatrix> hamiltonians,
                                                    const Tolerances& tol) {
  return spacing_analysis(hamiltonians, tol).pairs;
}

SpacingCrossCheck spacing_cross_check(const SpacingAnalysis& analysis, std::span<const HermitianMatrix> effects,
                                      const Tolerances& tol) {
  SpacingCrossCheck out{true, 0.0, 0.0, 0.0};
  const Matrix& v = analysis.eigenbasis;
  for (const auto& e : effects) {
    if (e.dim() != v.rows()) throw DimensionError("spacing_cross_check: effect and Hamiltonians differ in size");
    Matrix diag = v.adjoint() * e.matrix() * v;
    RealVector on(diag.rows());
    for (Index l = 0; l < diag.rows(); ++l) on(l) = diag(l, l).real();
    diag.diagonal().setZero();
    out.max_offdiagonal = std::max(out.max_offdiagonal, diag.norm());

    RealVector sorted = on;
    std::sort(sorted.begin(), sorted.end());
    const auto direct = hermitian_eig(e).values;
    out.max_spectrum_mismatch = std::max(out.max_spectrum_mismatch, (sorted - direct).cwiseAbs().maxCoeff());

    for (const auto& p : analysis.pairs)
      out.max_effect_gap = std::max(out.max_effect_gap, std::abs(on(p.first) - on(p.second)));
  }
  out.confirmed = out.max_effect_gap <= tol.spacing && out.max_offdiagonal <= tol.spacing &&
                  out.max_spectrum_mismatch <= tol.spacing;
  return out;
}

AlgebraBasis commutant_basis(std::span<const Matrix> ops, const Tolerances& tol) {
  if (ops.empty()) throw PreconditionError("commutant_basis: empty operator list");
  const Index d = ops.front().rows();
  for (const auto& g : ops)
    if (g.rows() != d || g.cols() != d) throw DimensionError("commutant_basis: operators of different size");

  // Column-major vec: vec(AG) = (G^T (x) 1) vec(A), vec(GA) = (1 (x) G) vec(A).
  const Index n = d * d;
  const Matrix id = Matrix::Identity(d, d);
  Matrix stacked(static_cast<Index>(ops.size()) * n, n);
  for (std::size_t j = 0; j < ops.size(); ++j)
    stacked.middleRows(static_cast<Index>(j) * n, n) = kron(ops[j].transpose(), id) - kron(id, ops[j]);

  Eigen::BDCSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw NumericalFault("commutant_basis: SVD did not converge");
  const RealVector& sv = svd.singularValues();

  AlgebraBasis out;
  for (Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= tol.nullspace) {
      Matrix a = Eigen::Map<const Matrix>(svd.matrixV().col(k).data(), d, d);
      try_extend(out.basis, a, tol.rank, 1.0);
    }
    if (sv(k) > 1e-3 * tol.nullspace && sv(k) < 1e3 * tol.nullspace) out.cut_spectrum.push_back(sv(k));
  }
  out.closed = true;
  return out;
}

EntanglementResult zero_entanglement_condition(const DensityMatrix& rho, const DephasingModel& model,
                                               const Tolerances& tol) {
  if (rho.dim() != model.system_dim())
    throw DimensionError("zero_entanglement_condition: state and model differ in system dimension");
  const auto us = conditional_unitaries(model);
  std::vector<Matrix> evolved;
  for (const auto& u : us) evolved.push_back(u.matrix() * rho.matrix() * u.matrix().adjoint());

  EntanglementResult out{true, {}, {}};
  for (std::size_t i = 0; i < us.size(); ++i)
    for (std::size_t j = i + 1; j < us.size(); ++j) {
      out.state_differences.push_back((evolved[i] - evolved[j]).norm());
      if (out.state_differences.back() > tol.entanglement) out.zero_entanglement = false;
      if (us.size() > 2) {
        out.unitary_commutators.push_back(commutator_norm(us[i].matrix(), us[j].matrix()));
        if (out.unitary_commutators.back() > tol.entanglement) out.zero_entanglement = false;
      }
    }
  return out;
}

AlgebraReport analyze_algebra(const MeasurementProtocol& protocol, const Tolerances& tol) {
  AlgebraReport r;
  std::vector<HermitianMatrix> gens;
  for (std::size_t k = 0; k < (protocol.is_piecewise() ? protocol.steps() : 1); ++k)
    for (const auto& h : protocol.step_model(k).hamiltonians()) gens.push_back(h);

  const auto algebra = generate_algebra(gens, tol);
  r.dimension = algebra.dimension();
  r.closed = algebra.closed;
  const auto comm = is_commutative(std::span<const HermitianMatrix>(gens), tol);
  r.commutative = comm.commutative;
  r.max_commutator_norm = comm.max_commutator_norm;

  r.all_effects_nondegenerate = true;
  r.all_effects_degenerate = true;
  for (std::size_t k = 0; k < protocol.steps(); ++k) {
    const auto& meas = protocol.step(k);
    for (int m = 0; m < meas.outcomes(); ++m) {
      const auto res = effect_nondegenerate(meas.effects[static_cast<std::size_t>(m)], tol.gap);
      r.effects.push_back({k, m, res});
      r.all_effects_nondegenerate = r.all_effects_nondegenerate && res.nondegenerate;
      r.all_effects_degenerate = r.all_effects_degenerate && !res.nondegenerate;
    }
  }

  std::vector<Matrix> ops;
  for (const auto& h : gens) ops.push_back(h.matrix());
  const auto commutant = commutant_basis(ops, tol);
  r.commutant_dimension = commutant.dimension();
  r.commutant_cut_spectrum = commutant.cut_spectrum;

  ops.clear();
  for (std::size_t k = 0; k < (protocol.is_piecewise() ? protocol.steps() : 1); ++k)
    for (const auto& u : conditional_unitaries(protocol.step_model(k))) ops.push_back(u.matrix());
  r.unitary_commutant_dimension = commutant_basis(ops, tol).dimension();
  return r;
}

}  // namespace kclab
