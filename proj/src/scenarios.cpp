#include "kclab/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "kclab/algebra.hpp"
#include "kclab/errors.hpp"
#include "kclab/parallel.hpp"
#include "kclab/witnesses.hpp"

namespace kclab {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::normal(double sigma) { return boost::random::normal_distribution<double>(0.0, sigma)(engine_); }

double Rng::uniform(double lo, double hi) {
  return boost::random::uniform_real_distribution<double>(lo, hi)(engine_);
}

Complex Rng::complex_normal(double sigma) {
  const double s = sigma / std::numbers::sqrt2;
  const double re = normal(s);
  const double im = normal(s);
  return {re, im};
}

UnitaryMatrix haar_unitary(Rng& rng, int d) {
  Matrix z(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) z(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return UnitaryMatrix(q);
}

HermitianMatrix gaussian_hermitian(Rng& rng, int d, double scale) {
  Matrix h(d, d);
  for (int i = 0; i < d; ++i) {
    h(i, i) = rng.normal(scale);
    for (int j = i + 1; j < d; ++j) {
      h(i, j) = rng.complex_normal(scale);
      h(j, i) = std::conj(h(i, j));
    }
  }
  return HermitianMatrix(h);
}

DephasingModel random_model(std::uint64_t seed, int probe_dim, int system_dim, bool commuting, double scale,
                            double step_time) {
  if (probe_dim < 2 || probe_dim > 4) throw DimensionError("random_model: d_P must be in [2, 4]");
  if (system_dim < 2 || system_dim > 16) throw DimensionError("random_model: d_S must be in [2, 16]");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw PreconditionError("random_model: scale must be positive");
  Rng rng(seed);
  std::vector<HermitianMatrix> hams;
  if (commuting) {
    const Matrix v = haar_unitary(rng, system_dim).matrix();
    for (int i = 0; i < probe_dim; ++i) {
      RealVector spectrum(system_dim);
      for (int k = 0; k < system_dim; ++k) spectrum(k) = rng.uniform(-scale, scale);
      hams.push_back(HermitianMatrix::symmetrized(v * spectrum.cast<Complex>().asDiagonal() * v.adjoint()));
    }
    return DephasingModel(std::move(hams), step_time);
  }
  for (int attempt = 0; attempt < 100; ++attempt) {
    hams.clear();
    for (int i = 0; i < probe_dim; ++i) hams.push_back(gaussian_hermitian(rng, system_dim, scale));
    if (is_commutative(std::span<const HermitianMatrix>(hams)).max_commutator_norm >= 1e-6)
      return DephasingModel(std::move(hams), step_time);
  }
  throw NumericalFault("random_model: could not draw a noncommuting family");
}

DensityMatrix random_density(std::uint64_t seed, int d) {
  Rng rng(seed);
  Matrix g(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = rng.complex_normal();
  const Matrix rho = g * g.adjoint();
  return DensityMatrix(HermitianMatrix::symmetrized(rho / rho.trace().real()).matrix());
}

Vector random_ket(std::uint64_t seed, int d) {
  Rng rng(seed);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.complex_normal();
  return v.normalized();
}

HermitianMatrix random_hermitian(std::uint64_t seed, int d, double scale) {
  Rng rng(seed);
  return gaussian_hermitian(rng, d, scale);
}

DephasingModel nv_center_model(int nuclei, double omega, double electron_splitting,
                               std::span<const std::array<double, 3>> couplings, double step_time) {
  if (nuclei < 1 || nuclei > 5) throw DimensionError("nv_center_model: nuclei count must be in [1, 5]");
  if (static_cast<int>(couplings.size()) != nuclei)
    throw DimensionError("nv_center_model: one coupling vector per nucleus required");
  const Index d = Index{1} << nuclei;
  const std::array<Matrix, 3> paulis{pauli::x(), pauli::y(), pauli::z()};

  auto site_op = [&](int site, const Matrix& op) {
    Matrix out = Matrix::Identity(1, 1);
    for (int k = 0; k < nuclei; ++k) out = kron(out, k == site ? op : pauli::identity());
    return out;
  };

  Matrix h0 = Matrix::Zero(d, d);
  Matrix h1 = electron_splitting * Matrix::Identity(d, d);
  for (int k = 0; k < nuclei; ++k) {
    const Matrix iz = site_op(k, paulis[2] / 2.0);
    h0 += omega * iz;
    h1 += omega * iz;
    for (int j = 0; j < 3; ++j) h1 += couplings[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] * site_op(k, paulis[static_cast<std::size_t>(j)] / 2.0);
  }
  return DephasingModel({HermitianMatrix(h0), HermitianMatrix(h1)}, step_time);
}

NoiseRealization random_noise_realization(std::uint64_t seed, std::size_t segments, double xi_max) {
  Rng rng(seed);
  NoiseRealization r;
  for (std::size_t k = 0; k < segments; ++k) {
    const double xi = rng.uniform(-xi_max, xi_max);
    const double duration = rng.uniform(0.1, 1.0);
    r.segments.push_back({xi, duration});
  }
  return r;
}

MeasurementProtocol classical_noise_model(const NoiseRealization& realization, std::size_t steps,
                                          const Tolerances& tol) {
  if (steps == 0) throw ProtocolError("classical_noise_model: at least one step required");
  if (realization.segments.size() < steps)
    throw PreconditionError("classical_noise_model: realization has fewer segments than steps");
  std::vector<DephasingModel> models;
  std::vector<MeterBasis> bases;
  for (std::size_t k = 0; k < steps; ++k) {
    const auto& seg = realization.segments[k];
    if (!std::isfinite(seg.xi) || !std::isfinite(seg.duration))
      throw PreconditionError("classical_noise_model: non-finite segment");
    const Matrix up = Matrix::Constant(1, 1, seg.xi);
    models.emplace_back(std::vector<HermitianMatrix>{HermitianMatrix(up), HermitianMatrix(Matrix(-up))},
                        seg.duration);
    bases.push_back(MeterBasis::qubit_x());
  }
  return MeasurementProtocol::piecewise(std::move(models), PreparationState::uniform(2), std::move(bases), tol);
}

namespace {

void check_weights(std::span<const NoiseRealization> realizations, std::span<const double> weights) {
  if (realizations.empty()) throw PreconditionError("noise ensemble: no realizations");
  if (weights.size() != realizations.size()) throw PreconditionError("noise ensemble: one weight per realization");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw PreconditionError("noise ensemble: weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw PreconditionError("noise ensemble: weights must sum to 1");
}

std::vector<double> mixed(std::span<const NoiseRealization> realizations, std::span<const double> weights,
                          std::size_t steps, std::optional<std::size_t> removed, const Tolerances& tol) {
  std::vector<double> acc;
  for (std::size_t r = 0; r < realizations.size(); ++r) {
    auto protocol = classical_noise_model(realizations[r], steps, tol);
    if (removed) protocol = protocol.without_step(*removed);
    const auto dist = full_distribution(protocol, DensityMatrix::maximally_mixed(1), static_cast<int>(protocol.steps()), tol);
    if (acc.empty()) acc.assign(dist.size(), 0.0);
    for (std::size_t i = 0; i < dist.size(); ++i) acc[i] += weights[r] * dist.at(i);
  }
  return acc;
}

}  // namespace

JointDistribution noise_ensemble_average(std::span<const NoiseRealization> realizations,
                                         std::span<const double> weights, int steps, const Tolerances& tol) {
  check_weights(realizations, weights);
  if (steps < 1) throw ProtocolError("noise_ensemble_average: at least one step required");
  return JointDistribution(steps, 2, mixed(realizations, weights, static_cast<std::size_t>(steps), std::nullopt, tol));
}

EnsembleKC noise_ensemble_kc(std::span<const NoiseRealization> realizations, std::span<const double> weights,
                             int n_max, double tolerance, const Tolerances& tol) {
  check_weights(realizations, weights);
  if (n_max < 2) throw ProtocolError("noise_ensemble_kc: n_max must be at least 2");
  EnsembleKC out;
  out.n_max = n_max;
  for (int n = 2; n <= n_max; ++n) {
    const JointDistribution full(n, 2, mixed(realizations, weights, static_cast<std::size_t>(n), std::nullopt, tol));
    for (int j = 1; j <= n - 1; ++j) {
      const auto marg = full.marginalize(j);
      const auto reduced = mixed(realizations, weights, static_cast<std::size_t>(n), static_cast<std::size_t>(j - 1), tol);
      for (std::size_t i = 0; i < reduced.size(); ++i)
        out.max_defect = std::max(out.max_defect, std::abs(marg.at(i) - reduced[i]));
    }
  }
  out.consistent = out.max_defect <= tolerance;
  return out;
}

std::string to_string(Ensemble e) {
  switch (e) {
    case Ensemble::Gaussian: return "gaussian";
    case Ensemble::Commuting: return "commuting";
    case Ensemble::OrthogonalSu2: return "orthogonal_su2";
  }
  return "unknown";
}

Ensemble ensemble_from_string(const std::string& name) {
  if (name == "gaussian") return Ensemble::Gaussian;
  if (name == "commuting") return Ensemble::Commuting;
  if (name == "orthogonal_su2") return Ensemble::OrthogonalSu2;
  throw ConfigError("unknown ensemble '" + name + "'");
}

DephasingModel orthogonal_su2_model(std::uint64_t seed, double step_time) {
  Rng rng(seed);
  Eigen::Vector3d n, m;
  do {
    n = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    m = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    m -= m.dot(n) / n.squaredNorm() * n;
  } while (n.norm() < 1e-3 || m.norm() < 1e-3);
  n.normalize();
  m.normalize();
  const double a = rng.uniform(0.5, 2.0);
  const double b = rng.uniform(0.5, 2.0);
  auto dot_sigma = [](const Eigen::Vector3d& v) {
    return Matrix(v(0) * pauli::x() + v(1) * pauli::y() + v(2) * pauli::z());
  };
  return DephasingModel({HermitianMatrix(a * dot_sigma(n)), HermitianMatrix(b * dot_sigma(m))}, step_time);
}

namespace {

DephasingModel draw_model(const SearchSpec& spec, std::uint64_t seed, double t) {
  switch (spec.ensemble) {
    case Ensemble::Gaussian: return random_model(seed, spec.probe_dim, spec.system_dim, false, spec.scale, t);
    case Ensemble::Commuting: return random_model(seed, spec.probe_dim, spec.system_dim, true, spec.scale, t);
    case Ensemble::OrthogonalSu2: return orthogonal_su2_model(seed, t);
  }
  throw ConfigError("unknown ensemble");
}

std::optional<SearchFinding> examine(const DephasingModel& model, int n_max, const Tolerances& tol) {
  const auto comm = is_commutative(std::span<const HermitianMatrix>(model.hamiltonians()), tol);
  if (comm.commutative) return std::nullopt;
  const int dp = model.probe_dim();
  const auto meter = dp == 2 ? MeterBasis::qubit_x() : MeterBasis::fourier(dp);
  const auto protocol =
      single_axis_protocol(model, PreparationState::uniform(dp), meter, static_cast<std::size_t>(n_max), tol);
  double gap = 0.0;
  for (const auto& e : protocol.step(0).effects) {
    const auto nd = effect_nondegenerate(e, tol.gap);
    if (nd.nondegenerate) return std::nullopt;
    gap = std::max(gap, nd.min_gap);
  }
  const auto kc = check_kc_all(protocol, n_max, tol);
  if (!kc.consistent) return std::nullopt;
  SearchFinding f;
  f.t = model.step_time();
  for (const auto& h : model.hamiltonians()) f.hamiltonians.push_back(h.matrix());
  f.max_commutator_norm = comm.max_commutator_norm;
  f.max_kc_defect = kc.max_operator_defect;
  f.max_effect_gap = gap;
  return f;
}

}  // namespace

SearchResult counterexample_search(const SearchSpec& spec, const Tolerances& tol, int threads) {
  if (spec.trials == 0) throw PreconditionError("counterexample_search: trials must be at least 1");
  if (spec.t_grid.empty()) throw PreconditionError("counterexample_search: empty time grid");
  if (spec.n_max < 2) throw PreconditionError("counterexample_search: n_max must be at least 2");
  if (spec.ensemble == Ensemble::OrthogonalSu2 && (spec.probe_dim != 2 || spec.system_dim != 2))
    throw PreconditionError("counterexample_search: orthogonal_su2 requires d_P = d_S = 2");

  const std::size_t grid = spec.t_grid.size();
  std::vector<std::optional<SearchFinding>> slots(spec.trials * grid);
  parallel_for(spec.trials, threads, [&](std::size_t trial) {
    const std::uint64_t seed = derive_seed(spec.seed, trial);
    for (std::size_t g = 0; g < grid; ++g) {
      auto found = examine(draw_model(spec, seed, spec.t_grid[g]), spec.n_max, tol);
      if (found) {
        found->trial = trial;
        found->trial_seed = seed;
      }
      slots[trial * grid + g] = std::move(found);
    }
  });

  SearchResult out;
  out.spec = spec;
  out.examined = slots.size();
  if (spec.include_reference) {
    for (double t : spec.t_grid) {
      ++out.examined;
      DephasingModel ref({HermitianMatrix(pauli::z()), HermitianMatrix(pauli::x())}, t);
      if (auto f = examine(ref, spec.n_max, tol)) {
        f->reference = true;
        out.findings.push_back(std::move(*f));
      }
    }
  }
  for (auto& s : slots)
    if (s) out.findings.push_back(std::move(*s));
  return out;
}

LGSearchResult lg_violation_search(std::uint64_t seed, std::size_t trials, int system_dim,
                                   std::span<const double> t_grid, const Tolerances& tol, int threads) {
  if (trials == 0) throw PreconditionError("lg_violation_search: trials must be at least 1");
  if (t_grid.empty()) throw PreconditionError("lg_violation_search: empty time grid");
  const std::size_t grid = t_grid.size();
  std::vector<LGFinding> all(trials * grid);
  std::vector<char> violated(trials * grid, 0);
  parallel_for(trials, threads, [&](std::size_t trial) {
    const std::uint64_t s = derive_seed(seed, trial);
    const auto rho = random_density(derive_seed(s, 1), system_dim);
    for (std::size_t g = 0; g < grid; ++g) {
      const auto model = random_model(s, 2, system_dim, false, 1.0, t_grid[g]);
      const std::array axes{Axis::X, Axis::X};
      const auto lg = lg_check(qubit_xy_protocol(model, axes, tol), rho, tol);
      auto& f = all[trial * grid + g];
      f = {trial, s, t_grid[g], lg.p2_plus_plus, lg.p1_plus, lg.p2_plus_plus - lg.p1_plus};
      violated[trial * grid + g] = lg.lg_satisfied ? 0 : 1;
    }
  });
  LGSearchResult out;
  out.examined = all.size();
  out.closest = all.front();
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (violated[k]) out.violations.push_back(all[k]);
    if (all[k].excess > out.closest.excess) out.closest = all[k];
  }
  return out;
}

}  // namespace kclab
