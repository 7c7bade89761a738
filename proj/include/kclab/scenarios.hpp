#pragma once

// Seeded model builders: random ensembles, the NV-centre spin bath and the
// classical-noise qubit.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "kclab/dephasing.hpp"
#include "kclab/linalg.hpp"
#include "kclab/sequence.hpp"

namespace kclab {

/// splitmix64 output for counter `index` under `master`. Disjoint trial
/// streams are derive_seed(master, 0), derive_seed(master, 1), ...
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// std::mt19937_64 with boost::random distributions, which (unlike the
/// std:: ones) produce the same stream on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal(double sigma = 1.0);
  double uniform(double lo, double hi);
  /// Real and imaginary parts each N(0, sigma^2 / 2).
  Complex complex_normal(double sigma = 1.0);
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// diag(R) divided out.
UnitaryMatrix haar_unitary(Rng& rng, int d);
/// (G + G^dag)/2 rescaled so every entry has standard deviation `scale`.
HermitianMatrix gaussian_hermitian(Rng& rng, int d, double scale);

/// commuting: H_i = V D_i V^dag with Haar V and D_i uniform in [-scale, scale];
/// otherwise independent Gaussian Hermitian H_i, redrawn while the largest
/// commutator norm is below 1e-6. Requires 2 <= d_P <= 4, 2 <= d_S <= 16.
DephasingModel random_model(std::uint64_t seed, int probe_dim, int system_dim, bool commuting, double scale = 1.0,
                            double step_time = 1.0);

/// G G^dag / tr(G G^dag) with Ginibre G.
DensityMatrix random_density(std::uint64_t seed, int d);
Vector random_ket(std::uint64_t seed, int d);
HermitianMatrix random_hermitian(std::uint64_t seed, int d, double scale = 1.0);

/// NV electron (S_z in {0, 1}) coupled to N spin-1/2 nuclei, site 0 most
/// significant:
///   H_0 = omega sum_k I_z^k
///   H_1 = Omega 1 + sum_k (omega I_z^k + sum_j A_k^j I_j^k)
/// with I_j^k = sigma_j / 2 on nucleus k. Requires 1 <= N <= 5.
DephasingModel nv_center_model(int nuclei, double omega, double electron_splitting,
                               std::span<const std::array<double, 3>> couplings, double step_time);

struct NoiseSegment {
  double xi;  // angular frequency
  double duration;
  double alpha() const noexcept { return xi * duration; }
};

struct NoiseRealization {
  std::vector<NoiseSegment> segments;
};

/// xi uniform in [-xi_max, xi_max], durations uniform in [0.1, 1].
NoiseRealization random_noise_realization(std::uint64_t seed, std::size_t segments, double xi_max = 3.0);

/// Scalar (d_S = 1) protocol for H(t) = xi(t) sigma_z on the probe: step k
/// uses H_up = xi_k, H_down = -xi_k for the segment duration, |+x>
/// preparation and X readout, so K_+ = cos(alpha_k), K_- = -i sin(alpha_k).
MeasurementProtocol classical_noise_model(const NoiseRealization& realization, std::size_t steps,
                                          const Tolerances& tol = {});

/// Convex combination of the per-realization n-step distributions.
/// Weights must be nonnegative and sum to 1 within 1e-12.
JointDistribution noise_ensemble_average(std::span<const NoiseRealization> realizations,
                                         std::span<const double> weights, int steps, const Tolerances& tol = {});

struct EnsembleKC {
  int n_max = 0;
  double max_defect = 0.0;  // max |sum_{m_j} P_n - P_{n-1}| over n, j and sequences
  bool consistent = true;
};

/// KC of the averaged statistics, comparing the mixed n-step distribution
/// against the mixed statistics with step j removed.
EnsembleKC noise_ensemble_kc(std::span<const NoiseRealization> realizations, std::span<const double> weights,
                             int n_max, double tolerance, const Tolerances& tol = {});

enum class Ensemble { Gaussian, Commuting, OrthogonalSu2 };

std::string to_string(Ensemble e);
Ensemble ensemble_from_string(const std::string& name);

/// H_up = a n.sigma, H_down = b m.sigma with random orthogonal unit vectors
/// n, m and magnitudes a, b in [0.5, 2] (d_P = d_S = 2).
DephasingModel orthogonal_su2_model(std::uint64_t seed, double step_time);

struct SearchSpec {
  std::uint64_t seed = 0;
  std::size_t trials = 1;
  int probe_dim = 2;
  int system_dim = 2;
  std::vector<double> t_grid{1.0};
  Ensemble ensemble = Ensemble::Gaussian;
  bool include_reference = false;  // H_up = sigma_z, H_down = sigma_x at every grid time
  double scale = 1.0;
  int n_max = 3;
};

struct SearchFinding {
  bool reference = false;
  std::size_t trial = 0;
  std::uint64_t trial_seed = 0;
  double t = 0.0;
  std::vector<Matrix> hamiltonians;
  double max_commutator_norm = 0.0;
  double max_kc_defect = 0.0;
  double max_effect_gap = 0.0;  // largest min-gap over the effects (all below the gap tolerance)
};

struct SearchResult {
  SearchSpec spec;
  std::size_t examined = 0;
  std::vector<SearchFinding> findings;
};

/// Degenerate effects, operator-KC consistency up to n_max and noncommuting
/// generators, for single-axis protocols (X readout on a qubit probe, Fourier
/// readout otherwise) over every trial and grid time. Throws
/// PreconditionError for zero trials or an empty grid.
SearchResult counterexample_search(const SearchSpec& spec, const Tolerances& tol = {}, int threads = 1);

struct LGFinding {
  std::size_t trial = 0;
  std::uint64_t trial_seed = 0;
  double t = 0.0;
  double p2_plus_plus = 0.0;
  double p1_plus = 0.0;
  double excess = 0.0;  // P_2(+,+) - P_1(+)
};

struct LGSearchResult {
  std::size_t examined = 0;
  std::vector<LGFinding> violations;  // lg_satisfied == false, noncommuting models only
  LGFinding closest;  // largest excess seen
};

/// Two-step X protocols on Gaussian qubit-probe models with random states.
LGSearchResult lg_violation_search(std::uint64_t seed, std::size_t trials, int system_dim,
                                   std::span<const double> t_grid, const Tolerances& tol = {}, int threads = 1);

}  // namespace kclab
