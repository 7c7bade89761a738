#pragma once

// Dense complex linear algebra for the small (d <= ~64) square operators used
// throughout the library. Plain Eigen matrices carry generic operators; the
// role types below wrap a matrix together with the invariant it satisfies.

#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kclab/tolerances.hpp"

namespace kclab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Square, finite, and within `tol * |M|_F` of its adjoint. The stored matrix
/// is the Hermitian part (M + M^dag) / 2 of the input.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const Matrix& m, double tol = Tolerances{}.hermiticity);

  /// Hermitian part of `m` without the tolerance check. For values that are
  /// Hermitian by construction (K^dag K, R^dag R, ...).
  static HermitianMatrix symmetrized(const Matrix& m);
  static HermitianMatrix identity(Index d);
  static HermitianMatrix zero(Index d);

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

 private:
  struct Unchecked {};
  HermitianMatrix(Unchecked, Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// |U^dag U - 1|_F <= tol.
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(const Matrix& m, double tol = Tolerances{}.unitarity);
  static UnitaryMatrix identity(Index d);

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

 private:
  Matrix m_;
};

/// Hermitian, unit trace, and positive semidefinite up to the tolerances.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Matrix& m, const Tolerances& tol = {});
  static DensityMatrix maximally_mixed(Index d);
  /// |psi><psi| / <psi|psi>; throws InvariantViolation for a zero vector.
  static DensityMatrix pure(const Vector& psi);

  const Matrix& matrix() const noexcept { return m_.matrix(); }
  const HermitianMatrix& hermitian() const noexcept { return m_; }
  Index dim() const noexcept { return m_.dim(); }

 private:
  HermitianMatrix m_;
};

/// ab - ba. Throws DimensionError unless both are square of equal size.
Matrix commutator(const Matrix& a, const Matrix& b);
double commutator_norm(const Matrix& a, const Matrix& b);

struct EigenDecomposition {
  RealVector values;  // ascending
  UnitaryMatrix vectors;  // columns; phases unconstrained
};

EigenDecomposition hermitian_eig(const HermitianMatrix& h);
inline EigenDecomposition hermitian_eig(const Matrix& h) { return hermitian_eig(HermitianMatrix(h)); }

/// exp(-i t h) through the spectral decomposition of h.
UnitaryMatrix unitary_from_hamiltonian(const HermitianMatrix& h, double t);

/// Hilbert-Schmidt inner product tr(a^dag b).
Complex hs_inner(const Matrix& a, const Matrix& b);
double hs_norm(const Matrix& a);

/// Hilbert-Schmidt orthonormal basis of span(ops). Modified Gram-Schmidt with
/// one re-orthogonalisation pass; inputs whose residual falls below
/// `rank_tol` are dropped.
std::vector<Matrix> orthonormalize_hs(std::span<const Matrix> ops, double rank_tol = Tolerances{}.rank);

/// Frobenius norm of a minus its orthogonal projection onto span(basis).
/// `basis` must be HS-orthonormal.
double projection_residual(const Matrix& a, std::span<const Matrix> basis);

Matrix kron(const Matrix& a, const Matrix& b);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const HermitianMatrix& h);

bool all_finite(const Matrix& m);

namespace pauli {
Matrix identity();
Matrix x();
Matrix y();
Matrix z();
/// Kronecker product of single-qubit Paulis named by a word over {I,X,Y,Z};
/// the first letter acts on the most significant factor.
Matrix word(std::string_view letters);
}  // namespace pauli

}  // namespace kclab
