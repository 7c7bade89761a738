#include "kclab/linalg.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "kclab/errors.hpp"

namespace kclab {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw DimensionError(std::string(what) + ": expected a nonempty square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

void require_same_square(const Matrix& a, const Matrix& b, const char* what) {
  require_square(a, what);
  require_square(b, what);
  if (a.rows() != b.rows())
    throw DimensionError(std::string(what) + ": dimension mismatch " + std::to_string(a.rows()) + " vs " +
                         std::to_string(b.rows()));
}

}  // namespace

bool all_finite(const Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

HermitianMatrix::HermitianMatrix(const Matrix& m, double tol) {
  require_square(m, "HermitianMatrix");
  if (!all_finite(m)) throw InvariantViolation("HermitianMatrix: non-finite entry");
  const double asym = (m - m.adjoint()).norm();
  if (asym > tol * m.norm())
    throw InvariantViolation("HermitianMatrix: |M - M^dag|_F = " + std::to_string(asym) + " exceeds tolerance");
  m_ = (m + m.adjoint()) * 0.5;
}

HermitianMatrix HermitianMatrix::symmetrized(const Matrix& m) {
  require_square(m, "HermitianMatrix::symmetrized");
  return HermitianMatrix(Unchecked{}, (m + m.adjoint()) * 0.5);
}

HermitianMatrix HermitianMatrix::identity(Index d) { return HermitianMatrix(Unchecked{}, Matrix::Identity(d, d)); }

HermitianMatrix HermitianMatrix::zero(Index d) { return HermitianMatrix(Unchecked{}, Matrix::Zero(d, d)); }

UnitaryMatrix::UnitaryMatrix(const Matrix& m, double tol) : m_(m) {
  require_square(m, "UnitaryMatrix");
  if (!all_finite(m)) throw InvariantViolation("UnitaryMatrix: non-finite entry");
  const double defect = (m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())).norm();
  if (defect > tol)
    throw InvariantViolation("UnitaryMatrix: |U^dag U - 1|_F = " + std::to_string(defect) + " exceeds tolerance");
}

UnitaryMatrix UnitaryMatrix::identity(Index d) { return UnitaryMatrix(Matrix::Identity(d, d)); }

DensityMatrix::DensityMatrix(const Matrix& m, const Tolerances& tol) : m_(m, tol.hermiticity) {
  const double tr = m_.matrix().trace().real();
  if (std::abs(tr - 1.0) > tol.density_trace)
    throw InvariantViolation("DensityMatrix: trace " + std::to_string(tr) + " differs from 1");
  const double lo = min_eigenvalue(m_);
  if (lo < -tol.density_min_eig)
    throw InvariantViolation("DensityMatrix: negative eigenvalue " + std::to_string(lo));
}

DensityMatrix DensityMatrix::maximally_mixed(Index d) {
  return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const double n2 = psi.squaredNorm();
  if (psi.size() == 0 || !(n2 > 0.0)) throw InvariantViolation("DensityMatrix::pure: zero vector");
  return DensityMatrix(psi * psi.adjoint() / n2);
}

Matrix commutator(const Matrix& a, const Matrix& b) {
  require_same_square(a, b, "commutator");
  return a * b - b * a;
}

double commutator_norm(const Matrix& a, const Matrix& b) { return commutator(a, b).norm(); }

EigenDecomposition hermitian_eig(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) throw NumericalFault("hermitian_eig: eigensolver did not converge");
  return EigenDecomposition{solver.eigenvalues(), UnitaryMatrix(solver.eigenvectors())};
}

UnitaryMatrix unitary_from_hamiltonian(const HermitianMatrix& h, double t) {
  if (!std::isfinite(t)) throw InvariantViolation("unitary_from_hamiltonian: non-finite time");
  const Index d = h.dim();
  if (t == 0.0) return UnitaryMatrix::identity(d);
  const auto eig = hermitian_eig(h);
  const Matrix& v = eig.vectors.matrix();
  Vector phases(d);
  for (Index k = 0; k < d; ++k) phases(k) = std::polar(1.0, -eig.values(k) * t);
  return UnitaryMatrix(v * phases.asDiagonal() * v.adjoint());
}

Complex hs_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("hs_inner: shape mismatch");
  // tr(a^dag b) = sum_ij conj(a_ij) b_ij
  return (a.array().conjugate() * b.array()).sum();
}

double hs_norm(const Matrix& a) { return std::sqrt(std::max(0.0, hs_inner(a, a).real())); }

std::vector<Matrix> orthonormalize_hs(std::span<const Matrix> ops, double rank_tol) {
  std::vector<Matrix> basis;
  if (ops.empty()) return basis;
  const Index rows = ops.front().rows();
  const Index cols = ops.front().cols();
  for (const Matrix& op : ops) {
    if (op.rows() != rows || op.cols() != cols) throw DimensionError("orthonormalize_hs: mixed dimensions");
    Matrix r = op;
    for (int pass = 0; pass < 2; ++pass)
      for (const Matrix& b : basis) r -= hs_inner(b, r) * b;
    const double n = hs_norm(r);
    if (n < rank_tol) continue;
    basis.push_back(r / n);
  }
  return basis;
}

double projection_residual(const Matrix& a, std::span<const Matrix> basis) {
  Matrix r = a;
  for (const Matrix& b : basis) r -= hs_inner(b, a) * b;
  return r.norm();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  require_square(a, "kron");
  require_square(b, "kron");
  return Eigen::kroneckerProduct(a, b).eval();
}

double min_eigenvalue(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalFault("min_eigenvalue: eigensolver did not converge");
  return solver.eigenvalues()(0);
}

namespace pauli {

Matrix identity() { return Matrix::Identity(2, 2); }

Matrix x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

Matrix y() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = Complex(0.0, -1.0);
  m(1, 0) = Complex(0.0, 1.0);
  return m;
}

Matrix z() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

Matrix word(std::string_view letters) {
  if (letters.empty()) throw DimensionError("pauli::word: empty word");
  Matrix out = Matrix::Identity(1, 1);
  for (char c : letters) {
    Matrix f;
    switch (c) {
      case 'I': f = identity(); break;
      case 'X': f = x(); break;
      case 'Y': f = y(); break;
      case 'Z': f = z(); break;
      default: throw DimensionError(std::string("pauli::word: unknown letter '") + c + "'");
    }
    out = Eigen::kroneckerProduct(out, f).eval();
  }
  return out;
}

}  // namespace pauli

}  // namespace kclab
