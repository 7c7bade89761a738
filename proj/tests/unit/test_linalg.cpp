#include <doctest.h>

#include <numbers>

#include "fixtures.hpp"
#include "kclab/errors.hpp"
#include "kclab/scenarios.hpp"

using namespace kclab;
using fixtures::max_abs_diff;

TEST_CASE("commutator of Pauli matrices") {
  CHECK(commutator(pauli::z(), pauli::z()).norm() == 0.0);
  const Matrix c = commutator(pauli::z(), pauli::x());
  CHECK(max_abs_diff(c, Complex(0.0, 2.0) * pauli::y()) < 1e-15);
  Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
  a.diagonal() << 1.0, 2.0;
  b.diagonal() << 3.0, 4.0;
  CHECK(commutator(a, b).norm() == 0.0);
  CHECK_THROWS_AS(commutator(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), DimensionError);
}

TEST_CASE("hermitian_eig spectra") {
  auto ez = hermitian_eig(HermitianMatrix(pauli::z()));
  CHECK(ez.values(0) == doctest::Approx(-1.0));
  CHECK(ez.values(1) == doctest::Approx(1.0));
  // eigenvector of -1 is |1> up to phase
  CHECK(std::abs(ez.vectors.matrix()(1, 0)) == doctest::Approx(1.0));

  auto ei = hermitian_eig(HermitianMatrix::identity(2));
  CHECK(ei.values(0) == doctest::Approx(1.0));
  CHECK(ei.values(1) == doctest::Approx(1.0));

  auto ex = hermitian_eig(HermitianMatrix(pauli::x()));
  CHECK(ex.values(0) == doctest::Approx(-1.0));
  CHECK(std::abs(ex.vectors.matrix()(0, 0)) == doctest::Approx(std::numbers::sqrt2 / 2));

  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_eig(bad), InvariantViolation);
}

TEST_CASE("hermitian_eig reconstruction on random matrices") {
  for (int d : {2, 5, 16, 32}) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto h = random_hermitian(derive_seed(11, s * 100 + d), d, 2.0);
      const auto e = hermitian_eig(h);
      const Matrix v = e.vectors.matrix();
      const Matrix back = v * e.values.cast<Complex>().asDiagonal() * v.adjoint();
      CHECK((back - h.matrix()).norm() <= 1e-10 * std::max(1.0, h.matrix().norm()));
      for (Index k = 1; k < e.values.size(); ++k) CHECK(e.values(k) >= e.values(k - 1));
    }
  }
}

TEST_CASE("unitary_from_hamiltonian") {
  CHECK(unitary_from_hamiltonian(HermitianMatrix(pauli::z()), 0.0).matrix() == Matrix::Identity(2, 2));
  const Matrix u = unitary_from_hamiltonian(HermitianMatrix(pauli::z()), fixtures::kHalfPi).matrix();
  CHECK(max_abs_diff(u, Complex(0.0, -1.0) * pauli::z()) < 1e-12);
  CHECK(max_abs_diff(unitary_from_hamiltonian(HermitianMatrix::zero(3), 2.7).matrix(), Matrix::Identity(3, 3)) <
        1e-15);
}

TEST_CASE("unitary group law") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto h = random_hermitian(derive_seed(12, s), 4, 1.5);
    const double t1 = 0.3 + 0.1 * static_cast<double>(s), t2 = 1.1;
    const Matrix lhs = unitary_from_hamiltonian(h, t1).matrix() * unitary_from_hamiltonian(h, t2).matrix();
    CHECK((lhs - unitary_from_hamiltonian(h, t1 + t2).matrix()).norm() <= 1e-10);
  }
}

TEST_CASE("Hilbert-Schmidt inner product") {
  CHECK(hs_inner(pauli::x(), pauli::x()) == Complex(2.0, 0.0));
  CHECK(std::abs(hs_inner(pauli::x(), pauli::y())) == 0.0);
  CHECK(hs_inner(Matrix::Identity(3, 3), Matrix::Identity(3, 3)).real() == doctest::Approx(3.0));
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng(derive_seed(13, s));
    Matrix a(3, 3);
    for (Index i = 0; i < 9; ++i) a.data()[i] = rng.complex_normal();
    const Complex aa = hs_inner(a, a);
    CHECK(std::abs(aa.imag()) <= 1e-12);
    CHECK(aa.real() >= 0.0);
  }
}

TEST_CASE("orthonormalize_hs") {
  const std::vector<Matrix> dup{Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2)};
  auto b = orthonormalize_hs(dup);
  REQUIRE(b.size() == 1);
  CHECK(max_abs_diff(b[0], Matrix::Identity(2, 2) / std::numbers::sqrt2) < 1e-15);

  const std::vector<Matrix> xy{pauli::x(), pauli::y()};
  b = orthonormalize_hs(xy);
  REQUIRE(b.size() == 2);
  CHECK(max_abs_diff(b[0], pauli::x() / std::numbers::sqrt2) < 1e-15);
  CHECK(max_abs_diff(b[1], pauli::y() / std::numbers::sqrt2) < 1e-15);

  const std::vector<Matrix> near{pauli::x(), Matrix(pauli::x() + 1e-15 * pauli::y())};
  CHECK(orthonormalize_hs(near).size() == 1);

  std::vector<Matrix> rnd;
  for (std::uint64_t s = 0; s < 12; ++s) rnd.push_back(random_hermitian(derive_seed(14, s), 3).matrix());
  b = orthonormalize_hs(rnd);
  CHECK(b.size() == 9);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      CHECK(std::abs(hs_inner(b[i], b[j]) - Complex(i == j ? 1.0 : 0.0, 0.0)) <= 1e-9);
}

TEST_CASE("kron") {
  CHECK(kron(Matrix::Identity(2, 2), Matrix::Identity(2, 2)) == Matrix::Identity(4, 4));
  Matrix zi = Matrix::Zero(4, 4);
  zi.diagonal() << 1.0, 1.0, -1.0, -1.0;
  CHECK(kron(pauli::z(), Matrix::Identity(2, 2)) == zi);
  Matrix anti = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) anti(i, 3 - i) = 1.0;
  CHECK(kron(pauli::x(), pauli::x()) == anti);
}

TEST_CASE("role type invariants") {
  Matrix skew = pauli::y() * Complex(0.0, 1.0);
  CHECK_THROWS_AS(HermitianMatrix{skew}, InvariantViolation);
  CHECK_THROWS_AS(UnitaryMatrix{Matrix(2.0 * Matrix::Identity(2, 2))}, InvariantViolation);
  CHECK_THROWS_AS(DensityMatrix{Matrix(Matrix::Identity(2, 2))}, InvariantViolation);
  Matrix neg = Matrix::Zero(2, 2);
  neg.diagonal() << 1.5, -0.5;
  CHECK_THROWS_AS(DensityMatrix{neg}, InvariantViolation);
  Matrix nan = Matrix::Identity(2, 2);
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(HermitianMatrix{nan}, InvariantViolation);
  CHECK_THROWS_AS(HermitianMatrix{Matrix(2, 3)}, DimensionError);
  CHECK(DensityMatrix::maximally_mixed(4).matrix().trace().real() == doctest::Approx(1.0));
}

TEST_CASE("pauli words") {
  CHECK(pauli::word("ZI") == kron(pauli::z(), pauli::identity()));
  CHECK(pauli::word("XYZ").rows() == 8);
  CHECK_THROWS_AS(pauli::word("Q"), DimensionError);
}

TEST_CASE("tolerance overrides") {
  Tolerances t;
  t.set("kc", 1e-6);
  CHECK(t.kc == 1e-6);
  CHECK_THROWS_AS(t.set("nope", 1.0), ConfigError);
  CHECK_THROWS_AS(t.set("kc", -1.0), ConfigError);
  CHECK(t.kc == 1e-6);
  t.set("enumeration_cap", 10);
  CHECK(t.enumeration_cap == 10);
  CHECK(t.items().size() == 21);
}
