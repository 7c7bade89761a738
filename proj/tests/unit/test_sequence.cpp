#include <doctest.h>

#include "fixtures.hpp"
#include "kclab/errors.hpp"
#include "kclab/scenarios.hpp"
#include "kclab/sequence.hpp"

using namespace kclab;
using fixtures::max_abs_diff;
using fixtures::pauli_protocol;

namespace {

const Matrix I2 = Matrix::Identity(2, 2);

RealVector spectrum(const HermitianMatrix& h) { return hermitian_eig(h).values; }

}  // namespace

TEST_CASE("history_operator") {
  const auto y = pauli_protocol(Axis::Y, 2);
  CHECK(max_abs_diff(history_operator(y, {0}).q.matrix(), y.step(0).effects[0].matrix()) < 1e-15);

  const auto trivial = pauli_protocol(Axis::X, 2, 0.0);
  CHECK(max_abs_diff(history_operator(trivial, {0, 0}).q.matrix(), I2) < 1e-15);

  // Computed values: Q_2(+,+) vanishes; the mixed sequences carry the weight.
  RealVector ev = spectrum(history_operator(y, {0, 0}).q);
  CHECK(std::abs(ev(0)) < 1e-12);
  CHECK(std::abs(ev(1)) < 1e-12);
  ev = spectrum(history_operator(y, {0, 1}).q);
  CHECK(std::abs(ev(0)) < 1e-12);
  CHECK(ev(1) == doctest::Approx(1.0).epsilon(1e-12));
  ev = spectrum(history_operator(y, {1, 0}).q);
  CHECK(ev(1) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(history_operator(y, {0, 2}), LabelError);
  CHECK_THROWS_AS(history_operator(y, {0, 0, 0}), ProtocolError);
}

TEST_CASE("joint_probability") {
  const auto y = pauli_protocol(Axis::Y, 2);
  const auto mm = DensityMatrix::maximally_mixed(2);
  CHECK(joint_probability(random_density(31, 2), HermitianMatrix::identity(2)) == doctest::Approx(1.0));
  CHECK(joint_probability(mm, history_operator(y, {0, 0})) == doctest::Approx(0.0));
  CHECK(joint_probability(mm, history_operator(y, {0, 1})) == doctest::Approx(0.5));
  const auto plus_y = DensityMatrix::pure(fixtures::plus_y_ket());
  CHECK(std::abs(joint_probability(plus_y, history_operator(y, {0}))) < 1e-12);

  const HermitianMatrix over(Matrix(1.5 * I2));
  CHECK_THROWS_AS(joint_probability(mm, over), NumericalFault);
  const HermitianMatrix tiny(Matrix((1.0 + 1e-11) * I2));
  CHECK(joint_probability(mm, tiny) == 1.0);
}

TEST_CASE("full_distribution") {
  const auto trivial = pauli_protocol(Axis::X, 1, 0.0);
  const auto d1 = full_distribution(trivial, random_density(32, 2), 1);
  CHECK(d1({0}) == doctest::Approx(1.0));
  CHECK(d1({1}) == doctest::Approx(0.0));

  const HermitianMatrix z(pauli::z());
  const std::vector<double> eps{0.0, 0.0}, v{0.0, 1.0};
  const auto comm = build_conditional_hamiltonians(z, z, eps, v, 0.9);
  const std::array xx{Axis::X, Axis::X};
  const auto p = qubit_xy_protocol(comm, xx);
  const auto rho = random_density(33, 2);
  const auto two = full_distribution(p, rho, 2);
  const auto one = full_distribution(p.without_step(0), rho, 1);
  const auto marg = two.marginalize(1);
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(std::abs(marg.at(i) - one.at(i)) < 1e-12);

  const auto y = pauli_protocol(Axis::Y, 2);
  CHECK(std::abs(full_distribution(y, DensityMatrix::pure(fixtures::plus_y_ket()), 2).total() - 1.0) < 1e-12);

  Tolerances small;
  small.enumeration_cap = 3;
  CHECK_THROWS_AS(full_distribution(y, DensityMatrix::maximally_mixed(2), 2, small), CapacityError);
  CHECK_THROWS_AS(full_distribution(y, DensityMatrix::maximally_mixed(2), 3), ProtocolError);
}

TEST_CASE("lexicographic order") {
  JointDistribution d(2, 3, std::vector<double>(9, 1.0 / 9));
  CHECK(d.index_of({1, 2}) == 5);
  CHECK(d.sequence(7) == OutcomeSequence{2, 1});
  CHECK_THROWS_AS(d.index_of({3, 0}), LabelError);
}

TEST_CASE("final-outcome marginalization is exact") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const int dp = 2 + static_cast<int>(s % 2);
    const auto model = random_model(derive_seed(34, s), dp, 3, false, 1.0, 1.2);
    const auto p = single_axis_protocol(model, PreparationState::uniform(dp), MeterBasis::fourier(dp), 3);
    const auto rho = random_density(derive_seed(35, s), 3);
    for (int n = 2; n <= 3; ++n) {
      const auto full = full_distribution(p, rho, n).marginalize(n);
      const auto shorter = full_distribution(p, rho, n - 1);
      for (std::size_t i = 0; i < full.size(); ++i) CHECK(std::abs(full.at(i) - shorter.at(i)) <= 1e-10);
    }
  }
}

TEST_CASE("kc defects for the Pauli model") {
  const auto y2 = pauli_protocol(Axis::Y, 2);
  const auto plus_y = DensityMatrix::pure(fixtures::plus_y_ket());
  const auto mm = DensityMatrix::maximally_mixed(2);

  CHECK(max_abs_diff(kc_defect_operator(y2, 2, 1, {0}).matrix(), pauli::y()) < 1e-12);
  CHECK(max_abs_diff(kc_defect_operator(y2, 2, 1, {1}).matrix(), -pauli::y()) < 1e-12);
  CHECK(kc_defect_state(y2, plus_y, 2, 1, {0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(kc_defect_state(y2, mm, 2, 1, {0})) < 1e-12);
  CHECK(std::abs(kc_defect_state(y2, mm, 2, 1, {1})) < 1e-12);

  const auto y3 = pauli_protocol(Axis::Y, 3);
  const auto d32 = kc_defect_operator(y3, 3, 2, {0, 0});
  CHECK(d32.matrix().norm() > 0.1);
  CHECK(std::abs(d32.matrix().trace().real() / 2.0 - 0.5) < 1e-12);
  CHECK(std::abs(kc_defect_state(y3, mm, 3, 2, {0, 0}) - 0.5) < 1e-12);

  CHECK_THROWS_AS(kc_defect_state(y2, mm, 2, 2, {0}), ProtocolError);
  CHECK_THROWS_AS(kc_defect_operator(y2, 1, 1, {}), ProtocolError);
  CHECK_THROWS_AS(kc_defect_operator(y2, 2, 1, {0, 0}), LabelError);
}

TEST_CASE("check_kc_all verdicts") {
  const auto y2 = pauli_protocol(Axis::Y, 2);
  auto r = check_kc_all(y2, 2);
  CHECK_FALSE(r.consistent);
  CHECK(r.max_operator_defect == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  const auto x4 = pauli_protocol(Axis::X, 4);
  r = check_kc_all(x4, 4);
  CHECK(r.consistent);
  CHECK(r.max_operator_defect <= 1e-10);
  CHECK(r.n2j1_decides);

  const auto comm = random_model(36, 3, 3, true, 1.0, 1.0);
  const auto p = single_axis_protocol(comm, PreparationState::uniform(3), MeterBasis::fourier(3), 4);
  r = check_kc_all(p, 4);
  CHECK(r.consistent);
  CHECK(r.max_operator_defect <= 1e-10);
  // 3 + 2*9 + 3*27 fixed assignments
  CHECK(r.defects.size() == 102);

  Tolerances small;
  small.enumeration_cap = 10;
  CHECK_THROWS_AS(check_kc_all(p, 4, small), CapacityError);
}

TEST_CASE("state and operator defects agree") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const int dp = 2 + static_cast<int>(s % 2);
    const auto model = random_model(derive_seed(37, s), dp, 2 + static_cast<int>(s % 3), s % 4 == 0, 1.0, 0.9);
    const auto p = single_axis_protocol(model, PreparationState::uniform(dp), MeterBasis::fourier(dp), 3);
    const auto rho = random_density(derive_seed(38, s), model.system_dim());
    const int n = 2 + static_cast<int>(s % 2);
    const int j = 1 + static_cast<int>((s / 2) % static_cast<std::uint64_t>(n - 1));
    OutcomeSequence fixed(static_cast<std::size_t>(n - 1));
    for (std::size_t k = 0; k < fixed.size(); ++k) fixed[k] = static_cast<int>((s + k) % static_cast<std::uint64_t>(dp));
    const double state = kc_defect_state(p, rho, n, j, fixed);
    const double op = (rho.matrix() * kc_defect_operator(p, n, j, fixed).matrix()).trace().real();
    CHECK(std::abs(state - op) <= 1e-11);
  }
}

TEST_CASE("commuting models collapse to the product form") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto model = random_model(derive_seed(39, s), 2, 3, true, 1.0, 1.4);
    const std::array axes{Axis::X, Axis::Y, Axis::X, Axis::Y};
    const auto p = qubit_xy_protocol(model, axes);
    const auto rho = random_density(derive_seed(40, s), 3);
    for (int n = 1; n <= 4; ++n) {
      const auto dist = full_distribution(p, rho, n);
      for (std::size_t idx = 0; idx < dist.size(); ++idx) {
        const auto seq = dist.sequence(idx);
        Matrix prod = Matrix::Identity(3, 3);
        for (std::size_t k = 0; k < seq.size(); ++k) prod = p.step(k).effects[static_cast<std::size_t>(seq[k])].matrix() * prod;
        CHECK(std::abs((rho.matrix() * prod).trace().real() - dist.at(idx)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("blind spot: states commuting with every H_i") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto model = random_model(derive_seed(41, s), 2, 3, false, 1.0, 0.8);
    const std::array yy{Axis::Y, Axis::Y};
    const auto p = qubit_xy_protocol(model, yy);
    const auto mm = DensityMatrix::maximally_mixed(3);
    for (int m2 = 0; m2 < 2; ++m2) CHECK(std::abs(kc_defect_state(p, mm, 2, 1, {m2})) <= 1e-10);
  }
}

TEST_CASE("fixed_point_check") {
  const auto model = fixtures::pauli_model();
  const auto prep = PreparationState::uniform(2);
  auto r = fixed_point_check(HermitianMatrix::identity(2), model, prep);
  CHECK(r.is_fixed);
  CHECK(r.commutator_norms[0] == 0.0);
  CHECK(r.commutator_norms[1] == 0.0);

  r = fixed_point_check(HermitianMatrix(pauli::z()), model, prep);
  CHECK_FALSE(r.is_fixed);
  CHECK(r.commutator_norms[1] == doctest::Approx(2.0 * std::sqrt(2.0)));

  const auto comm = random_model(42, 2, 3, true, 1.0, 1.0);
  const auto meas = induced_kraus(comm, prep, MeterBasis::qubit_x());
  CHECK(fixed_point_check(meas.effects[0], comm, prep).is_fixed);

  // At t = pi every U_i is -1: everything is fixed, flagged as resonant.
  r = fixed_point_check(HermitianMatrix(pauli::y()), fixtures::pauli_model(std::numbers::pi), prep);
  CHECK(r.is_fixed);
  CHECK_FALSE(r.commutes);
  CHECK(r.resonant);

  Vector k(2);
  k << 1.0, 0.0;
  CHECK_THROWS_AS(fixed_point_check(HermitianMatrix::identity(2), model, PreparationState(k)), PreconditionError);
}
