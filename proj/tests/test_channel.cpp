#include <cmath>

#include "doctest.h"
#include "qpdwire/channel.hpp"
#include "qpdwire/pauli.hpp"
#include "test_support.hpp"

using namespace qpdwire;
using test::random_channel;

TEST_CASE("density matrix validation rejects bad inputs") {
  Matrix not_herm(2, 2);
  not_herm << 1.0, Complex(0.2, 0.1), Complex(0.3, 0.1), 0.0;
  CHECK_THROWS_AS(DensityMatrix(1, not_herm), std::invalid_argument);

  Matrix bad_trace = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityMatrix(1, bad_trace), std::invalid_argument);

  Matrix negative(2, 2);
  negative << 1.2, 0.0, 0.0, -0.2;
  CHECK_THROWS_AS(DensityMatrix(1, negative), std::invalid_argument);

  CHECK(DensityMatrix::maximally_mixed(2).purity() == doctest::Approx(0.25));
}

TEST_CASE("bell state has unit purity and unit self-overlap") {
  const auto phi = MaxEntangledState::make(1);
  CHECK(phi.state.purity() == doctest::Approx(1.0).epsilon(1e-12));
  const Vector v = bell_vector(1);
  CHECK((v.adjoint() * phi.state.matrix() * v)(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("depolarizing channel fidelity and mixture identity") {
  for (int n = 1; n <= 2; ++n) {
    for (double p : {0.0, 0.25, 0.5, 1.0}) {
      CHECK(entanglement_fidelity(Channel::depolarizing(n, p)) == doctest::Approx(p).epsilon(1e-12));
    }
    const Matrix lhs = Channel::depolarizing(n, 0.42).superoperator();
    const Matrix rhs = 0.42 * Channel::identity(n).superoperator() +
                       0.58 * Channel::depolarizing(n, 0.0).superoperator();
    CHECK(max_abs_diff(lhs, rhs) < 1e-12);
  }
  CHECK_THROWS_AS(Channel::depolarizing(1, 1.5), std::invalid_argument);
}

TEST_CASE("D_0 sends any pure state to overlap 1/(2^n + 1)") {
  // n = 1: <0| D_0(|0><0|) |0> = 1/3
  const Channel d0 = Channel::depolarizing(1, 0.0);
  const Matrix out = d0.apply(DensityMatrix::basis_state(1, 0)).matrix();
  CHECK(out(0, 0).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // n = 2: oracle is the direct 15-term Pauli sum applied to a random pure state
  auto gen = rng::stream(21, {0});
  const DensityMatrix psi = haar_random_state(2, gen);
  Matrix direct = Matrix::Zero(4, 4);
  for (std::uint32_t a = 1; a < 16; ++a) {
    const Matrix p = PauliOperator::from_index(2, a).matrix();
    direct += p * psi.matrix() * p;
  }
  direct /= 15.0;
  const Matrix via_channel = Channel::depolarizing(2, 0.0).apply(psi).matrix();
  CHECK(max_abs_diff(via_channel, direct) < 1e-12);
  const double overlap = (psi.matrix() * via_channel).trace().real();
  CHECK(overlap == doctest::Approx(1.0 / 5.0).epsilon(1e-10));
}

TEST_CASE("chi construction matches direct double-sum application") {
  auto gen = rng::stream(22, {0});
  const Channel c = random_channel(1, gen);
  const Matrix chi = c.chi();
  const auto& basis = pauli_basis(1);
  const DensityMatrix rho = haar_random_state(1, gen);
  Matrix direct = Matrix::Zero(2, 2);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      direct += chi(a, b) * basis[a] * rho.matrix() * basis[b];
    }
  }
  CHECK(max_abs_diff(direct, c.apply(rho).matrix()) < 1e-10);
}

TEST_CASE("chi round-trip and validation failures are named") {
  // identity chi
  Matrix e00 = Matrix::Zero(4, 4);
  e00(0, 0) = 1.0;
  CHECK(max_abs_diff(Channel::from_chi(1, e00).superoperator(),
                     Channel::identity(1).superoperator()) < 1e-14);

  // diagonal chi is the Pauli channel with that error distribution
  Matrix diag = Matrix::Zero(4, 4);
  diag(0, 0) = 0.9, diag(1, 1) = 0.04, diag(2, 2) = 0.02, diag(3, 3) = 0.04;
  const Channel pauli_chan = Channel::from_chi(1, diag);
  CHECK(coherent_offdiag_sum(pauli_chan) < 1e-14);
  CHECK(entanglement_fidelity(pauli_chan) == doctest::Approx(0.9).epsilon(1e-12));

  // random valid chi round-trips
  auto gen = rng::stream(23, {0});
  for (int trial = 0; trial < 10; ++trial) {
    const Channel c = random_channel(1, gen);
    const Channel back = Channel::from_chi(1, c.chi());
    CHECK(max_abs_diff(back.superoperator(), c.superoperator()) < 1e-10);
  }

  Matrix not_herm = e00;
  not_herm(0, 1) = Complex(0.1, 0.0);
  CHECK_THROWS_WITH_AS(Channel::from_chi(1, not_herm), doctest::Contains("not Hermitian"),
                       std::invalid_argument);

  Matrix not_psd = Matrix::Zero(4, 4);
  not_psd(0, 0) = 1.2;
  not_psd(1, 1) = -0.2;
  CHECK_THROWS_WITH_AS(Channel::from_chi(1, not_psd), doctest::Contains("positive semidefinite"),
                       std::invalid_argument);

  Matrix not_tp = Matrix::Zero(4, 4);
  not_tp(0, 0) = 0.5;  // trace deficit
  CHECK_THROWS_WITH_AS(Channel::from_chi(1, not_tp), doctest::Contains("trace-preservation"),
                       std::invalid_argument);
}

TEST_CASE("entanglement fidelity special values") {
  CHECK(entanglement_fidelity(Channel::identity(1)) == doctest::Approx(1.0));
  CHECK(entanglement_fidelity(Channel::identity(2)) == doctest::Approx(1.0));
  // rho -> Z rho Z has fidelity 0: oracle is the 4x4 Bell-projector evaluation
  const Matrix z = pauli_basis(1)[2];
  const Channel zchan = Channel::from_unitary(z);
  const Vector phi = bell_vector(1);
  const Matrix j = apply_to_second_factor(zchan, phi * phi.adjoint());
  const double oracle = (phi.adjoint() * j * phi)(0, 0).real();
  CHECK(oracle == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(entanglement_fidelity(zchan) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("fidelity equals chi_00 for random channels") {
  auto gen = rng::stream(24, {0});
  for (int trial = 0; trial < 20; ++trial) {
    const Channel c = random_channel(1, gen);
    CHECK(entanglement_fidelity(c) == doctest::Approx(c.chi()(0, 0).real()).epsilon(1e-10));
  }
}

TEST_CASE("coherent off-diagonal weight") {
  CHECK(coherent_offdiag_sum(Channel::depolarizing(1, 0.3)) < 1e-14);

  // exp(-i theta X / 2): off-diagonal sum is 2 cos(theta/2) sin(theta/2)
  const double theta = 0.3;
  const auto& basis = pauli_basis(1);
  const Matrix u = std::cos(theta / 2) * basis[0] + Complex(0, -std::sin(theta / 2)) * basis[1];
  const Channel rot = Channel::from_unitary(u);
  const double expected = 2.0 * std::cos(theta / 2) * std::sin(theta / 2);
  CHECK(coherent_offdiag_sum(rot) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(expected == doctest::Approx(0.29552).epsilon(1e-4));

  // composing a Pauli channel with the identity rotation stays Pauli
  const Channel composed = Channel::from_unitary(basis[0]).compose(Channel::depolarizing(1, 0.6));
  CHECK(coherent_offdiag_sum(composed) < 1e-12);
}

TEST_CASE("choi state properties") {
  // identity -> Bell state
  CHECK(max_abs_diff(choi_state(Channel::identity(1)).matrix(), bell_state(1).matrix()) < 1e-14);

  // D_0 -> zero Bell overlap
  const Vector phi = bell_vector(1);
  const Matrix j0 = choi_state(Channel::depolarizing(1, 0.0)).matrix();
  CHECK((phi.adjoint() * j0 * phi)(0, 0).real() == doctest::Approx(0.0).epsilon(1e-14));

  // random channels: Bell overlap equals chi_00
  auto gen = rng::stream(25, {0});
  for (int trial = 0; trial < 100; ++trial) {
    const Channel c = random_channel(1, gen);
    const double overlap = (phi.adjoint() * choi_state(c).matrix() * phi)(0, 0).real();
    CHECK(overlap == doctest::Approx(c.chi()(0, 0).real()).epsilon(1e-10));
  }
}

TEST_CASE("kraus extraction round-trips and is trace preserving") {
  auto gen = rng::stream(26, {0});
  for (int trial = 0; trial < 10; ++trial) {
    const Channel c = random_channel(1, gen, 3);
    const auto kraus = c.kraus();
    Matrix completeness = Matrix::Zero(2, 2);
    for (const auto& k : kraus) completeness += k.adjoint() * k;
    CHECK(max_abs_diff(completeness, Matrix::Identity(2, 2)) < 1e-9);
    const Channel back = Channel::from_kraus(1, kraus);
    CHECK(max_abs_diff(back.superoperator(), c.superoperator()) < 1e-9);
  }
}

TEST_CASE("ptm rank") {
  CHECK(ptm_rank(Channel::depolarizing(1, 0.0)) == 4);
  CHECK(ptm_rank(Channel::depolarizing(2, 0.0)) == 16);
  // replacement channel rho -> I/2^n has PTM rank 1
  for (int n = 1; n <= 2; ++n) {
    const std::size_t count = std::size_t(1) << (2 * n);
    std::vector<double> probs(count, 1.0 / static_cast<double>(count));
    CHECK(ptm_rank(Channel::from_pauli_probs(n, probs)) == 1);
  }
}

TEST_CASE("channel outputs are valid states and trace distance is bounded") {
  auto gen = rng::stream(27, {0});
  const Channel c = random_channel(1, gen);
  for (int trial = 0; trial < 50; ++trial) {
    const DensityMatrix rho = haar_random_state(1, gen);
    const DensityMatrix out = c.apply(rho);  // constructor validates
    const double dist = trace_distance(out, rho);
    CHECK(dist >= 0.0);
    CHECK(dist <= 2.0 + 1e-12);
  }
}

TEST_CASE("cptp validation rejects non-physical superoperators") {
  // a transpose map is positive but not completely positive
  Matrix transpose_super = Matrix::Zero(4, 4);
  transpose_super(0, 0) = 1;
  transpose_super(1, 2) = 1;
  transpose_super(2, 1) = 1;
  transpose_super(3, 3) = 1;
  CHECK_THROWS_AS(Channel(1, transpose_super), std::invalid_argument);
}

TEST_CASE("json serialization round-trips bit-exactly") {
  auto gen = rng::stream(28, {0});
  const Channel c = random_channel(1, gen);
  const nlohmann::json doc = channel_to_json(c);
  const Channel back = channel_from_json(doc);
  const nlohmann::json doc2 = channel_to_json(back);
  CHECK(doc.dump() == doc2.dump());
  CHECK(max_abs_diff(back.superoperator(), c.superoperator()) < 1e-12);

  nlohmann::json bad = doc;
  bad["representation"] = "kraus";
  CHECK_THROWS_AS(channel_from_json(bad), std::invalid_argument);
}

TEST_CASE("diamond lower bound separates distinct channels") {
  auto gen = rng::stream(29, {0});
  const Channel id = Channel::identity(1);
  CHECK(diamond_lower_bound(id, id, 5, gen) < 1e-12);
  const double bound = diamond_lower_bound(id, Channel::depolarizing(1, 0.0), 20, gen);
  CHECK(bound > 0.5);
  CHECK(bound <= 2.0 + 1e-9);
}
