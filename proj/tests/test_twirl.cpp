#include <cmath>

#include "doctest.h"
#include "qpdwire/ensemble.hpp"
#include "qpdwire/pauli.hpp"
#include "test_support.hpp"

using namespace qpdwire;
using test::random_channel;
using test::random_pauli_channel;

TEST_CASE("ensemble validation") {
  const Eigen::Index d = 2;
  Matrix id = Matrix::Identity(d, d);
  CHECK_THROWS_AS(UnitaryEnsemble(1, {{0.5, id}}), std::invalid_argument);  // sum != 1
  Matrix not_unitary = id;
  not_unitary(0, 0) = 2.0;
  CHECK_THROWS_AS(UnitaryEnsemble(1, {{1.0, not_unitary}}), std::invalid_argument);
  CHECK_THROWS_AS(UnitaryEnsemble(1, {}), std::invalid_argument);

  const auto td = UnitaryEnsemble::single_qubit_two_design();
  double total = 0.0;
  for (const auto& item : td.items()) {
    total += item.probability;
    CHECK(is_unitary(item.unitary, 1e-12));
  }
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("trivial twirl leaves any channel unchanged") {
  auto gen = rng::stream(31, {0});
  const Channel c = random_channel(1, gen);
  const Channel t = twirl(c, UnitaryEnsemble::trivial(1));
  CHECK(max_abs_diff(t.superoperator(), c.superoperator()) < 1e-14);
}

TEST_CASE("two-design has 12 elements and depolarizes arbitrary channels") {
  const auto td = UnitaryEnsemble::single_qubit_two_design();
  CHECK(td.size() == 12);

  // pure Z rotation: chi_00 = cos^2(theta/2) analytically
  const double theta = 0.3;
  const auto& basis = pauli_basis(1);
  const Matrix u = std::cos(theta / 2) * basis[0] + Complex(0, -std::sin(theta / 2)) * basis[2];
  const Channel rot = Channel::from_unitary(u);
  const Channel twirled = twirl(rot, td);
  const double p = std::cos(theta / 2) * std::cos(theta / 2);
  CHECK(max_abs_diff(twirled.superoperator(), Channel::depolarizing(1, p).superoperator()) < 1e-10);

  // identity is a fixed point
  CHECK(max_abs_diff(twirl(Channel::identity(1), td).superoperator(),
                     Channel::identity(1).superoperator()) < 1e-12);

  auto gen = rng::stream(32, {0});
  for (int trial = 0; trial < 100; ++trial) {
    const Channel c = random_channel(1, gen);
    const Channel target = Channel::depolarizing(1, entanglement_fidelity(c));
    CHECK(max_abs_diff(twirl(c, td).superoperator(), target.superoperator()) < 1e-10);
  }
}

TEST_CASE("pauli mixing ensemble conjugates X to X, Y, Z once each") {
  const auto pm = UnitaryEnsemble::single_qubit_pauli_mixing();
  CHECK(pm.size() == 3);
  const auto& basis = pauli_basis(1);
  std::vector<int> hit(4, 0);
  for (const auto& item : pm.items()) {
    const Matrix conj = item.unitary.adjoint() * basis[1] * item.unitary;
    for (int b = 1; b < 4; ++b) {
      if (max_abs_diff(conj, basis[b]) < 1e-12 || max_abs_diff(conj, Matrix(-basis[b])) < 1e-12) {
        ++hit[b];
      }
    }
  }
  CHECK(hit[1] == 1);
  CHECK(hit[2] == 1);
  CHECK(hit[3] == 1);
}

TEST_CASE("pauli mixing twirl depolarizes Pauli channels exactly") {
  const auto pm = UnitaryEnsemble::single_qubit_pauli_mixing();
  auto gen = rng::stream(33, {0});
  for (int trial = 0; trial < 100; ++trial) {
    const Channel c = random_pauli_channel(1, gen);
    const Channel target = Channel::depolarizing(1, entanglement_fidelity(c));
    CHECK(max_abs_diff(twirl(c, pm).superoperator(), target.superoperator()) < 1e-12);
  }
  // depolarizing channels are fixed points
  const Channel d = Channel::depolarizing(1, 0.7);
  CHECK(max_abs_diff(twirl(d, pm).superoperator(), d.superoperator()) < 1e-12);
}

TEST_CASE("verify_pauli_mixing classifies the shipped ensembles") {
  CHECK(verify_pauli_mixing(UnitaryEnsemble::single_qubit_pauli_mixing()).is_pauli_mixing);
  CHECK(verify_pauli_mixing(UnitaryEnsemble::single_qubit_two_design()).is_pauli_mixing);

  const auto trivial_report = verify_pauli_mixing(UnitaryEnsemble::trivial(1));
  CHECK_FALSE(trivial_report.is_pauli_mixing);
  CHECK(trivial_report.detail.find("class") != std::string::npos);

  // non-normalizing ensemble is reported as such
  Matrix t(2, 2);
  t << 1, 0, 0, std::polar(1.0, 0.4);
  const auto report = verify_pauli_mixing(UnitaryEnsemble(1, {{1.0, t}}));
  CHECK_FALSE(report.is_pauli_mixing);
  CHECK(report.detail.find("normalize") != std::string::npos);
}

TEST_CASE("twirling preserves entanglement fidelity") {
  auto gen = rng::stream(34, {0});
  const std::vector<UnitaryEnsemble> ensembles = {
      UnitaryEnsemble::single_qubit_two_design(), UnitaryEnsemble::single_qubit_pauli_mixing(),
      UnitaryEnsemble::trivial(1), UnitaryEnsemble::pauli_group(1)};
  for (int trial = 0; trial < 100; ++trial) {
    const Channel c = random_channel(1, gen, 3);
    const double f = entanglement_fidelity(c);
    const auto& e = ensembles[static_cast<std::size_t>(trial) % ensembles.size()];
    CHECK(entanglement_fidelity(twirl(c, e)) == doctest::Approx(f).epsilon(1e-10));
  }
}

TEST_CASE("depolarizing channels are fixed points of every shipped ensemble") {
  const Channel d = Channel::depolarizing(1, 0.61);
  for (const auto& e :
       {UnitaryEnsemble::single_qubit_two_design(), UnitaryEnsemble::single_qubit_pauli_mixing(),
        UnitaryEnsemble::trivial(1), UnitaryEnsemble::pauli_group(1)}) {
    CHECK(max_abs_diff(twirl(d, e).superoperator(), d.superoperator()) < 1e-12);
  }
  const Channel d2 = Channel::depolarizing(2, 0.61);
  for (const auto& e : {UnitaryEnsemble::trivial(2), UnitaryEnsemble::pauli_group(2)}) {
    CHECK(max_abs_diff(twirl(d2, e).superoperator(), d2.superoperator()) < 1e-12);
  }
}

TEST_CASE("pauli group twirl removes coherent components and fixes Pauli channels") {
  auto gen = rng::stream(35, {0});
  for (int n = 1; n <= 2; ++n) {
    const auto pg = UnitaryEnsemble::pauli_group(n);
    CHECK(pg.size() == std::size_t(1) << (2 * n));
    const Channel c = random_channel(n, gen);
    const Channel dephased = twirl(c, pg);
    CHECK(coherent_offdiag_sum(dephased) < 1e-10);
    // the diagonal is untouched
    const Matrix chi_before = c.chi();
    const Matrix chi_after = dephased.chi();
    for (Eigen::Index a = 0; a < chi_before.rows(); ++a) {
      CHECK(chi_after(a, a).real() == doctest::Approx(chi_before(a, a).real()).epsilon(1e-10));
    }
    const Channel pauli_chan = random_pauli_channel(n, gen);
    CHECK(max_abs_diff(twirl(pauli_chan, pg).superoperator(), pauli_chan.superoperator()) < 1e-12);
  }
}

TEST_CASE("ensemble json round-trip") {
  const auto pm = UnitaryEnsemble::single_qubit_pauli_mixing();
  const auto back = ensemble_from_json(ensemble_to_json(pm));
  CHECK(back.size() == pm.size());
  CHECK(back.label() == EnsembleLabel::pauli_mixing);
  for (std::size_t i = 0; i < pm.size(); ++i) {
    CHECK(max_abs_diff(back.items()[i].unitary, pm.items()[i].unitary) == 0.0);
    CHECK(back.items()[i].probability == pm.items()[i].probability);
  }
}

TEST_CASE("twirl dimension mismatch is rejected") {
  CHECK_THROWS_AS(twirl(Channel::identity(2), UnitaryEnsemble::trivial(1)), std::invalid_argument);
}
