#include <cmath>

#include "doctest.h"
#include "qpdwire/calibration.hpp"
#include "qpdwire/noise.hpp"
#include "qpdwire/qpd.hpp"
#include "test_support.hpp"

using namespace qpdwire;
using test::random_pauli_channel;

TEST_CASE("exact calibration recovers the depolarizing parameter") {
  for (int n = 1; n <= 2; ++n) {
    for (double p : {0.0, 0.3, 1.0}) {
      const double f = calibrate_exact(Channel::depolarizing(n, p), UnitaryEnsemble::trivial(n));
      CHECK(f == doctest::Approx(p).epsilon(1e-12));
    }
  }
}

TEST_CASE("exact calibration of Pauli channels through the mixing ensemble") {
  auto gen = rng::stream(61, {0});
  const auto pm = UnitaryEnsemble::single_qubit_pauli_mixing();
  for (int trial = 0; trial < 50; ++trial) {
    const Channel c = random_pauli_channel(1, gen);
    CHECK(calibrate_exact(c, pm) == doctest::Approx(c.chi()(0, 0).real()).epsilon(1e-12));
  }
}

TEST_CASE("untwirled coherent channels can fool the survival statistic") {
  // a Z rotation keeps |0> fixed, so the trivial-ensemble statistic reports
  // fidelity 1 while chi_00 is cos^2(theta/2); the twirl removes the gap
  const double theta = 0.6;
  const auto& basis = pauli_basis(1);
  const Matrix u = std::cos(theta / 2) * basis[0] + Complex(0, -std::sin(theta / 2)) * basis[2];
  const Channel rot = Channel::from_unitary(u);
  const double chi00 = std::cos(theta / 2) * std::cos(theta / 2);

  const double untwirled = calibrate_exact(rot, UnitaryEnsemble::trivial(1));
  CHECK(untwirled == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(untwirled - chi00) > 0.05);

  const double twirled = calibrate_exact(rot, UnitaryEnsemble::single_qubit_two_design());
  CHECK(twirled == doctest::Approx(chi00).epsilon(1e-10));
}

TEST_CASE("sampling calibration endpoints") {
  const auto td = UnitaryEnsemble::single_qubit_two_design();
  const auto ident = calibrate(Channel::identity(1), td, 2000, 7);
  CHECK(ident.p00_hat == 1.0);
  CHECK(ident.f_hat == doctest::Approx(1.0));
  CHECK(ident.stderr_ == 0.0);
  CHECK(ident.ensemble_label == "two_design");

  // D_0 at large shots: F_hat near 0, P00 near 1/3
  const auto d0 = calibrate(Channel::depolarizing(1, 0.0), td, 200000, 11);
  CHECK(std::abs(d0.p00_hat - 1.0 / 3.0) < 0.005);
  CHECK(std::abs(d0.f_hat) < 4.0 * d0.stderr_ + 1e-12);
}

TEST_CASE("sampled calibration recovers the model fidelity") {
  auto gen = rng::stream(62, {0});
  const auto targeted = random_channel_targeting(0.7, 0.15, gen);
  const auto result =
      calibrate(targeted.channel, UnitaryEnsemble::single_qubit_two_design(), 1000000, 13);
  CHECK(std::abs(result.f_hat - 0.7) < 3.0 * result.stderr_);
}

TEST_CASE("binomial coverage of the calibration estimator") {
  // |F_hat - F| < 4 stderr in at least 99% of repeated calibrations
  const Channel c = Channel::depolarizing(1, 0.7);
  const auto td = UnitaryEnsemble::single_qubit_two_design();
  int covered = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    const auto r = calibrate(c, td, 4000, 1000 + static_cast<std::uint64_t>(t));
    if (std::abs(r.f_hat - 0.7) < 4.0 * r.stderr_) ++covered;
  }
  CHECK(covered >= static_cast<int>(0.99 * trials));
}

TEST_CASE("calibration feeds plan construction with propagated uncertainty") {
  const Channel c = Channel::depolarizing(1, 0.8);
  const auto result = calibrate(c, UnitaryEnsemble::single_qubit_pauli_mixing(), 200000, 17);
  const auto plan = build_plan(c, UnitaryEnsemble::single_qubit_pauli_mixing(), result.f_hat);
  const double kappa_true = 2.0 / 0.8 - 1.0;
  // first-order propagation of the fidelity error through kappa = 2/F - 1
  const double kappa_tol = 2.0 / (0.8 * 0.8) * 4.0 * result.stderr_;
  CHECK(std::abs(plan.kappa() - kappa_true) < kappa_tol);
}

TEST_CASE("raw estimates below the advantage threshold are reported, not clamped") {
  // near the classical boundary an unlucky run lands below 2^-n; calibration
  // reports the raw value and plan construction performs the rejection
  const Channel marginal = Channel::depolarizing(1, 0.52);
  bool saw_below_half = false;
  for (std::uint64_t s = 0; s < 400 && !saw_below_half; ++s) {
    const auto r = calibrate(marginal, UnitaryEnsemble::trivial(1), 100, s);
    if (r.f_hat <= 0.5) {
      saw_below_half = true;
      CHECK(r.f_hat == (3.0 / 2.0) * r.p00_hat - 0.5);  // untouched linear map
      CHECK_THROWS_AS(build_plan(marginal, UnitaryEnsemble::trivial(1), r.f_hat),
                      std::invalid_argument);
    }
  }
  CHECK(saw_below_half);
}

TEST_CASE("calibration serialization") {
  CalibrationResult r;
  r.p00_hat = 0.75;
  r.f_hat = 0.625;
  r.shots = 1000;
  r.stderr_ = 0.01;
  r.ensemble_label = "pauli_mixing";
  const auto j = calibration_to_json(r);
  CHECK(j.at("f_hat").get<double>() == 0.625);
  CHECK(j.at("shots").get<long long>() == 1000);
  CHECK(calibration_csv_header() == "F_hat,stderr,shots,ensemble_label");
  const std::string row = calibration_csv_row(r);
  CHECK(row.find("0.625") != std::string::npos);
  CHECK(row.find("pauli_mixing") != std::string::npos);
}
