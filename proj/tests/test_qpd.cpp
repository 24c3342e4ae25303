#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "qpdwire/qpd.hpp"
#include "test_support.hpp"

using namespace qpdwire;
using test::random_channel_with_min_fidelity;

namespace {

// Direct Eq.-style oracle: M(rho) = sum_k <k|rho|k> * rho_k with rho_k the
// uniform mixture over basis states orthogonal to |k>.
Matrix mp_oracle(int n, const Matrix& rho) {
  const Eigen::Index d = Eigen::Index(1) << n;
  Matrix out = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double weight = rho(k, k).real();
    for (Eigen::Index l = 0; l < d; ++l) {
      if (l != k) out(l, l) += weight / static_cast<double>(d - 1);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("measure-and-prepare channel") {
  const auto mp1 = mp_channel(1);
  // M(|0><0|) = |1><1|
  const Matrix out0 = mp1.channel.apply(DensityMatrix::basis_state(1, 0)).matrix();
  CHECK(max_abs_diff(out0, DensityMatrix::basis_state(1, 1).matrix()) < 1e-14);

  // M(|+><+|) = I/2, against the direct summation oracle
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const Matrix plus_rho = DensityMatrix::pure(plus).matrix();
  CHECK(max_abs_diff(mp1.channel.apply_matrix(plus_rho), mp_oracle(1, plus_rho)) < 1e-14);
  CHECK(max_abs_diff(mp1.channel.apply_matrix(plus_rho), Matrix::Identity(2, 2) / 2.0) < 1e-14);

  // n = 2: M(|00><00|) is the uniform mixture over the other three basis states
  const auto mp2 = mp_channel(2);
  const Matrix out00 = mp2.channel.apply(DensityMatrix::basis_state(2, 0)).matrix();
  Matrix expected = Matrix::Zero(4, 4);
  expected(1, 1) = expected(2, 2) = expected(3, 3) = 1.0 / 3.0;
  CHECK(max_abs_diff(out00, expected) < 1e-14);

  // CPTP validation passes
  CHECK_NOTHROW(Channel(1, mp1.channel.superoperator()));
  CHECK_NOTHROW(Channel(2, mp2.channel.superoperator()));

  auto gen = rng::stream(41, {0});
  const DensityMatrix rho = haar_random_state(2, gen);
  CHECK(max_abs_diff(mp2.channel.apply_matrix(rho.matrix()), mp_oracle(2, rho.matrix())) < 1e-13);
}

TEST_CASE("mp-twirl equals the zero-fidelity depolarizing channel") {
  for (int n = 1; n <= 2; ++n) {
    const auto part = commuting_partition(n);
    CHECK(part.diagonalizers.size() == (std::size_t(1) << n) + 1);
    const Channel d0 = build_d0(n, part);
    CHECK(max_abs_diff(d0.superoperator(), Channel::depolarizing(n, 0.0).superoperator()) < 1e-10);
    CHECK(ptm_rank(d0) == 1 << (2 * n));
  }
  CHECK_THROWS_AS(build_d0(2, commuting_partition(1)), std::invalid_argument);
}

TEST_CASE("plan coefficients and range rejection") {
  const Channel id = Channel::identity(1);
  const auto trivial = UnitaryEnsemble::trivial(1);

  const auto perfect = build_plan(id, trivial, 1.0);
  CHECK(perfect.kappa() == doctest::Approx(1.0));
  CHECK(perfect.c2() == doctest::Approx(0.0));
  CHECK(perfect.q2() == doctest::Approx(0.0));

  const auto half = build_plan(Channel::depolarizing(1, 0.5), trivial, 0.5);
  CHECK(half.kappa() == doctest::Approx(3.0));  // classical wire-cut cost 2^(n+1) - 1

  const auto typical = build_plan(Channel::depolarizing(1, 0.91), trivial, 0.91);
  CHECK(typical.kappa() == doctest::Approx(2.0 / 0.91 - 1.0).epsilon(1e-12));
  CHECK(typical.kappa() == doctest::Approx(1.1978).epsilon(1e-4));

  CHECK_THROWS_WITH_AS(build_plan(id, trivial, 0.5 - 1e-12), doctest::Contains("no advantage"),
                       std::invalid_argument);
  CHECK_THROWS_AS(build_plan(id, trivial, 1.0 + 1e-9), std::invalid_argument);
  CHECK_THROWS_AS(build_plan(Channel::identity(2), UnitaryEnsemble::trivial(2), 0.2),
                  std::invalid_argument);
  // the boundary itself carries the classical wire-cut cost and is accepted
  CHECK(build_plan(Channel::identity(2), UnitaryEnsemble::trivial(2), 0.25).kappa() ==
        doctest::Approx(7.0));

  // variant bookkeeping
  CHECK(typical.mp_variant_count() == 3);
  CHECK(typical.channel_variant_count() == 1);
  double prob_sum = 0.0, coeff_sum = 0.0;
  for (const auto& v : typical.variants()) {
    prob_sum += v.probability;
    coeff_sum += v.coefficient;
    CHECK(((v.sign == 1 && v.coefficient >= 0.0) || (v.sign == -1 && v.coefficient <= 0.0)));
  }
  CHECK(prob_sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(coeff_sum == doctest::Approx(1.0).epsilon(1e-12));  // c1 + c2 = 1
}

TEST_CASE("exact implemented channel") {
  // exactly depolarizing twirl reconstructs the identity
  const Channel dp = Channel::depolarizing(1, 0.8);
  const auto plan = build_plan(dp, UnitaryEnsemble::trivial(1), 0.8);
  CHECK(max_abs_diff(exact_implemented_channel(plan), Channel::identity(1).superoperator()) < 1e-12);

  // Pauli-mixing twirl of a coherent channel: deviation of outputs is bounded
  // by the chi off-diagonal sum
  auto gen = rng::stream(42, {0});
  const auto& basis = pauli_basis(1);
  const double theta = 0.4;
  const Matrix u = std::cos(theta / 2) * basis[0] + Complex(0, -std::sin(theta / 2)) * basis[1];
  const Channel coherent = Channel(1, (Channel::from_unitary(u).superoperator() *
                                       Channel::depolarizing(1, 0.9).superoperator()));
  const double f = entanglement_fidelity(coherent);
  const auto pm_plan = build_plan(coherent, UnitaryEnsemble::single_qubit_pauli_mixing(), f);
  const Matrix implemented = exact_implemented_channel(pm_plan);
  const Matrix deviation = implemented - Channel::identity(1).superoperator();
  CHECK(deviation.cwiseAbs().maxCoeff() > 1e-4);  // genuinely biased
  const double bound = coherent_offdiag_sum(coherent) / f;
  for (int trial = 0; trial < 50; ++trial) {
    const DensityMatrix rho = haar_random_state(1, gen);
    const Matrix out = unvectorize(implemented * vectorize(rho.matrix()), 2);
    CHECK(trace_norm(out - rho.matrix()) <= bound + 1e-9);
  }

  // mismatched fidelity estimate: bias consistent with the 2|F/F~ - 1| term
  const auto biased_plan = build_plan(dp, UnitaryEnsemble::trivial(1), 0.85);
  const Matrix biased = exact_implemented_channel(biased_plan);
  const double term = 2.0 * std::abs(0.8 / 0.85 - 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const DensityMatrix rho = haar_random_state(1, gen);
    const Matrix out = unvectorize(biased * vectorize(rho.matrix()), 2);
    worst = std::max(worst, trace_norm(out - rho.matrix()));
  }
  CHECK(worst > 0.0);
  CHECK(worst <= term + 1e-9);
  CHECK(bias_bound(1.0, 0.8, 0.85, 0.0, 0.0, 1) == doctest::Approx(term));
}

TEST_CASE("estimator determinism, allocation and records") {
  const Channel dp = Channel::depolarizing(1, 0.8);
  const auto plan = build_plan(dp, UnitaryEnsemble::trivial(1), 0.8);
  const DensityMatrix rho = DensityMatrix::basis_state(1, 0);
  const auto obs = PauliOperator::from_label("Z");

  std::vector<ShotRecord> records;
  const auto r1 = estimate_expectation(plan, rho, obs, 10000, 99, &records);
  const auto r2 = estimate_expectation(plan, rho, obs, 10000, 99);
  CHECK(r1.estimate == r2.estimate);
  CHECK(r1.shots_used == r2.shots_used);
  CHECK(r1.shots_used <= 10000);
  CHECK(static_cast<long long>(records.size()) == r1.shots_used);

  long long total = 0;
  for (std::size_t v = 0; v < plan.variants().size(); ++v) {
    const long long expected =
        static_cast<long long>(std::floor(plan.variants()[v].probability * 10000.0));
    CHECK(r1.per_variant_counts[v] == expected);
    total += expected;
  }
  CHECK(total == r1.shots_used);

  // record signs match the branch coefficient signs
  for (const auto& rec : records) {
    CHECK(rec.sign == plan.variants()[static_cast<std::size_t>(rec.variant)].sign);
  }

  CHECK_THROWS_AS(estimate_expectation(plan, rho, obs, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(
      estimate_expectation(plan, rho, PauliOperator(1, 1, 1, 0), 100, 1),  // non-Hermitian XZ
      std::invalid_argument);
}

TEST_CASE("estimator converges on the ideal transfer") {
  const auto plan = build_plan(Channel::identity(1), UnitaryEnsemble::trivial(1), 1.0);
  auto gen = rng::stream(43, {0});
  const DensityMatrix rho = haar_random_state(1, gen);
  const auto obs = PauliOperator::from_label("Z");
  const double truth = rho.expectation(obs);
  const auto result = estimate_expectation(plan, rho, obs, 1000000, 7);
  CHECK(std::abs(result.estimate - truth) < 0.005);  // ~5 sigma at 1e6 shots
}

TEST_CASE("estimator analytic mean matches the implemented channel") {
  // Exhaustive expectation over Born outcomes: each variant's outcome mean is
  // tr[O F_v(rho)], so the estimator mean is sum_v c_v tr[O F_v(rho)].
  const Channel dp = Channel::depolarizing(1, 0.8);
  const auto plan = build_plan(dp, UnitaryEnsemble::trivial(1), 0.8);
  const DensityMatrix rho = DensityMatrix::basis_state(1, 0);
  const Matrix obs = PauliOperator::from_label("Z").matrix();
  double mean = 0.0;
  for (std::size_t v = 0; v < plan.variants().size(); ++v) {
    const Matrix out = unvectorize(plan.variant_superoperator(v) * vectorize(rho.matrix()), 2);
    mean += plan.variants()[v].coefficient * (obs * out).trace().real();
  }
  CHECK(mean == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rms error scales with kappa") {
  // smoke-scale version of the full acceptance check
  const auto obs = PauliOperator::from_label("Z");
  auto gen = rng::stream(44, {0});
  const DensityMatrix rho = haar_random_state(1, gen);

  auto rms_for = [&](double f) {
    const auto plan = build_plan(Channel::depolarizing(1, f), UnitaryEnsemble::trivial(1), f);
    const Matrix ideal = exact_implemented_channel(plan);
    const double truth = rho.expectation(obs);
    double acc = 0.0;
    const int reps = 400;
    for (int r = 0; r < reps; ++r) {
      const auto est = estimate_expectation(plan, rho, obs, 10000, 1000 + r);
      acc += (est.estimate - truth) * (est.estimate - truth);
    }
    return std::sqrt(acc / reps);
  };
  const double ratio = rms_for(0.55) / rms_for(0.9);
  const double kappa_ratio = (2.0 / 0.55 - 1.0) / (2.0 / 0.9 - 1.0);
  CHECK(ratio == doctest::Approx(kappa_ratio).epsilon(0.25));
}

TEST_CASE("hoeffding shot counts") {
  CHECK(hoeffding_shots(1.0, 0.1, 0.05) == 738);  // 200 ln 40 = 737.78
  const long long expected = static_cast<long long>(std::ceil(1800.0 * std::log(40.0)));
  CHECK(hoeffding_shots(3.0, 0.1, 0.05) == expected);
  CHECK(hoeffding_shots(1.0, 1e12, 0.05) == 1);
  CHECK_THROWS_AS(hoeffding_shots(0.5, 0.1, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(hoeffding_shots(1.0, 0.0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(hoeffding_shots(1.0, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("bias bound arithmetic") {
  CHECK(bias_bound(1.0, 0.9, 0.9, 0.0, 0.0, 1) == doctest::Approx(0.0));
  CHECK(bias_bound(1.0, 0.9, 0.9, 0.1, 0.0, 1) == doctest::Approx(0.1 / 0.9).epsilon(1e-12));
  CHECK(bias_bound(1.0, 0.9, 0.8, 0.0, 0.0, 1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(bias_bound(1.0, 0.9, 0.5, 0.0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(bias_bound(-1.0, 0.9, 0.9, 0.0, 0.0, 1), std::invalid_argument);
}

TEST_CASE("shot record csv round-trip") {
  const std::string path = (std::filesystem::temp_directory_path() / "qpdwire_shots.csv").string();
  const std::vector<ShotRecord> records = {{0, 1, 1, 42}, {4, -1, -1, 43}, {2, 1, -1, 44}};
  write_shot_records_csv(path, records);
  const auto back = read_shot_records_csv(path);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].variant == records[i].variant);
    CHECK(back[i].sign == records[i].sign);
    CHECK(back[i].outcome == records[i].outcome);
    CHECK(back[i].stream_id == records[i].stream_id);
  }
  std::filesystem::remove(path);
}

TEST_CASE("plan json round-trip") {
  auto gen = rng::stream(45, {0});
  const Channel c = random_channel_with_min_fidelity(1, 0.55, gen);
  const double f = entanglement_fidelity(c);
  const auto plan = build_plan(c, UnitaryEnsemble::single_qubit_two_design(), f);
  const auto back = plan_from_json(plan_to_json(plan));
  CHECK(back.fidelity() == plan.fidelity());
  CHECK(back.kappa() == doctest::Approx(plan.kappa()).epsilon(1e-15));
  REQUIRE(back.variants().size() == plan.variants().size());
  for (std::size_t v = 0; v < plan.variants().size(); ++v) {
    CHECK(max_abs_diff(back.variant_superoperator(v), plan.variant_superoperator(v)) < 1e-10);
  }
}
