#include <bit>
#include <cmath>
#include <sstream>

#include "qpdwire/experiment.hpp"
#include "qpdwire/noise.hpp"
#include "qpdwire/rng.hpp"

// Release-gate invariant suite: every structural property the library rests
// on, executed fresh and reported as a pass/fail table.

namespace qpdwire {

namespace {

using Check = VerifyItem (*)(std::uint64_t);

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

// Random CPTP channel from Gaussian Kraus blocks (isometry via QR).
Channel random_channel(int n, std::mt19937_64& g, int env_dim) {
  const Eigen::Index d = Eigen::Index(1) << n;
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix big(d * env_dim, d);
  for (Eigen::Index i = 0; i < big.rows(); ++i) {
    for (Eigen::Index j = 0; j < big.cols(); ++j) {
      big(i, j) = Complex(normal(g), normal(g));
    }
  }
  const Eigen::HouseholderQR<Matrix> qr(big);
  const Matrix iso = Matrix(qr.householderQ()).leftCols(d);
  std::vector<Matrix> kraus;
  for (int e = 0; e < env_dim; ++e) {
    kraus.push_back(iso.block(e * d, 0, d, d));
  }
  return Channel::from_kraus(n, kraus);
}

Channel random_pauli_channel(int n, std::mt19937_64& g) {
  const std::size_t count = std::size_t(1) << (2 * n);
  std::vector<double> probs(count);
  double total = 0.0;
  for (auto& p : probs) {
    p = rng::canonical(g);
    total += p;
  }
  for (auto& p : probs) p /= total;
  return Channel::from_pauli_probs(n, probs);
}

VerifyItem pauli_product_consistency(std::uint64_t) {
  for (int n = 1; n <= 2; ++n) {
    const std::uint32_t count = 1u << (2 * n);
    for (std::uint32_t a = 0; a < count; ++a) {
      for (std::uint32_t b = 0; b < count; ++b) {
        const auto pa = PauliOperator::from_index(n, a);
        const auto pb = PauliOperator::from_index(n, b);
        const Matrix expected = pa.matrix() * pb.matrix();
        const Matrix got = pauli_product(pa, pb).matrix();
        if (max_abs_diff(expected, got) > 1e-12) {
          return {"pauli-product-matrix-consistency", false,
                  "mismatch at n=" + std::to_string(n) + " a=" + std::to_string(a) +
                      " b=" + std::to_string(b)};
        }
      }
    }
  }
  return {"pauli-product-matrix-consistency", true, "exhaustive n<=2"};
}

VerifyItem pauli_orthogonality(std::uint64_t) {
  for (int n = 1; n <= 2; ++n) {
    const std::uint32_t count = 1u << (2 * n);
    const double dim = static_cast<double>(1u << n);
    for (std::uint32_t a = 0; a < count; ++a) {
      for (std::uint32_t b = 0; b < count; ++b) {
        const Complex inner =
            hs_inner(PauliOperator::from_index(n, a), PauliOperator::from_index(n, b));
        const Complex expected = (a == b) ? Complex(dim, 0.0) : Complex(0.0, 0.0);
        if (std::abs(inner - expected) > 0.0) {
          return {"pauli-orthogonality", false, "tr[P_a P_b] != 2^n delta at n=" + std::to_string(n)};
        }
      }
    }
  }
  return {"pauli-orthogonality", true, "2^n delta_ab exact for n<=2"};
}

VerifyItem conjugation_sign_law(std::uint64_t seed) {
  auto gen = rng::stream(seed, {0x7369676eULL});
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 3);
    const std::uint32_t mask = (1u << n) - 1;
    const std::uint32_t a = static_cast<std::uint32_t>(gen()) & mask;
    const std::uint32_t b = static_cast<std::uint32_t>(gen()) & mask;
    const std::uint32_t c = static_cast<std::uint32_t>(gen()) & mask;
    const std::uint32_t d = static_cast<std::uint32_t>(gen()) & mask;
    const PauliOperator p1(n, a, b, 0);
    const PauliOperator p2(n, c, d, 0);
    const Matrix lhs = p1.matrix() * p2.matrix() * p1.matrix().adjoint();
    const int sign = ((std::popcount(a & d) + std::popcount(c & b)) % 2 == 0) ? 1 : -1;
    const Matrix rhs = static_cast<double>(sign) * p2.matrix();
    if (max_abs_diff(lhs, rhs) > 1e-12) {
      return {"conjugation-sign-law", false, "sign law violated at trial " + std::to_string(trial)};
    }
  }
  return {"conjugation-sign-law", true, "300 random tuples, n in {1,2,3}"};
}

VerifyItem binary_sum_identity(std::uint64_t) {
  for (int n = 1; n <= 4; ++n) {
    const std::uint32_t count = 1u << n;
    for (std::uint32_t a = 0; a < count; ++a) {
      long long sum = 0;
      for (std::uint32_t b = 0; b < count; ++b) {
        sum += (std::popcount(a & b) % 2 == 0) ? 1 : -1;
      }
      const long long expected = (a == 0) ? static_cast<long long>(count) : 0;
      if (sum != expected) {
        return {"binary-vector-sum-identity", false, "failed at n=" + std::to_string(n)};
      }
    }
  }
  return {"binary-vector-sum-identity", true, "sum_b (-1)^(a.b) = 2^n delta_a0, n<=4"};
}

VerifyItem partition_structure(std::uint64_t) {
  for (int n = 1; n <= 3; ++n) {
    const auto part = commuting_partition(n);
    const std::size_t expected_sets = (std::size_t(1) << n) + 1;
    const std::size_t expected_size = (std::size_t(1) << n) - 1;
    if (part.sets.size() != expected_sets) {
      return {"partition-structure", false, "wrong set count at n=" + std::to_string(n)};
    }
    std::vector<bool> seen(std::size_t(1) << (2 * n), false);
    for (const auto& set : part.sets) {
      if (set.size() != expected_size) {
        return {"partition-structure", false, "wrong set size at n=" + std::to_string(n)};
      }
      for (std::size_t i = 0; i < set.size(); ++i) {
        if (set[i] == 0 || seen[set[i]]) {
          return {"partition-structure", false, "cover violation at n=" + std::to_string(n)};
        }
        seen[set[i]] = true;
        for (std::size_t j = i + 1; j < set.size(); ++j) {
          const auto pi = PauliOperator::from_index(n, set[i]);
          const auto pj = PauliOperator::from_index(n, set[j]);
          const Matrix comm = pi.matrix() * pj.matrix() - pj.matrix() * pi.matrix();
          if (comm.cwiseAbs().maxCoeff() > 1e-12) {
            return {"partition-structure", false, "non-commuting pair at n=" + std::to_string(n)};
          }
        }
      }
    }
    for (std::size_t a = 1; a < seen.size(); ++a) {
      if (!seen[a]) return {"partition-structure", false, "class not covered at n=" + std::to_string(n)};
    }
  }
  return {"partition-structure", true, "disjoint commuting cover, n<=3"};
}

VerifyItem partition_reconstruction(std::uint64_t) {
  for (int n = 1; n <= 3; ++n) {
    const auto part = commuting_partition(n);
    for (std::size_t j = 0; j < part.sets.size(); ++j) {
      std::vector<bool> hit(part.sets[j].size(), false);
      for (std::uint32_t a = 1; a < (1u << n); ++a) {
        const auto& [member, sign] = part.z_images[j][a - 1];
        const Matrix lhs = static_cast<double>(sign) * part.diagonalizers[j] *
                           PauliOperator(n, 0, a, 0).matrix() * part.diagonalizers[j].adjoint();
        const Matrix rhs = PauliOperator::from_index(n, member).matrix();
        if (max_abs_diff(lhs, rhs) > 1e-10) {
          return {"partition-diagonalizer-reconstruction", false,
                  "sign reconstruction failed at n=" + std::to_string(n)};
        }
        for (std::size_t m = 0; m < part.sets[j].size(); ++m) {
          if (part.sets[j][m] == member) hit[m] = true;
        }
      }
      for (bool h : hit) {
        if (!h) {
          return {"partition-diagonalizer-reconstruction", false,
                  "Z images do not exhaust set at n=" + std::to_string(n)};
        }
      }
    }
  }
  return {"partition-diagonalizer-reconstruction", true, "s V_j Z_a V_j^dag covers S_j, n<=3"};
}

VerifyItem depolarizing_fidelity(std::uint64_t) {
  for (int n = 1; n <= 2; ++n) {
    for (double p : {0.0, 0.25, 0.5, 1.0}) {
      const double f = entanglement_fidelity(Channel::depolarizing(n, p));
      if (std::abs(f - p) > 1e-12) {
        return {"depolarizing-fidelity", false, "F(D_p) != p at n=" + std::to_string(n)};
      }
    }
    const Matrix lhs = Channel::depolarizing(n, 0.37).superoperator();
    const Matrix rhs = 0.37 * Channel::identity(n).superoperator() +
                       0.63 * Channel::depolarizing(n, 0.0).superoperator();
    if (max_abs_diff(lhs, rhs) > 1e-12) {
      return {"depolarizing-fidelity", false, "mixture identity failed at n=" + std::to_string(n)};
    }
  }
  return {"depolarizing-fidelity", true, "F(D_p)=p and D_p = p I + (1-p) D_0"};
}

VerifyItem chi_roundtrip(std::uint64_t seed) {
  auto gen = rng::stream(seed, {0x636869ULL});
  for (int trial = 0; trial < 25; ++trial) {
    const Channel c = random_channel(1, gen, 4);
    const Channel back = Channel::from_chi(1, c.chi());
    if (max_abs_diff(back.superoperator(), c.superoperator()) > 1e-10) {
      return {"chi-superoperator-roundtrip", false, "trial " + std::to_string(trial)};
    }
  }
  return {"chi-superoperator-roundtrip", true, "25 random channels"};
}

VerifyItem choi_overlap(std::uint64_t seed) {
  auto gen = rng::stream(seed, {0x63686f69ULL});
  for (int trial = 0; trial < 25; ++trial) {
    const Channel c = random_channel(1, gen, 4);
    const double chi00 = c.chi()(0, 0).real();
    const Vector phi = bell_vector(1);
    const double overlap =
        (phi.adjoint() * choi_state(c).matrix() * phi)(0, 0).real();
    if (std::abs(overlap - chi00) > 1e-10) {
      return {"choi-bell-overlap-equals-chi00", false, "trial " + std::to_string(trial)};
    }
  }
  return {"choi-bell-overlap-equals-chi00", true, "25 random channels"};
}

VerifyItem mp_twirl_equals_d0(std::uint64_t) {
  for (int n = 1; n <= 2; ++n) {
    const auto part = commuting_partition(n);
    const Channel d0 = build_d0(n, part);
    const double diff = max_abs_diff(d0.superoperator(), Channel::depolarizing(n, 0.0).superoperator());
    if (diff > 1e-10) {
      return {"mp-twirl-equals-d0", false, "max diff " + fmt(diff) + " at n=" + std::to_string(n)};
    }
    if (ptm_rank(d0) != (1 << (2 * n))) {
      return {"mp-twirl-equals-d0", false, "PTM rank mismatch at n=" + std::to_string(n)};
    }
    if (part.diagonalizers.size() != (std::size_t(1) << n) + 1) {
      return {"mp-twirl-equals-d0", false, "variant count mismatch at n=" + std::to_string(n)};
    }
  }
  return {"mp-twirl-equals-d0", true, "n in {1,2}, minimal 2^n+1 circuits, full PTM rank"};
}

VerifyItem two_design_depolarizes(std::uint64_t seed) {
  auto gen = rng::stream(seed, {0x74646573ULL});
  const auto ensemble = UnitaryEnsemble::single_qubit_two_design();
  for (int trial = 0; trial < 25; ++trial) {
    const Channel c = random_channel(1, gen, 4);
    const Channel twirled = twirl(c, ensemble);
    const Channel target = Channel::depolarizing(1, entanglement_fidelity(c));
    if (max_abs_diff(twirled.superoperator(), target.superoperator()) > 1e-10) {
      return {"two-design-depolarizes", false, "trial " + std::to_string(trial)};
    }
  }
  return {"two-design-depolarizes", true, "25 random channels"};
}

VerifyItem twirl_preserves_fidelity(std::uint64_t seed) {
  auto gen = rng::stream(seed, {0x66707265ULL});
  const std::vector<UnitaryEnsemble> ensembles = {
      UnitaryEnsemble::single_qubit_two_design(), UnitaryEnsemble::single_qubit_pauli_mixing(),
      UnitaryEnsemble::trivial(1), UnitaryEnsemble::pauli_group(1)};
  for (int trial = 0; trial < 25; ++trial) {
    const Channel c = random_channel(1, gen, 3);
    const double f = entanglement_fidelity(c);
    for (const auto& e : ensembles) {
      const double ft = entanglement_fidelity(twirl(c, e));
      if (std::abs(f - ft) > 1e-10) {
        return {"twirl-preserves-fidelity", false, "trial " + std::to_string(trial)};
      }
    }
  }
  return {"twirl-preserves-fidelity", true, "25 channels x 4 ensembles"};
}

VerifyItem qpd_identity(std::uint64_t seed) {
  auto gen = rng::stream(seed, {0x71706469ULL});
  // n = 1: two-design twirl of random channels with F > 1/2.
  for (int trial = 0; trial < 25; ++trial) {
    const double w = 0.55 + 0.4 * rng::canonical(gen);
    const Channel raw = random_channel(1, gen, 4);
    const Matrix mix = w * Channel::identity(1).superoperator() + (1.0 - w) * raw.superoperator();
    const Channel c(1, mix);
    const double f = entanglement_fidelity(c);
    const auto plan = build_plan(c, UnitaryEnsemble::single_qubit_two_design(), f);
    const Matrix implemented = exact_implemented_channel(plan);
    if (max_abs_diff(implemented, Channel::identity(1).superoperator()) > 1e-10) {
      return {"qpd-identity-reconstruction", false, "n=1 trial " + std::to_string(trial)};
    }
    if (std::abs(plan.kappa() - (2.0 / f - 1.0)) > 1e-12) {
      return {"qpd-identity-reconstruction", false, "kappa mismatch at trial " + std::to_string(trial)};
    }
  }
  // n = 2: depolarizing channel with trivial twirl.
  for (double p : {0.3, 0.7, 0.95}) {
    const Channel c = Channel::depolarizing(2, p);
    const auto plan = build_plan(c, UnitaryEnsemble::trivial(2), p);
    if (max_abs_diff(exact_implemented_channel(plan), Channel::identity(2).superoperator()) > 1e-10) {
      return {"qpd-identity-reconstruction", false, "n=2 p=" + fmt(p)};
    }
  }
  return {"qpd-identity-reconstruction", true, "identity superoperator within 1e-10, n in {1,2}"};
}

VerifyItem estimator_unbiasedness(std::uint64_t) {
  // Analytic expectation of the estimator equals tr[O I~(rho)] when every
  // variant receives shots: both reduce to sum_v c_v tr[O F_v(rho)].
  const Channel c = Channel::depolarizing(1, 0.8);
  const auto plan = build_plan(c, UnitaryEnsemble::trivial(1), 0.8);
  const DensityMatrix rho = DensityMatrix::basis_state(1, 0);
  const PauliOperator obs = PauliOperator::from_label("Z");
  const Matrix obs_mat = obs.matrix();
  double expected = 0.0;
  for (std::size_t v = 0; v < plan.variants().size(); ++v) {
    const Matrix out = unvectorize(plan.variant_superoperator(v) * vectorize(rho.matrix()), 2);
    expected += plan.variants()[v].coefficient * (obs_mat * out).trace().real();
  }
  const Matrix implemented = exact_implemented_channel(plan);
  const Matrix out = unvectorize(implemented * vectorize(rho.matrix()), 2);
  const double direct = (obs_mat * out).trace().real();
  if (std::abs(expected - direct) > 1e-12 || std::abs(expected - 1.0) > 1e-12) {
    return {"estimator-analytic-unbiasedness", false,
            "expected " + fmt(expected) + " direct " + fmt(direct)};
  }
  return {"estimator-analytic-unbiasedness", true, "matches tr[O I~(rho)] = 1 exactly"};
}

VerifyItem estimator_determinism(std::uint64_t seed) {
  const Channel c = Channel::depolarizing(1, 0.8);
  const auto plan = build_plan(c, UnitaryEnsemble::trivial(1), 0.8);
  const DensityMatrix rho = DensityMatrix::basis_state(1, 0);
  const PauliOperator obs = PauliOperator::from_label("X");
  const auto r1 = estimate_expectation(plan, rho, obs, 5000, seed);
  const auto r2 = estimate_expectation(plan, rho, obs, 5000, seed);
  if (r1.estimate != r2.estimate || r1.shots_used != r2.shots_used) {
    return {"estimator-determinism", false, "same seed produced different results"};
  }
  return {"estimator-determinism", true, "bit-identical repeated run"};
}

VerifyItem hoeffding_formula(std::uint64_t) {
  if (hoeffding_shots(1.0, 0.1, 0.05) != 738) {
    return {"hoeffding-shot-formula", false, "kappa=1 case"};
  }
  const long long expected = static_cast<long long>(std::ceil(1800.0 * std::log(40.0)));
  if (hoeffding_shots(3.0, 0.1, 0.05) != expected) {
    return {"hoeffding-shot-formula", false, "kappa=3 case"};
  }
  if (hoeffding_shots(1.0, 1e9, 1.0) != 1) {
    return {"hoeffding-shot-formula", false, "floor-at-one case"};
  }
  return {"hoeffding-shot-formula", true, "ceil(2 (kappa/eps)^2 ln(2/delta))"};
}

VerifyItem calibration_linear_map(std::uint64_t) {
  for (int n = 1; n <= 2; ++n) {
    for (double p : {0.0, 0.3, 1.0}) {
      const double f = calibrate_exact(Channel::depolarizing(n, p), UnitaryEnsemble::trivial(n));
      if (std::abs(f - p) > 1e-12) {
        return {"calibration-linear-map", false, "D_p trivial failed at n=" + std::to_string(n)};
      }
    }
  }
  return {"calibration-linear-map", true, "calibrate_exact(D_p, trivial) = p"};
}

VerifyItem teleportation_chain(std::uint64_t seed) {
  auto gen = rng::stream(seed, {0x74656c65ULL});
  for (int trial = 0; trial < 25; ++trial) {
    const Channel c = random_channel(1, gen, 4);
    const Channel t = teleportation_channel({1, choi_state(c)});
    if (std::abs(entanglement_fidelity(t) - entanglement_fidelity(c)) > 1e-10) {
      return {"teleportation-choi-fidelity-chain", false, "fidelity drift at trial " + std::to_string(trial)};
    }
    if (coherent_offdiag_sum(t) > 1e-10) {
      return {"teleportation-choi-fidelity-chain", false, "non-Pauli output at trial " + std::to_string(trial)};
    }
  }
  return {"teleportation-choi-fidelity-chain", true, "25 random channels"};
}

VerifyItem swap_monotonicity(std::uint64_t) {
  double prev = 1.0;
  for (int k = 0; k <= 60; ++k) {
    const auto resource = swap_degraded_resource(k, 0.05);
    const double f = entanglement_fidelity(teleportation_channel(resource));
    if (f > prev + 1e-12) {
      return {"swap-degradation-monotone", false, "fidelity increased at k=" + std::to_string(k)};
    }
    prev = f;
  }
  if (std::abs(entanglement_fidelity(teleportation_channel(swap_degraded_resource(400, 0.3))) - 0.25) >
      1e-6) {
    return {"swap-degradation-monotone", false, "separable floor not reached"};
  }
  return {"swap-degradation-monotone", true, "non-increasing, converges to 1/4"};
}

}  // namespace

namespace verify_detail {

VerifyItem pauli_mixing_depolarizes_check(std::uint64_t seed, double chi00_perturbation) {
  auto gen = rng::stream(seed, {0x706d6978ULL});
  const auto ensemble = UnitaryEnsemble::single_qubit_pauli_mixing();
  for (int trial = 0; trial < 100; ++trial) {
    const Channel c = random_pauli_channel(1, gen);
    const Channel twirled = twirl(c, ensemble);
    const double target_f = entanglement_fidelity(c) + chi00_perturbation;
    const Channel target = Channel::depolarizing(1, target_f);
    const double diff = max_abs_diff(twirled.superoperator(), target.superoperator());
    if (diff > 1e-12) {
      return {"pauli-mixing-depolarizes", false,
              "max superoperator diff " + fmt(diff) + " at trial " + std::to_string(trial)};
    }
  }
  return {"pauli-mixing-depolarizes", true, "100 random Pauli channels within 1e-12"};
}

}  // namespace verify_detail

VerifyReport run_verify(std::uint64_t seed) {
  VerifyReport report;
  const Check checks[] = {
      pauli_product_consistency, pauli_orthogonality, conjugation_sign_law, binary_sum_identity,
      partition_structure,       partition_reconstruction, depolarizing_fidelity, chi_roundtrip,
      choi_overlap,              mp_twirl_equals_d0,  two_design_depolarizes, twirl_preserves_fidelity,
      qpd_identity,              estimator_unbiasedness, estimator_determinism, hoeffding_formula,
      calibration_linear_map,    teleportation_chain, swap_monotonicity,
  };
  for (const auto& check : checks) {
    report.items.push_back(check(seed));
  }
  report.items.push_back(verify_detail::pauli_mixing_depolarizes_check(seed, 0.0));
  return report;
}

}  // namespace qpdwire
