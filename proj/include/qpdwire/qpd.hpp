#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "qpdwire/channel.hpp"
#include "qpdwire/ensemble.hpp"
#include "qpdwire/partition.hpp"

namespace qpdwire {

/// Measure in the computational basis, prepare the uniform mixture over the
/// basis states orthogonal to the outcome.
struct MeasurePrepareChannel {
  int n;
  Channel channel;
};

MeasurePrepareChannel mp_channel(int num_qubits);

/// Twirl of the measure-and-prepare channel with the uniform ensemble over
/// the adjoint diagonalizers V_j^dag; equals the zero-fidelity depolarizing
/// channel and uses the minimal 2^n + 1 measure-and-prepare circuits.
Channel build_d0(int num_qubits, const CommutingPartition& partition);

/// One executable circuit variant of a plan: apply `pre`, send through the
/// physical channel, apply `post`.
struct PlanVariant {
  Matrix pre;
  Matrix post;
  double weight;       // probability within its branch
  double probability;  // overall sampling probability |c_branch| * weight / kappa
  double coefficient;  // signed contribution to the decomposition
  int sign;            // +1 channel branch, -1 measure-and-prepare branch
  bool mp_branch;
};

// Signed two-branch decomposition of the identity channel:
//   I = c1 * twirl(C, E) + c2 * twirl(M, V),
// with c1 = 1/F, c2 = -(1/F - 1) and sampling overhead kappa = 2/F - 1.
class QpdPlan {
 public:
  QpdPlan(Channel channel, UnitaryEnsemble ensemble, double fidelity);

  int num_qubits() const { return n_; }
  double fidelity() const { return fidelity_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double kappa() const { return kappa_; }
  double q1() const { return q1_; }
  double q2() const { return q2_; }

  const Channel& channel() const { return channel_; }
  const UnitaryEnsemble& ensemble() const { return ensemble_; }
  const std::vector<PlanVariant>& variants() const { return variants_; }
  std::size_t channel_variant_count() const { return ensemble_.size(); }
  std::size_t mp_variant_count() const { return variants_.size() - ensemble_.size(); }

  /// Superoperator of variant v applied as a map (pre, body, post composed).
  const Matrix& variant_superoperator(std::size_t v) const { return variant_supers_[v]; }

 private:
  int n_;
  double fidelity_, c1_, c2_, kappa_, q1_, q2_;
  Channel channel_;
  UnitaryEnsemble ensemble_;
  std::vector<PlanVariant> variants_;
  std::vector<Matrix> variant_supers_;
};

/// Validates 2^-n < F <= 1 and assembles the plan.
QpdPlan build_plan(const Channel& c, const UnitaryEnsemble& e, double fidelity);

/// The signed linear combination the plan actually implements, as a
/// superoperator. Not necessarily CPTP; used for bias analysis.
Matrix exact_implemented_channel(const QpdPlan& plan);

struct ShotRecord {
  int variant;
  int sign;
  int outcome;  // +-1
  std::uint64_t stream_id;
};

struct EstimateResult {
  double estimate = 0.0;
  long long shots_used = 0;
  std::vector<long long> per_variant_counts;
};

/// Monte Carlo estimate of tr[O I(rho)] through the plan. Variant v receives
/// floor(p_v * N) shots (residual shots are dropped); single-shot outcomes
/// are drawn from the exact Born distribution of the variant output state.
/// Deterministic for a fixed seed regardless of scheduling.
EstimateResult estimate_expectation(const QpdPlan& plan, const DensityMatrix& input,
                                    const PauliOperator& observable, long long num_shots,
                                    std::uint64_t seed, std::vector<ShotRecord>* records = nullptr);

/// Smallest N with N >= 2 (kappa/eps)^2 ln(2/delta), at least 1.
long long hoeffding_shots(double kappa, double eps, double delta);

/// Bias bound ||O|| (dp_err/F_est + (1/F_est - 1) d0_err + 2 |F/F_est - 1|).
double bias_bound(double opnorm_obs, double f_true, double f_est, double dnorm_dp_err,
                  double dnorm_d0_err, int num_qubits);

void write_shot_records_csv(const std::string& path, const std::vector<ShotRecord>& records);
std::vector<ShotRecord> read_shot_records_csv(const std::string& path);

nlohmann::json plan_to_json(const QpdPlan& plan);
QpdPlan plan_from_json(const nlohmann::json& j);

}  // namespace qpdwire
