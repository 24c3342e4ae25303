#include "qpdwire/qpd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "qpdwire/rng.hpp"

namespace qpdwire {

namespace {

constexpr std::uint64_t kShotStreamTag = 0x73686f74ULL;  // per-variant shot streams

}  // namespace

MeasurePrepareChannel mp_channel(int num_qubits) {
  if (num_qubits < 1) throw std::invalid_argument("mp_channel: qubit count must be positive");
  const Eigen::Index d = Eigen::Index(1) << num_qubits;
  // M(rho) = sum_k <k|rho|k> rho_k with rho_k uniform over basis states
  // orthogonal to |k>. As a superoperator: sum_k vec(rho_k) e_{k + d k}^T.
  Matrix super = Matrix::Zero(d * d, d * d);
  const double w = 1.0 / static_cast<double>(d - 1);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index in_slot = k + d * k;
    for (Eigen::Index l = 0; l < d; ++l) {
      if (l == k) continue;
      super(l + d * l, in_slot) = w;
    }
  }
  return {num_qubits, Channel(num_qubits, std::move(super), false)};
}

Channel build_d0(int num_qubits, const CommutingPartition& partition) {
  if (partition.n != num_qubits) {
    throw std::invalid_argument("build_d0: partition qubit count mismatch");
  }
  const auto mp = mp_channel(num_qubits);
  std::vector<WeightedUnitary> items;
  items.reserve(partition.diagonalizers.size());
  const double w = 1.0 / static_cast<double>(partition.diagonalizers.size());
  for (const Matrix& v : partition.diagonalizers) {
    items.push_back({w, v.adjoint()});
  }
  return twirl(mp.channel, UnitaryEnsemble(num_qubits, std::move(items)));
}

QpdPlan::QpdPlan(Channel channel, UnitaryEnsemble ensemble, double fidelity)
    : n_(channel.num_qubits()),
      fidelity_(fidelity),
      channel_(std::move(channel)),
      ensemble_(std::move(ensemble)) {
  if (ensemble_.num_qubits() != n_)
    throw std::invalid_argument("QpdPlan: ensemble and channel dimensions differ");
  const double lower = 1.0 / static_cast<double>(Eigen::Index(1) << n_);
  if (fidelity_ > 1.0) {
    throw std::invalid_argument("QpdPlan: fidelity above 1");
  }
  // At F = 2^-n the overhead matches the classical wire-cut bound 2^(n+1)-1;
  // below it the decomposition has no advantage over classical communication.
  if (fidelity_ < lower) {
    throw std::invalid_argument(
        "QpdPlan: fidelity below 2^-n; the decomposition has no advantage over a classical "
        "wire cut in this regime");
  }
  c1_ = 1.0 / fidelity_;
  c2_ = -(1.0 / fidelity_ - 1.0);
  kappa_ = std::abs(c1_) + std::abs(c2_);
  q1_ = std::abs(c1_) / kappa_;
  q2_ = std::abs(c2_) / kappa_;

  const auto partition = commuting_partition(n_);
  const auto mp = mp_channel(n_);
  const double mp_weight = 1.0 / static_cast<double>(partition.diagonalizers.size());

  for (const auto& item : ensemble_.items()) {
    PlanVariant v;
    v.pre = item.unitary;
    v.post = item.unitary.adjoint();
    v.weight = item.probability;
    v.probability = q1_ * item.probability;
    v.coefficient = c1_ * item.probability;
    v.sign = 1;
    v.mp_branch = false;
    variants_.push_back(std::move(v));
  }
  for (const Matrix& vj : partition.diagonalizers) {
    PlanVariant v;
    v.pre = vj.adjoint();
    v.post = vj;
    v.weight = mp_weight;
    v.probability = q2_ * mp_weight;
    v.coefficient = c2_ * mp_weight;
    v.sign = -1;
    v.mp_branch = true;
    variants_.push_back(std::move(v));
  }

  variant_supers_.reserve(variants_.size());
  for (const auto& v : variants_) {
    const Matrix& body = v.mp_branch ? mp.channel.superoperator() : channel_.superoperator();
    const Matrix pre_super = kron(v.pre.conjugate(), v.pre);
    const Matrix post_super = kron(v.post.conjugate(), v.post);
    variant_supers_.push_back(post_super * body * pre_super);
  }
}

QpdPlan build_plan(const Channel& c, const UnitaryEnsemble& e, double fidelity) {
  return QpdPlan(c, e, fidelity);
}

Matrix exact_implemented_channel(const QpdPlan& plan) {
  const Eigen::Index d2 = plan.channel().superoperator().rows();
  Matrix acc = Matrix::Zero(d2, d2);
  for (std::size_t v = 0; v < plan.variants().size(); ++v) {
    acc += plan.variants()[v].coefficient * plan.variant_superoperator(v);
  }
  return acc;
}

EstimateResult estimate_expectation(const QpdPlan& plan, const DensityMatrix& input,
                                    const PauliOperator& observable, long long num_shots,
                                    std::uint64_t seed, std::vector<ShotRecord>* records) {
  if (num_shots <= 0) throw std::invalid_argument("estimate_expectation: shot count must be positive");
  if (input.num_qubits() != plan.num_qubits()) {
    throw std::invalid_argument("estimate_expectation: input dimension mismatch");
  }
  if (observable.num_qubits() != plan.num_qubits() || !observable.is_hermitian()) {
    throw std::invalid_argument("estimate_expectation: observable must be a Hermitian Pauli");
  }

  const Matrix obs = observable.matrix();
  const Vector rho_vec = vectorize(input.matrix());
  const Eigen::Index d = input.dim();

  EstimateResult result;
  result.per_variant_counts.resize(plan.variants().size(), 0);

  for (std::size_t v = 0; v < plan.variants().size(); ++v) {
    const auto& variant = plan.variants()[v];
    const long long shots = static_cast<long long>(
        std::floor(variant.probability * static_cast<double>(num_shots)));
    result.per_variant_counts[v] = shots;
    result.shots_used += shots;
    if (shots == 0) continue;

    const Matrix out = unvectorize(plan.variant_superoperator(v) * rho_vec, d);
    const double t = (obs * out).trace().real();
    const double p_plus = std::clamp(0.5 * (1.0 + t), 0.0, 1.0);

    const std::uint64_t stream_id = rng::derive_key(seed, {kShotStreamTag, v});
    std::mt19937_64 gen(stream_id);
    long long sum = 0;
    for (long long s = 0; s < shots; ++s) {
      const int m = rng::bernoulli(gen, p_plus) ? 1 : -1;
      sum += m;
      if (records) {
        records->push_back({static_cast<int>(v), variant.sign, m, stream_id});
      }
    }
    result.estimate += variant.coefficient * (static_cast<double>(sum) / static_cast<double>(shots));
  }
  return result;
}

long long hoeffding_shots(double kappa, double eps, double delta) {
  if (!(eps > 0.0)) throw std::invalid_argument("hoeffding_shots: eps must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("hoeffding_shots: delta out of (0, 1]");
  if (!(kappa >= 1.0)) throw std::invalid_argument("hoeffding_shots: kappa must be >= 1");
  const double bound = 2.0 * (kappa / eps) * (kappa / eps) * std::log(2.0 / delta);
  const double n = std::ceil(bound);
  return std::max(1LL, static_cast<long long>(n));
}

double bias_bound(double opnorm_obs, double f_true, double f_est, double dnorm_dp_err,
                  double dnorm_d0_err, int num_qubits) {
  if (opnorm_obs < 0.0 || f_true < 0.0 || dnorm_dp_err < 0.0 || dnorm_d0_err < 0.0) {
    throw std::invalid_argument("bias_bound: inputs must be nonnegative");
  }
  const double lower = 1.0 / static_cast<double>(Eigen::Index(1) << num_qubits);
  if (f_est <= lower) throw std::invalid_argument("bias_bound: fidelity estimate at or below 2^-n");
  return opnorm_obs * (dnorm_dp_err / f_est + (1.0 / f_est - 1.0) * dnorm_d0_err +
                       2.0 * std::abs(f_true / f_est - 1.0));
}

void write_shot_records_csv(const std::string& path, const std::vector<ShotRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_shot_records_csv: cannot open " + path);
  out << "variant_id,sign,outcome,stream_id\n";
  for (const auto& r : records) {
    out << r.variant << ',' << r.sign << ',' << r.outcome << ',' << r.stream_id << '\n';
  }
}

std::vector<ShotRecord> read_shot_records_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_shot_records_csv: cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<ShotRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ShotRecord r;
    unsigned long long stream = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%d,%llu", &r.variant, &r.sign, &r.outcome, &stream) != 4) {
      throw std::runtime_error("read_shot_records_csv: malformed line: " + line);
    }
    r.stream_id = stream;
    records.push_back(r);
  }
  return records;
}

nlohmann::json plan_to_json(const QpdPlan& plan) {
  return {{"n", plan.num_qubits()},
          {"fidelity", plan.fidelity()},
          {"ensemble", ensemble_to_json(plan.ensemble())},
          {"channel", channel_to_json(plan.channel())}};
}

QpdPlan plan_from_json(const nlohmann::json& j) {
  return build_plan(channel_from_json(j.at("channel")), ensemble_from_json(j.at("ensemble")),
                    j.at("fidelity").get<double>());
}

}  // namespace qpdwire
