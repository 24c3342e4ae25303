#include "qpdwire/calibration.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qpdwire/rng.hpp"

namespace qpdwire {

namespace {

constexpr std::uint64_t kCalibStreamTag = 0x63616cULL;

// P(all zeros | ensemble item i) for the twirled circuit around channel c.
std::vector<double> survival_probabilities(const Channel& c, const UnitaryEnsemble& e) {
  const Eigen::Index d = c.dim();
  Matrix zero = Matrix::Zero(d, d);
  zero(0, 0) = 1.0;
  std::vector<double> p00;
  p00.reserve(e.size());
  for (const auto& item : e.items()) {
    const Matrix in = item.unitary * zero * item.unitary.adjoint();
    const Matrix out = item.unitary.adjoint() * c.apply_matrix(in) * item.unitary;
    p00.push_back(std::clamp(out(0, 0).real(), 0.0, 1.0));
  }
  return p00;
}

double fidelity_from_p00(int n, double p00) {
  const double dim = static_cast<double>(Eigen::Index(1) << n);
  return (dim + 1.0) / dim * p00 - 1.0 / dim;
}

}  // namespace

CalibrationResult calibrate(const Channel& c, const UnitaryEnsemble& e, long long shots,
                            std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("calibrate: shots must be >= 1");
  if (c.num_qubits() != e.num_qubits()) {
    throw std::invalid_argument("calibrate: channel and ensemble dimensions differ");
  }
  const auto p00 = survival_probabilities(c, e);
  std::vector<double> weights;
  weights.reserve(e.size());
  for (const auto& item : e.items()) weights.push_back(item.probability);

  std::mt19937_64 gen = rng::stream(seed, {kCalibStreamTag});
  long long zeros = 0;
  for (long long s = 0; s < shots; ++s) {
    const std::size_t pick = rng::sample_index(gen, weights);
    if (rng::bernoulli(gen, p00[pick])) ++zeros;
  }

  CalibrationResult result;
  result.shots = shots;
  result.p00_hat = static_cast<double>(zeros) / static_cast<double>(shots);
  result.f_hat = fidelity_from_p00(c.num_qubits(), result.p00_hat);
  const double dim = static_cast<double>(c.dim());
  result.stderr_ = (dim + 1.0) / dim *
                   std::sqrt(result.p00_hat * (1.0 - result.p00_hat) / static_cast<double>(shots));
  result.ensemble_label = to_string(e.label());
  return result;
}

double calibrate_exact(const Channel& c, const UnitaryEnsemble& e) {
  if (c.num_qubits() != e.num_qubits()) {
    throw std::invalid_argument("calibrate_exact: channel and ensemble dimensions differ");
  }
  const auto p00 = survival_probabilities(c, e);
  double mean = 0.0;
  for (std::size_t i = 0; i < p00.size(); ++i) {
    mean += e.items()[i].probability * p00[i];
  }
  return fidelity_from_p00(c.num_qubits(), mean);
}

nlohmann::json calibration_to_json(const CalibrationResult& r) {
  return {{"p00_hat", r.p00_hat},
          {"f_hat", r.f_hat},
          {"shots", r.shots},
          {"stderr", r.stderr_},
          {"ensemble_label", r.ensemble_label}};
}

std::string calibration_csv_header() { return "F_hat,stderr,shots,ensemble_label"; }

std::string calibration_csv_row(const CalibrationResult& r) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", r.f_hat);
  out << buf << ',';
  std::snprintf(buf, sizeof(buf), "%.17g", r.stderr_);
  out << buf << ',' << r.shots << ',' << r.ensemble_label;
  return out.str();
}

}  // namespace qpdwire
