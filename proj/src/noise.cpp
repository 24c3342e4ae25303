#include "qpdwire/noise.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qpdwire/pauli.hpp"
#include "qpdwire/rng.hpp"

namespace qpdwire {

void validate(const NoiseModelParams& p) {
  if (p.q < 0.0 || p.q > 1.0) throw std::invalid_argument("NoiseModelParams: q out of [0, 1]");
  if (p.px < 0.0 || p.py < 0.0 || p.pz < 0.0) {
    throw std::invalid_argument("NoiseModelParams: negative Pauli probability");
  }
  if (std::abs(p.px + p.py + p.pz - 1.0) > 1e-9) {
    throw std::invalid_argument("NoiseModelParams: Pauli probabilities do not sum to 1");
  }
  const double norm = std::sqrt(p.axis[0] * p.axis[0] + p.axis[1] * p.axis[1] + p.axis[2] * p.axis[2]);
  if (std::abs(norm - 1.0) > 1e-12) {
    throw std::invalid_argument("NoiseModelParams: axis is not a unit vector");
  }
}

Channel combes_channel(const NoiseModelParams& p) {
  validate(p);
  // Pauli part in index order I, X, Z, Y.
  const std::vector<double> probs = {1.0 - p.q, p.q * p.px, p.q * p.pz, p.q * p.py};
  const Channel pauli_part = Channel::from_pauli_probs(1, probs);

  const auto& basis = pauli_basis(1);
  const double c = std::cos(0.5 * p.theta);
  const double s = std::sin(0.5 * p.theta);
  const Complex minus_is(0.0, -s);
  const Matrix u = c * basis[0] + minus_is * (p.axis[0] * basis[1] + p.axis[1] * basis[3] +
                                              p.axis[2] * basis[2]);
  return Channel::from_unitary(u).compose(pauli_part);
}

double combes_fidelity(const NoiseModelParams& p) {
  const double c = std::cos(0.5 * p.theta);
  const double s = std::sin(0.5 * p.theta);
  const double w = p.px * p.axis[0] * p.axis[0] + p.py * p.axis[1] * p.axis[1] +
                   p.pz * p.axis[2] * p.axis[2];
  return (1.0 - p.q) * c * c + p.q * w * s * s;
}

TargetedChannel random_channel_targeting(double f_target, double theta_target,
                                         std::mt19937_64& g, int max_retries) {
  if (f_target < 0.0 || f_target > 1.0) {
    throw std::invalid_argument("random_channel_targeting: fidelity target out of [0, 1]");
  }
  const double c = std::cos(0.5 * theta_target);
  const double s = std::sin(0.5 * theta_target);
  int attempts = 0;
  double last_q = 0.0;
  for (; attempts < max_retries; ++attempts) {
    const auto simplex = rng::uniform_simplex3(g);
    const auto axis = rng::uniform_sphere(g);
    const double w = simplex[0] * axis[0] * axis[0] + simplex[1] * axis[1] * axis[1] +
                     simplex[2] * axis[2] * axis[2];
    // F = (1-q) c^2 + q w s^2, solved for q.
    const double denom = c * c - w * s * s;
    if (std::abs(denom) < 1e-12) continue;
    const double q = (c * c - f_target) / denom;
    last_q = q;
    if (q < 0.0 || q > 1.0) continue;
    NoiseModelParams params;
    params.q = q;
    params.px = simplex[0];
    params.py = simplex[1];
    params.pz = simplex[2];
    params.theta = theta_target;
    params.axis = axis;
    return {combes_channel(params), params};
  }
  std::ostringstream msg;
  msg << "random_channel_targeting: no admissible q in [0, 1] after " << attempts
      << " draws for F = " << f_target << ", theta = " << theta_target
      << " (last solved q = " << last_q << ")";
  throw std::runtime_error(msg.str());
}

std::vector<double> bell_overlaps(const DensityMatrix& rho) {
  if (rho.num_qubits() % 2 != 0) {
    throw std::invalid_argument("bell_overlaps: state must live on 2n qubits");
  }
  const int n = rho.num_qubits() / 2;
  const Vector phi = bell_vector(n);
  const auto& basis = pauli_basis(n);
  const Eigen::Index d = Eigen::Index(1) << n;
  const Matrix id = Matrix::Identity(d, d);
  std::vector<double> overlaps;
  overlaps.reserve(basis.size());
  for (const Matrix& p : basis) {
    const Vector shifted = kron(p, id) * phi;
    const Complex value = (shifted.adjoint() * rho.matrix() * shifted)(0, 0);
    overlaps.push_back(std::max(0.0, value.real()));
  }
  return overlaps;
}

Channel teleportation_channel(const ResourceState& resource) {
  if (resource.rho.num_qubits() != 2 * resource.n) {
    throw std::invalid_argument("teleportation_channel: resource state has wrong size");
  }
  return Channel::from_pauli_probs(resource.n, bell_overlaps(resource.rho));
}

ResourceState swap_degraded_resource(int k, double per_swap_noise) {
  if (k < 0) throw std::invalid_argument("swap_degraded_resource: k must be nonnegative");
  if (per_swap_noise < 0.0 || per_swap_noise > 1.0) {
    throw std::invalid_argument("swap_degraded_resource: noise out of [0, 1]");
  }
  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = 1, swap(1, 2) = 1, swap(2, 1) = 1, swap(3, 3) = 1;

  const Matrix mixed = Matrix::Identity(4, 4) / 4.0;
  Matrix state = bell_state(1).matrix();
  for (int step = 0; step < k; ++step) {
    state = swap * state * swap.adjoint();
    state = (1.0 - per_swap_noise) * state + per_swap_noise * mixed;
  }
  state = 0.5 * (state + Matrix(state.adjoint()));
  return {1, DensityMatrix(2, std::move(state))};
}

nlohmann::json noise_params_to_json(const NoiseModelParams& p) {
  return {{"q", p.q},       {"px", p.px},       {"py", p.py},
          {"pz", p.pz},     {"theta", p.theta}, {"axis", {p.axis[0], p.axis[1], p.axis[2]}}};
}

NoiseModelParams noise_params_from_json(const nlohmann::json& j) {
  NoiseModelParams p;
  p.q = j.at("q").get<double>();
  p.px = j.at("px").get<double>();
  p.py = j.at("py").get<double>();
  p.pz = j.at("pz").get<double>();
  p.theta = j.at("theta").get<double>();
  const auto& axis = j.at("axis");
  p.axis = {axis[0].get<double>(), axis[1].get<double>(), axis[2].get<double>()};
  validate(p);
  return p;
}

}  // namespace qpdwire
