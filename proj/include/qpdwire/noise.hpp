#pragma once

#include <array>
#include <random>

#include "json.hpp"
#include "qpdwire/channel.hpp"

namespace qpdwire {

/// Single-qubit noise model combining a Pauli error channel with a coherent
/// rotation: C = U o P, with P(rho) = (1-q) rho + q (px X rho X + py Y rho Y
/// + pz Z rho Z) and U = exp(-i theta (axis . sigma) / 2).
struct NoiseModelParams {
  double q = 0.0;
  double px = 1.0, py = 0.0, pz = 0.0;
  double theta = 0.0;
  std::array<double, 3> axis = {1.0, 0.0, 0.0};
};

void validate(const NoiseModelParams& params);

Channel combes_channel(const NoiseModelParams& params);

/// Closed-form entanglement fidelity of the model:
/// (1-q) cos^2(theta/2) + q (px nx^2 + py ny^2 + pz nz^2) sin^2(theta/2).
double combes_fidelity(const NoiseModelParams& params);

struct TargetedChannel {
  Channel channel;
  NoiseModelParams params;
};

/// Draws (px, py, pz) uniformly on the simplex and the axis uniformly on the
/// sphere, then solves the fidelity formula for q. Retries with fresh draws
/// when q falls outside [0, 1]; throws after max_retries with draw statistics.
TargetedChannel random_channel_targeting(double f_target, double theta_target,
                                         std::mt19937_64& g, int max_retries = 1000);

/// Shared state on 2n qubits used as a teleportation resource.
struct ResourceState {
  int n;
  DensityMatrix rho;
};

/// Teleportation through the resource: the Pauli channel with probability
/// vector <Phi^a| rho |Phi^a>, Phi^a = (P_a (x) I)|Phi_n>. Its entanglement
/// fidelity equals the resource state's overlap with Phi_n.
Channel teleportation_channel(const ResourceState& resource);

/// Bell overlaps of a 2n-qubit state with all 4^n Pauli-shifted Bell states.
std::vector<double> bell_overlaps(const DensityMatrix& rho);

/// Applies k noisy SWAP rounds to the two-qubit maximally entangled state:
/// each round is an ideal SWAP followed by two-qubit depolarizing noise that
/// replaces the state with the maximally mixed one with probability
/// per_swap_noise. Deterministic; Bell fidelity is non-increasing in k.
ResourceState swap_degraded_resource(int k, double per_swap_noise);

nlohmann::json noise_params_to_json(const NoiseModelParams& p);
NoiseModelParams noise_params_from_json(const nlohmann::json& j);

}  // namespace qpdwire
