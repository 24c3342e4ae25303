#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "qpdwire/linalg.hpp"

namespace qpdwire::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds a seed and a list of stream coordinates into one 64-bit key.
inline std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
  std::uint64_t state = seed;
  std::uint64_t key = splitmix64(state);
  for (std::uint64_t id : ids) {
    state ^= id;
    key ^= splitmix64(state);
  }
  return key;
}

/// Independent generator for the stream identified by (seed, ids...).
inline std::mt19937_64 stream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
  return std::mt19937_64(derive_key(seed, ids));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double canonical(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(std::mt19937_64& g, double p) { return canonical(g) < p; }

/// Samples an index from an (unnormalized-tolerant) probability vector.
std::size_t sample_index(std::mt19937_64& g, const std::vector<double>& probs);

/// Haar-random pure state on n qubits: normalized complex Gaussian vector.
Vector haar_state_vector(int num_qubits, std::mt19937_64& g);

/// Uniform point on the 2-simplex via sorted-uniform gaps.
std::array<double, 3> uniform_simplex3(std::mt19937_64& g);

/// Uniform direction on the unit sphere via normalized Gaussian draws.
std::array<double, 3> uniform_sphere(std::mt19937_64& g);

}  // namespace qpdwire::rng
