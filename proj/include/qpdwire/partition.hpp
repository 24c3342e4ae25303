#pragma once

#include <cstdint>
#include <vector>

#include "qpdwire/pauli.hpp"

namespace qpdwire {

// Partition of the 4^n - 1 non-identity Pauli classes into 2^n + 1 disjoint
// maximally commuting sets S_j, together with unitaries V_j that map the
// diagonal operators Z_a onto the members of S_j up to a sign:
//
//   s_{j,a} * V_j Z_a V_j^dag  is an element of S_j   for every a != 0.
struct CommutingPartition {
  int n = 0;
  // sets[j] holds Pauli class indices, each of size 2^n - 1, sorted.
  std::vector<std::vector<std::uint32_t>> sets;
  std::vector<Matrix> diagonalizers;
  // z_images[j][a-1] = (pauli class index, sign) for Z_a, a = 1 .. 2^n - 1.
  std::vector<std::vector<std::pair<std::uint32_t, int>>> z_images;

  int sign(int set_index, std::uint32_t z_index) const {
    return z_images[static_cast<std::size_t>(set_index)][z_index - 1].second;
  }
};

/// Builds the partition and diagonalizers for n in {1, 2, 3}. For n = 1 the
/// result is exactly sets {Z}, {X}, {Y} with V = {I, H, SH}; larger n use a
/// deterministic exact-cover search with lexicographic tie-breaking.
CommutingPartition commuting_partition(int num_qubits);

}  // namespace qpdwire
