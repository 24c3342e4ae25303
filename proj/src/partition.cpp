#include "qpdwire/partition.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <stdexcept>

namespace qpdwire {

namespace {

int parity(std::uint32_t bits) { return std::popcount(bits) & 1; }

// Symplectic product of class indices: 0 iff the classes commute.
int symplectic(int n, std::uint32_t a, std::uint32_t b) {
  const std::uint32_t mask = (1u << n) - 1;
  const std::uint32_t xa = a & mask, za = a >> n;
  const std::uint32_t xb = b & mask, zb = b >> n;
  return (parity(xa & zb) + parity(za & xb)) & 1;
}

// All maximal abelian subgroups of the Pauli class group, each returned as a
// sorted vector of its 2^n - 1 non-identity class indices.
std::vector<std::vector<std::uint32_t>> maximal_commuting_sets(int n) {
  const std::uint32_t num_classes = 1u << (2 * n);
  std::set<std::vector<std::uint32_t>> unique_sets;

  // Spans of k = n pairwise-commuting independent classes. Closure of the
  // span keeps the subgroup abelian and of full isotropic dimension.
  std::vector<std::uint32_t> generators;
  auto span_of = [&](const std::vector<std::uint32_t>& gens) {
    std::vector<std::uint32_t> members;
    const std::uint32_t count = 1u << gens.size();
    for (std::uint32_t pick = 1; pick < count; ++pick) {
      std::uint32_t acc = 0;
      for (std::size_t i = 0; i < gens.size(); ++i) {
        if ((pick >> i) & 1) acc ^= gens[i];
      }
      members.push_back(acc);
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    return members;
  };

  std::vector<std::uint32_t> stack;
  auto extend = [&](auto&& self, std::uint32_t start) -> void {
    if (static_cast<int>(stack.size()) == n) {
      auto members = span_of(stack);
      if (members.size() == (1u << n) - 1) unique_sets.insert(std::move(members));
      return;
    }
    for (std::uint32_t cand = start; cand < num_classes; ++cand) {
      bool ok = true;
      for (std::uint32_t g : stack) {
        if (symplectic(n, g, cand) != 0) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      // Independence: candidate must not lie in the current span.
      auto members = span_of(stack);
      if (std::binary_search(members.begin(), members.end(), cand)) continue;
      stack.push_back(cand);
      self(self, cand + 1);
      stack.pop_back();
    }
  };
  extend(extend, 1);

  return {unique_sets.begin(), unique_sets.end()};
}

// Exact cover of all non-identity classes by 2^n + 1 candidate sets,
// lexicographic depth-first search so the result is reproducible.
std::vector<std::vector<std::uint32_t>> exact_cover(int n) {
  const auto candidates = maximal_commuting_sets(n);
  const std::uint32_t num_classes = 1u << (2 * n);
  std::vector<bool> covered(num_classes, false);
  covered[0] = true;
  std::vector<std::vector<std::uint32_t>> chosen;

  auto search = [&](auto&& self) -> bool {
    std::uint32_t lowest = 0;
    while (lowest < num_classes && covered[lowest]) ++lowest;
    if (lowest == num_classes) return true;
    for (const auto& cand : candidates) {
      if (cand.front() != lowest) continue;  // sets are sorted; pivot on the lowest gap
      bool disjoint = true;
      for (std::uint32_t m : cand) {
        if (covered[m]) {
          disjoint = false;
          break;
        }
      }
      if (!disjoint) continue;
      for (std::uint32_t m : cand) covered[m] = true;
      chosen.push_back(cand);
      if (self(self)) return true;
      chosen.pop_back();
      for (std::uint32_t m : cand) covered[m] = false;
    }
    return false;
  };
  if (!search(search)) {
    throw std::runtime_error("commuting_partition: exact cover search failed");
  }
  return chosen;
}

// n independent generators of the abelian group spanned by a set.
std::vector<std::uint32_t> independent_generators(int n, const std::vector<std::uint32_t>& set) {
  std::vector<std::uint32_t> gens;
  std::vector<std::uint32_t> basis;  // row-reduced F_2 vectors
  for (std::uint32_t m : set) {
    std::uint32_t v = m;
    for (std::uint32_t b : basis) {
      v = std::min(v, v ^ b);
    }
    if (v != 0) {
      basis.push_back(v);
      gens.push_back(m);
      if (static_cast<int>(gens.size()) == n) break;
    }
  }
  if (static_cast<int>(gens.size()) != n) {
    throw std::runtime_error("commuting_partition: generator extraction failed");
  }
  return gens;
}

// Joint eigenbasis of a commuting set, columns ordered so that the i-th
// generator acts as Z on bit i of the column index.
Matrix diagonalizer_for_set(int n, const std::vector<std::uint32_t>& set) {
  const Eigen::Index dim = Eigen::Index(1) << n;
  const auto gens = independent_generators(n, set);

  // Weighted sum with weights 3^i has 2^n distinct eigenvalues because
  // distinct +-1 patterns over powers of three give distinct sums.
  Matrix weighted = Matrix::Zero(dim, dim);
  double w = 1.0;
  for (std::uint32_t m : set) {
    weighted += w * PauliOperator::from_index(n, m).matrix();
    w *= 3.0;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(weighted);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("commuting_partition: eigen-decomposition failed");
  }

  std::vector<Matrix> gen_matrices;
  gen_matrices.reserve(gens.size());
  for (std::uint32_t g : gens) gen_matrices.push_back(PauliOperator::from_index(n, g).matrix());

  Matrix v = Matrix::Zero(dim, dim);
  std::vector<bool> filled(static_cast<std::size_t>(dim), false);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const Vector u = solver.eigenvectors().col(col);
    Eigen::Index slot = 0;
    for (std::size_t i = 0; i < gen_matrices.size(); ++i) {
      const Complex sigma = (u.adjoint() * gen_matrices[i] * u)(0, 0);
      if (std::abs(std::abs(sigma.real()) - 1.0) > 1e-8 || std::abs(sigma.imag()) > 1e-8) {
        throw std::runtime_error("commuting_partition: degenerate joint eigenvector");
      }
      if (sigma.real() < 0.0) slot |= Eigen::Index(1) << i;
    }
    if (filled[static_cast<std::size_t>(slot)]) {
      throw std::runtime_error("commuting_partition: duplicate eigenvalue pattern");
    }
    filled[static_cast<std::size_t>(slot)] = true;
    v.col(slot) = u;
  }
  return v;
}

Matrix hadamard() {
  Matrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

Matrix phase_gate() {
  Matrix s(2, 2);
  s << 1, 0, 0, Complex(0, 1);
  return s;
}

}  // namespace

CommutingPartition commuting_partition(int num_qubits) {
  if (num_qubits < 1 || num_qubits > 3) {
    throw std::invalid_argument("commuting_partition: supported range is 1 <= n <= 3");
  }

  CommutingPartition part;
  part.n = num_qubits;

  if (num_qubits == 1) {
    // Z, X, Y diagonalized by I, H, SH.
    part.sets = {{2u}, {1u}, {3u}};
    part.diagonalizers = {Matrix::Identity(2, 2), hadamard(), phase_gate() * hadamard()};
  } else {
    part.sets = exact_cover(num_qubits);
    part.diagonalizers.reserve(part.sets.size());
    for (const auto& set : part.sets) {
      part.diagonalizers.push_back(diagonalizer_for_set(num_qubits, set));
    }
  }

  // Recover the sign map by matching V_j Z_a V_j^dag against set members.
  const int n = num_qubits;
  const std::uint32_t z_count = 1u << n;
  part.z_images.resize(part.sets.size());
  for (std::size_t j = 0; j < part.sets.size(); ++j) {
    const Matrix& v = part.diagonalizers[j];
    for (std::uint32_t a = 1; a < z_count; ++a) {
      const Matrix conj = v * PauliOperator(n, 0, a, 0).matrix() * v.adjoint();
      bool found = false;
      for (std::uint32_t member : part.sets[j]) {
        const Matrix p = PauliOperator::from_index(n, member).matrix();
        if (max_abs_diff(conj, p) < 1e-8) {
          part.z_images[j].emplace_back(member, 1);
          found = true;
          break;
        }
        if (max_abs_diff(conj, Matrix(-p)) < 1e-8) {
          part.z_images[j].emplace_back(member, -1);
          found = true;
          break;
        }
      }
      if (!found) {
        throw std::runtime_error("commuting_partition: sign recovery found no match");
      }
    }
  }
  return part;
}

}  // namespace qpdwire
