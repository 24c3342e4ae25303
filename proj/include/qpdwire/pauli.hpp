#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpdwire/linalg.hpp"

namespace qpdwire {

// Phase-tracked n-qubit Pauli operator i^k * X_x Z_z, with x and z binary
// vectors stored as bit masks (bit i = qubit i).
//
// Index convention, fixed globally: a Pauli class is addressed by the integer
// a = x + 2^n * z, i.e. the concatenated binary vector (x, z) read
// little-endian. For one qubit the class order is therefore I, X, Z, Y.
// Chi matrices, Pauli probability vectors and transfer matrices all use this
// ordering.
class PauliOperator {
 public:
  PauliOperator(int num_qubits, std::uint32_t x_bits, std::uint32_t z_bits, int phase_k);

  /// Canonical Hermitian representative of class `index`: i^(x.z) X_x Z_z,
  /// the usual tensor product of I, X, Y, Z factors.
  static PauliOperator from_index(int num_qubits, std::uint32_t index);

  static PauliOperator identity(int num_qubits);

  /// Parses labels like "X", "ZZ", "IXY"; character i addresses qubit i.
  static PauliOperator from_label(const std::string& label);

  int num_qubits() const { return n_; }
  std::uint32_t x_bits() const { return x_; }
  std::uint32_t z_bits() const { return z_; }
  int phase_k() const { return phase_; }

  /// Class index a = x + 2^n z (phase discarded).
  std::uint32_t index() const { return x_ | (z_ << n_); }

  bool is_identity_class() const { return x_ == 0 && z_ == 0; }
  bool is_hermitian() const;
  bool commutes_with(const PauliOperator& other) const;

  PauliOperator adjoint() const;

  /// Dense matrix realization, dimension 2^n.
  Matrix matrix() const;

  std::string label() const;

  bool operator==(const PauliOperator& other) const {
    return n_ == other.n_ && x_ == other.x_ && z_ == other.z_ && phase_ == other.phase_;
  }

 private:
  int n_;
  std::uint32_t x_;
  std::uint32_t z_;
  int phase_;  // mod 4
};

/// Phase-exact product: matrix(result) == matrix(p) * matrix(q).
PauliOperator pauli_product(const PauliOperator& p, const PauliOperator& q);

/// p q p^dagger, phase-exact.
PauliOperator pauli_conjugate(const PauliOperator& p, const PauliOperator& q);

/// Hilbert-Schmidt inner product tr[p^dagger q], evaluated symbolically.
Complex hs_inner(const PauliOperator& p, const PauliOperator& q);

/// Cached canonical Hermitian matrices for all 4^n classes, index order.
const std::vector<Matrix>& pauli_basis(int num_qubits);

/// (1/4^n) sum_P P rho P over the full Pauli group; projects onto the identity.
Matrix full_pauli_average(const Matrix& rho);

/// (1/2^n) sum_a Z_a rho Z_a; keeps exactly the computational-basis diagonal.
Matrix z_average(const Matrix& rho);

}  // namespace qpdwire
