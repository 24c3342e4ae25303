#pragma once

#include <cstdint>
#include <random>

#include "qpdwire/linalg.hpp"
#include "qpdwire/pauli.hpp"

namespace qpdwire {

/// Validated n-qubit density matrix: Hermitian, unit trace, PSD within
/// tolerance. Immutable after construction.
class DensityMatrix {
 public:
  DensityMatrix(int num_qubits, Matrix mat);

  static DensityMatrix pure(const Vector& psi);
  static DensityMatrix basis_state(int num_qubits, std::uint32_t k);
  static DensityMatrix maximally_mixed(int num_qubits);

  int num_qubits() const { return n_; }
  Eigen::Index dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }

  double expectation(const PauliOperator& observable) const;
  double purity() const;

 private:
  int n_;
  Matrix mat_;
};

/// |Phi_n> = 2^(-n/2) sum_k |k>|k> on 2n qubits; first factor on high bits.
Vector bell_vector(int num_qubits);
DensityMatrix bell_state(int num_qubits);

struct MaxEntangledState {
  int n;
  DensityMatrix state;
  static MaxEntangledState make(int num_qubits);
};

DensityMatrix haar_random_state(int num_qubits, std::mt19937_64& g);

/// Trace distance ||a - b||_1, bounded by [0, 2].
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double trace_norm(const Matrix& m);

}  // namespace qpdwire
