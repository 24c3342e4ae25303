#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "qpdwire/density.hpp"
#include "qpdwire/linalg.hpp"

namespace qpdwire {

// CPTP map on n qubits. The canonical internal representation is the
// superoperator in column-stacking convention; Kraus, chi and Choi forms are
// derived views. Channels are immutable after validation and all query
// operations are safe for concurrent use.
class Channel {
 public:
  /// Wraps a 4^n x 4^n superoperator; validates CPTP unless told otherwise.
  Channel(int num_qubits, Matrix superop, bool validate = true);

  static Channel identity(int num_qubits);
  static Channel from_unitary(const Matrix& u);
  static Channel from_kraus(int num_qubits, const std::vector<Matrix>& kraus);
  static Channel from_chi(int num_qubits, const Matrix& chi);
  /// Pauli channel from a probability vector over the 4^n classes.
  static Channel from_pauli_probs(int num_qubits, const std::vector<double>& probs);
  static Channel depolarizing(int num_qubits, double p);

  int num_qubits() const { return n_; }
  Eigen::Index dim() const { return Eigen::Index(1) << n_; }
  const Matrix& superoperator() const { return super_; }

  Matrix chi() const;
  /// Choi state (I (x) C)(Phi_n), trace one, input factor on high bits.
  Matrix choi() const;
  /// Kraus operators from the Choi eigen-decomposition; eigenvalues below
  /// 1e-12 are discarded.
  std::vector<Matrix> kraus() const;
  /// Diagonal of the chi matrix.
  std::vector<double> pauli_probs() const;

  Matrix apply_matrix(const Matrix& rho) const;
  DensityMatrix apply(const DensityMatrix& rho) const;

  /// this after inner: (this o inner)(rho) = this(inner(rho)).
  Channel compose(const Channel& inner) const;

 private:
  int n_;
  Matrix super_;
  // Set when the channel was built from a chi matrix, so chi() reproduces
  // the construction input exactly.
  std::optional<Matrix> chi_cache_;
};

/// F(C) = <Phi|(I (x) C)(Phi)|Phi>; equals chi_00.
double entanglement_fidelity(const Channel& c);

/// Sum of |chi_ij| over i != j; zero exactly for Pauli channels.
double coherent_offdiag_sum(const Channel& c);

/// Choi state as a validated density matrix on 2n qubits.
DensityMatrix choi_state(const Channel& c);

/// Pauli transfer matrix R_ij = tr[P_i C(P_j)] / 2^n.
RealMatrix pauli_transfer_matrix(const Channel& c);

/// Numerical rank of the PTM (singular values above 1e-9).
int ptm_rank(const Channel& c);

/// Applies c to the low-order factor of a 2n-qubit matrix: (I (x) c)(rho).
Matrix apply_to_second_factor(const Channel& c, const Matrix& rho);

/// Sampled lower bound on the diamond distance: max trace distance of
/// (I (x) c1) and (I (x) c2) outputs over random pure inputs with ancilla.
double diamond_lower_bound(const Channel& c1, const Channel& c2, int num_samples,
                           std::mt19937_64& g);

/// JSON form {n, representation:"chi", data: row-major [re, im] pairs}.
nlohmann::json channel_to_json(const Channel& c);
Channel channel_from_json(const nlohmann::json& j);

}  // namespace qpdwire
