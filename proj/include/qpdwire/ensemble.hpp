#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qpdwire/channel.hpp"

namespace qpdwire {

enum class EnsembleLabel { two_design, pauli_mixing, trivial, custom };

std::string to_string(EnsembleLabel label);
EnsembleLabel ensemble_label_from_string(const std::string& s);

struct WeightedUnitary {
  double probability;
  Matrix unitary;
};

/// Immutable list of (probability, unitary) pairs used for channel twirls.
class UnitaryEnsemble {
 public:
  UnitaryEnsemble(int num_qubits, std::vector<WeightedUnitary> items,
                  EnsembleLabel label = EnsembleLabel::custom);

  static UnitaryEnsemble trivial(int num_qubits);

  /// The 12-element single-qubit two-design {A B | A in {I, HS, SH},
  /// B in {I, X, Y, Z}} at weight 1/12.
  static UnitaryEnsemble single_qubit_two_design();

  /// The 3-element single-qubit Pauli-mixing ensemble {I, HS, SH} at 1/3.
  static UnitaryEnsemble single_qubit_pauli_mixing();

  /// Uniform ensemble over all 4^n Hermitian Pauli representatives. Twirling
  /// with it removes the coherent chi components and fixes Pauli channels.
  static UnitaryEnsemble pauli_group(int num_qubits);

  int num_qubits() const { return n_; }
  std::size_t size() const { return items_.size(); }
  const std::vector<WeightedUnitary>& items() const { return items_; }
  EnsembleLabel label() const { return label_; }

 private:
  int n_;
  std::vector<WeightedUnitary> items_;
  EnsembleLabel label_;
};

/// Ensemble channel twirl: rho -> sum_i p_i U_i^dag C(U_i rho U_i^dag) U_i.
/// Summation order is fixed by the item order, so results are reproducible.
Channel twirl(const Channel& c, const UnitaryEnsemble& e);

struct PauliMixingReport {
  bool is_pauli_mixing = false;
  std::string detail;
};

/// Checks that every ensemble unitary normalizes the Pauli group and that
/// conjugation maps each non-identity class to the uniform distribution over
/// the non-identity classes. Reports the first violation found.
PauliMixingReport verify_pauli_mixing(const UnitaryEnsemble& e);

nlohmann::json ensemble_to_json(const UnitaryEnsemble& e);
UnitaryEnsemble ensemble_from_json(const nlohmann::json& j);

}  // namespace qpdwire
