#include "qpdwire/ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include "qpdwire/pauli.hpp"

namespace qpdwire {

namespace {

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

// Matches m against +-P_b for all non-identity classes; returns the class
// index or -1, with the sign in *sign_out.
int match_pauli_class(int n, const Matrix& m, int* sign_out) {
  const auto& basis = pauli_basis(n);
  for (std::size_t b = 1; b < basis.size(); ++b) {
    if (max_abs_diff(m, basis[b]) < 1e-8) {
      *sign_out = 1;
      return static_cast<int>(b);
    }
    if (max_abs_diff(m, Matrix(-basis[b])) < 1e-8) {
      *sign_out = -1;
      return static_cast<int>(b);
    }
  }
  return -1;
}

}  // namespace

std::string to_string(EnsembleLabel label) {
  switch (label) {
    case EnsembleLabel::two_design: return "two_design";
    case EnsembleLabel::pauli_mixing: return "pauli_mixing";
    case EnsembleLabel::trivial: return "trivial";
    default: return "custom";
  }
}

EnsembleLabel ensemble_label_from_string(const std::string& s) {
  if (s == "two_design") return EnsembleLabel::two_design;
  if (s == "pauli_mixing") return EnsembleLabel::pauli_mixing;
  if (s == "trivial") return EnsembleLabel::trivial;
  if (s == "custom") return EnsembleLabel::custom;
  throw std::invalid_argument("unknown ensemble label: " + s);
}

UnitaryEnsemble::UnitaryEnsemble(int num_qubits, std::vector<WeightedUnitary> items,
                                 EnsembleLabel label)
    : n_(num_qubits), items_(std::move(items)), label_(label) {
  if (items_.empty()) throw std::invalid_argument("UnitaryEnsemble: empty ensemble");
  const Eigen::Index d = Eigen::Index(1) << num_qubits;
  double total = 0.0;
  for (const auto& item : items_) {
    if (item.probability < 0.0) {
      throw std::invalid_argument("UnitaryEnsemble: negative probability");
    }
    total += item.probability;
    if (item.unitary.rows() != d || item.unitary.cols() != d || !is_unitary(item.unitary)) {
      throw std::invalid_argument("UnitaryEnsemble: item is not unitary of the right size");
    }
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("UnitaryEnsemble: probabilities do not sum to 1");
  }
}

UnitaryEnsemble UnitaryEnsemble::trivial(int num_qubits) {
  const Eigen::Index d = Eigen::Index(1) << num_qubits;
  return UnitaryEnsemble(num_qubits, {{1.0, Matrix::Identity(d, d)}}, EnsembleLabel::trivial);
}

UnitaryEnsemble UnitaryEnsemble::single_qubit_two_design() {
  const Matrix h = hadamard();
  const Matrix s = phase_gate();
  const std::vector<Matrix> left = {Matrix::Identity(2, 2), h * s, s * h};
  const auto& paulis = pauli_basis(1);
  const std::vector<Matrix> right = {paulis[0], paulis[1], paulis[3], paulis[2]};  // I, X, Y, Z
  std::vector<WeightedUnitary> items;
  items.reserve(12);
  for (const Matrix& a : left) {
    for (const Matrix& b : right) {
      items.push_back({1.0 / 12.0, a * b});
    }
  }
  return UnitaryEnsemble(1, std::move(items), EnsembleLabel::two_design);
}

UnitaryEnsemble UnitaryEnsemble::single_qubit_pauli_mixing() {
  const Matrix h = hadamard();
  const Matrix s = phase_gate();
  std::vector<WeightedUnitary> items = {
      {1.0 / 3.0, Matrix::Identity(2, 2)}, {1.0 / 3.0, h * s}, {1.0 / 3.0, s * h}};
  return UnitaryEnsemble(1, std::move(items), EnsembleLabel::pauli_mixing);
}

UnitaryEnsemble UnitaryEnsemble::pauli_group(int num_qubits) {
  const auto& basis = pauli_basis(num_qubits);
  std::vector<WeightedUnitary> items;
  items.reserve(basis.size());
  const double w = 1.0 / static_cast<double>(basis.size());
  for (const Matrix& p : basis) {
    items.push_back({w, p});
  }
  return UnitaryEnsemble(num_qubits, std::move(items), EnsembleLabel::custom);
}

Channel twirl(const Channel& c, const UnitaryEnsemble& e) {
  if (c.num_qubits() != e.num_qubits()) {
    throw std::invalid_argument("twirl: channel and ensemble dimensions differ");
  }
  const Eigen::Index d2 = c.superoperator().rows();
  Matrix acc = Matrix::Zero(d2, d2);
  for (const auto& item : e.items()) {
    const Matrix pre = kron(item.unitary.conjugate(), item.unitary);
    const Matrix post = kron(item.unitary.transpose(), Matrix(item.unitary.adjoint()));
    acc += item.probability * (post * c.superoperator() * pre);
  }
  return Channel(c.num_qubits(), std::move(acc), false);
}

PauliMixingReport verify_pauli_mixing(const UnitaryEnsemble& e) {
  const int n = e.num_qubits();
  const std::size_t num_classes = std::size_t(1) << (2 * n);
  const auto& basis = pauli_basis(n);
  const double target = 1.0 / static_cast<double>(num_classes - 1);

  for (std::size_t a = 1; a < num_classes; ++a) {
    std::vector<double> out_prob(num_classes, 0.0);
    for (std::size_t i = 0; i < e.size(); ++i) {
      const Matrix& u = e.items()[i].unitary;
      const Matrix conj = u.adjoint() * basis[a] * u;
      int sign = 0;
      const int cls = match_pauli_class(n, conj, &sign);
      if (cls < 0) {
        return {false, "unitary " + std::to_string(i) + " does not normalize the Pauli group on class " +
                           std::to_string(a)};
      }
      out_prob[static_cast<std::size_t>(cls)] += e.items()[i].probability;
    }
    for (std::size_t b = 1; b < num_classes; ++b) {
      if (std::abs(out_prob[b] - target) > 1e-9) {
        return {false, "class " + std::to_string(a) + " maps to class " + std::to_string(b) +
                           " with probability " + std::to_string(out_prob[b]) + " (expected " +
                           std::to_string(target) + ")"};
      }
    }
  }
  return {true, ""};
}

nlohmann::json ensemble_to_json(const UnitaryEnsemble& e) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : e.items()) {
    nlohmann::json data = nlohmann::json::array();
    for (Eigen::Index i = 0; i < item.unitary.rows(); ++i) {
      for (Eigen::Index j = 0; j < item.unitary.cols(); ++j) {
        data.push_back({item.unitary(i, j).real(), item.unitary(i, j).imag()});
      }
    }
    items.push_back({{"p", item.probability}, {"matrix", data}});
  }
  return {{"n", e.num_qubits()}, {"label", to_string(e.label())}, {"items", items}};
}

UnitaryEnsemble ensemble_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const Eigen::Index d = Eigen::Index(1) << n;
  std::vector<WeightedUnitary> items;
  for (const auto& item : j.at("items")) {
    const auto& data = item.at("matrix");
    if (static_cast<Eigen::Index>(data.size()) != d * d) {
      throw std::invalid_argument("ensemble_from_json: wrong matrix length");
    }
    Matrix u(d, d);
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) {
        const auto& pair = data[static_cast<std::size_t>(k++)];
        u(r, c) = Complex(pair[0].get<double>(), pair[1].get<double>());
      }
    }
    items.push_back({item.at("p").get<double>(), std::move(u)});
  }
  return UnitaryEnsemble(n, std::move(items), ensemble_label_from_string(j.at("label").get<std::string>()));
}

}  // namespace qpdwire
