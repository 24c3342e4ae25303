#include "qpdwire/pauli.hpp"

#include <bit>
#include <mutex>
#include <stdexcept>

namespace qpdwire {

namespace {

constexpr int kMaxQubits = 16;

const Complex kI(0.0, 1.0);

Complex phase_factor(int k) {
  switch (k & 3) {
    case 0: return Complex(1.0, 0.0);
    case 1: return Complex(0.0, 1.0);
    case 2: return Complex(-1.0, 0.0);
    default: return Complex(0.0, -1.0);
  }
}

Matrix single_qubit_xz(bool x, bool z) {
  Matrix m(2, 2);
  if (!x && !z) {
    m << 1, 0, 0, 1;
  } else if (x && !z) {
    m << 0, 1, 1, 0;
  } else if (!x && z) {
    m << 1, 0, 0, -1;
  } else {
    // X * Z
    m << 0, -1, 1, 0;
  }
  return m;
}

int parity(std::uint32_t bits) { return std::popcount(bits) & 1; }

}  // namespace

PauliOperator::PauliOperator(int num_qubits, std::uint32_t x_bits, std::uint32_t z_bits,
                             int phase_k)
    : n_(num_qubits), x_(x_bits), z_(z_bits), phase_(((phase_k % 4) + 4) % 4) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw std::invalid_argument("PauliOperator: unsupported qubit count");
  }
  const std::uint32_t mask = (num_qubits == 32) ? ~0u : ((1u << num_qubits) - 1);
  if ((x_bits & ~mask) != 0 || (z_bits & ~mask) != 0) {
    throw std::invalid_argument("PauliOperator: bit vector exceeds qubit count");
  }
}

PauliOperator PauliOperator::from_index(int num_qubits, std::uint32_t index) {
  if (index >= (1u << (2 * num_qubits))) {
    throw std::invalid_argument("PauliOperator::from_index: index out of range");
  }
  const std::uint32_t mask = (1u << num_qubits) - 1;
  const std::uint32_t x = index & mask;
  const std::uint32_t z = index >> num_qubits;
  return PauliOperator(num_qubits, x, z, std::popcount(x & z) % 4);
}

PauliOperator PauliOperator::identity(int num_qubits) {
  return PauliOperator(num_qubits, 0, 0, 0);
}

PauliOperator PauliOperator::from_label(const std::string& label) {
  if (label.empty()) throw std::invalid_argument("PauliOperator::from_label: empty label");
  std::uint32_t x = 0, z = 0;
  for (std::size_t i = 0; i < label.size(); ++i) {
    switch (label[i]) {
      case 'I': break;
      case 'X': x |= 1u << i; break;
      case 'Z': z |= 1u << i; break;
      case 'Y': x |= 1u << i; z |= 1u << i; break;
      default:
        throw std::invalid_argument("PauliOperator::from_label: bad character in '" + label + "'");
    }
  }
  const int n = static_cast<int>(label.size());
  return PauliOperator(n, x, z, std::popcount(x & z) % 4);
}

bool PauliOperator::is_hermitian() const {
  // (i^k X_x Z_z)^dag = i^(-k) (-1)^(x.z) X_x Z_z
  return ((phase_ + parity(x_ & z_)) & 1) == 0;
}

bool PauliOperator::commutes_with(const PauliOperator& other) const {
  if (n_ != other.n_) throw std::invalid_argument("commutes_with: dimension mismatch");
  return ((parity(x_ & other.z_) + parity(z_ & other.x_)) & 1) == 0;
}

PauliOperator PauliOperator::adjoint() const {
  return PauliOperator(n_, x_, z_, -phase_ + 2 * parity(x_ & z_));
}

Matrix PauliOperator::matrix() const {
  Matrix m = Matrix::Identity(1, 1);
  for (int i = n_ - 1; i >= 0; --i) {
    m = kron(m, single_qubit_xz((x_ >> i) & 1, (z_ >> i) & 1));
  }
  return phase_factor(phase_) * m;
}

std::string PauliOperator::label() const {
  static const char kNames[] = {'I', 'X', 'Z', 'Y'};
  std::string s(static_cast<std::size_t>(n_), 'I');
  for (int i = 0; i < n_; ++i) {
    s[static_cast<std::size_t>(i)] = kNames[((x_ >> i) & 1) | (((z_ >> i) & 1) << 1)];
  }
  return s;
}

PauliOperator pauli_product(const PauliOperator& p, const PauliOperator& q) {
  if (p.num_qubits() != q.num_qubits()) {
    throw std::invalid_argument("pauli_product: dimension mismatch");
  }
  // Z_z X_x' = (-1)^(z.x') X_x' Z_z, so moving q's X block left picks up
  // phase i^(2 * (z_p . x_q)).
  const int k = p.phase_k() + q.phase_k() + 2 * parity(p.z_bits() & q.x_bits());
  return PauliOperator(p.num_qubits(), p.x_bits() ^ q.x_bits(), p.z_bits() ^ q.z_bits(), k);
}

PauliOperator pauli_conjugate(const PauliOperator& p, const PauliOperator& q) {
  return pauli_product(pauli_product(p, q), p.adjoint());
}

Complex hs_inner(const PauliOperator& p, const PauliOperator& q) {
  if (p.num_qubits() != q.num_qubits()) {
    throw std::invalid_argument("hs_inner: dimension mismatch");
  }
  const PauliOperator prod = pauli_product(p.adjoint(), q);
  if (!prod.is_identity_class()) return Complex(0.0, 0.0);
  const double dim = static_cast<double>(1u << p.num_qubits());
  return phase_factor(prod.phase_k()) * dim;
}

const std::vector<Matrix>& pauli_basis(int num_qubits) {
  if (num_qubits < 1 || num_qubits > 6) {
    throw std::invalid_argument("pauli_basis: unsupported qubit count");
  }
  static std::vector<Matrix> cache[7];
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto& basis = cache[num_qubits];
  if (basis.empty()) {
    const std::uint32_t count = 1u << (2 * num_qubits);
    basis.reserve(count);
    for (std::uint32_t a = 0; a < count; ++a) {
      basis.push_back(PauliOperator::from_index(num_qubits, a).matrix());
    }
  }
  return basis;
}

namespace {

int qubits_from_dim(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index(1) << n) < dim) ++n;
  if ((Eigen::Index(1) << n) != dim) {
    throw std::invalid_argument("matrix dimension is not a power of two");
  }
  return n;
}

}  // namespace

Matrix full_pauli_average(const Matrix& rho) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("full_pauli_average: not square");
  const int n = qubits_from_dim(rho.rows());
  const auto& basis = pauli_basis(n);
  Matrix acc = Matrix::Zero(rho.rows(), rho.cols());
  for (const Matrix& p : basis) {
    acc += p * rho * p;
  }
  return acc / static_cast<double>(basis.size());
}

Matrix z_average(const Matrix& rho) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("z_average: not square");
  const int n = qubits_from_dim(rho.rows());
  const std::uint32_t count = 1u << n;
  Matrix acc = Matrix::Zero(rho.rows(), rho.cols());
  for (std::uint32_t a = 0; a < count; ++a) {
    const Matrix z = PauliOperator(n, 0, a, 0).matrix();
    acc += z * rho * z;
  }
  return acc / static_cast<double>(count);
}

}  // namespace qpdwire
