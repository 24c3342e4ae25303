#include "qpdwire/density.hpp"

#include <cmath>
#include <stdexcept>

#include "qpdwire/rng.hpp"

namespace qpdwire {

namespace {

constexpr double kHermTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kEigTol = 1e-10;

}  // namespace

DensityMatrix::DensityMatrix(int num_qubits, Matrix mat) : n_(num_qubits), mat_(std::move(mat)) {
  const Eigen::Index dim = Eigen::Index(1) << num_qubits;
  if (mat_.rows() != dim || mat_.cols() != dim) {
    throw std::invalid_argument("DensityMatrix: dimension does not match qubit count");
  }
  if (!is_hermitian_matrix(mat_, kHermTol)) {
    throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
  }
  if (std::abs(mat_.trace().real() - 1.0) > kTraceTol || std::abs(mat_.trace().imag()) > kTraceTol) {
    throw std::invalid_argument("DensityMatrix: trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(mat_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kEigTol) {
    throw std::invalid_argument("DensityMatrix: matrix is not positive semidefinite");
  }
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  Eigen::Index dim = psi.size();
  int n = 0;
  while ((Eigen::Index(1) << n) < dim) ++n;
  if ((Eigen::Index(1) << n) != dim) {
    throw std::invalid_argument("DensityMatrix::pure: dimension is not a power of two");
  }
  if (std::abs(psi.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("DensityMatrix::pure: state vector is not normalized");
  }
  return DensityMatrix(n, psi * psi.adjoint());
}

DensityMatrix DensityMatrix::basis_state(int num_qubits, std::uint32_t k) {
  const Eigen::Index dim = Eigen::Index(1) << num_qubits;
  if (k >= static_cast<std::uint32_t>(dim)) {
    throw std::invalid_argument("DensityMatrix::basis_state: index out of range");
  }
  Vector psi = Vector::Zero(dim);
  psi(k) = 1.0;
  return pure(psi);
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
  const Eigen::Index dim = Eigen::Index(1) << num_qubits;
  return DensityMatrix(num_qubits, Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::expectation(const PauliOperator& observable) const {
  if (observable.num_qubits() != n_) {
    throw std::invalid_argument("expectation: observable dimension mismatch");
  }
  const Complex value = (observable.matrix() * mat_).trace();
  return value.real();
}

double DensityMatrix::purity() const { return (mat_ * mat_).trace().real(); }

Vector bell_vector(int num_qubits) {
  const Eigen::Index d = Eigen::Index(1) << num_qubits;
  Vector phi = Vector::Zero(d * d);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index k = 0; k < d; ++k) {
    phi(k * d + k) = amp;
  }
  return phi;
}

DensityMatrix bell_state(int num_qubits) { return DensityMatrix::pure(bell_vector(num_qubits)); }

MaxEntangledState MaxEntangledState::make(int num_qubits) {
  return MaxEntangledState{num_qubits, bell_state(num_qubits)};
}

DensityMatrix haar_random_state(int num_qubits, std::mt19937_64& g) {
  return DensityMatrix::pure(rng::haar_state_vector(num_qubits, g));
}

double trace_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return trace_norm(a.matrix() - b.matrix());
}

}  // namespace qpdwire
