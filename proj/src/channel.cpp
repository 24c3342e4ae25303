#include "qpdwire/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "qpdwire/pauli.hpp"
#include "qpdwire/rng.hpp"

namespace qpdwire {

namespace {

constexpr double kChoiPsdTol = 1e-9;
constexpr double kTpTol = 1e-9;
constexpr double kKrausCutoff = 1e-12;
constexpr double kPtmRankTol = 1e-9;

// Reshuffle between superoperator (column stacking) and the trace-one Choi
// state with the input copy on the high-order bits:
//   choi[k*d + m, l*d + m'] = super[m + d*m', k + d*l] / d.
Matrix choi_from_super(const Matrix& super, Eigen::Index d) {
  Matrix choi(d * d, d * d);
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index m = 0; m < d; ++m) {
      for (Eigen::Index l = 0; l < d; ++l) {
        for (Eigen::Index mp = 0; mp < d; ++mp) {
          choi(k * d + m, l * d + mp) = super(m + d * mp, k + d * l) / static_cast<double>(d);
        }
      }
    }
  }
  return choi;
}

// Partial trace of the Choi state over the output (low-order) factor.
Matrix choi_trace_out_output(const Matrix& choi, Eigen::Index d) {
  Matrix reduced = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index l = 0; l < d; ++l) {
      Complex acc(0.0, 0.0);
      for (Eigen::Index m = 0; m < d; ++m) {
        acc += choi(k * d + m, l * d + m);
      }
      reduced(k, l) = acc;
    }
  }
  return reduced;
}

void validate_cptp(int n, const Matrix& super) {
  const Eigen::Index d = Eigen::Index(1) << n;
  if (super.rows() != d * d || super.cols() != d * d) {
    throw std::invalid_argument("Channel: superoperator dimension mismatch");
  }
  const Matrix choi = choi_from_super(super, d);
  if (!is_hermitian_matrix(choi, kChoiPsdTol)) {
    throw std::invalid_argument("Channel: Choi matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(choi, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < -kChoiPsdTol) {
    throw std::invalid_argument("Channel: Choi matrix is not positive semidefinite (min eigenvalue " +
                                std::to_string(min_eig) + ")");
  }
  const Matrix reduced = choi_trace_out_output(choi, d);
  const Matrix target = Matrix::Identity(d, d) / static_cast<double>(d);
  if (max_abs_diff(reduced, target) > kTpTol) {
    throw std::invalid_argument("Channel: map is not trace preserving");
  }
}

int qubits_from_matrix_dim(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index(1) << n) < dim) ++n;
  if ((Eigen::Index(1) << n) != dim) {
    throw std::invalid_argument("Channel: dimension is not a power of two");
  }
  return n;
}

}  // namespace

Channel::Channel(int num_qubits, Matrix superop, bool validate)
    : n_(num_qubits), super_(std::move(superop)) {
  if (num_qubits < 1) throw std::invalid_argument("Channel: qubit count must be positive");
  if (validate) validate_cptp(n_, super_);
}

Channel Channel::identity(int num_qubits) {
  const Eigen::Index d2 = Eigen::Index(1) << (2 * num_qubits);
  return Channel(num_qubits, Matrix::Identity(d2, d2), false);
}

Channel Channel::from_unitary(const Matrix& u) {
  const int n = qubits_from_matrix_dim(u.rows());
  if (!is_unitary(u)) throw std::invalid_argument("Channel::from_unitary: matrix is not unitary");
  return Channel(n, kron(u.conjugate(), u), false);
}

Channel Channel::from_kraus(int num_qubits, const std::vector<Matrix>& kraus) {
  const Eigen::Index d = Eigen::Index(1) << num_qubits;
  if (kraus.empty()) throw std::invalid_argument("Channel::from_kraus: empty Kraus list");
  Matrix super = Matrix::Zero(d * d, d * d);
  Matrix completeness = Matrix::Zero(d, d);
  for (const Matrix& k : kraus) {
    if (k.rows() != d || k.cols() != d) {
      throw std::invalid_argument("Channel::from_kraus: Kraus dimension mismatch");
    }
    super += kron(k.conjugate(), k);
    completeness += k.adjoint() * k;
  }
  if (max_abs_diff(completeness, Matrix::Identity(d, d)) > 1e-9) {
    throw std::invalid_argument("Channel::from_kraus: Kraus operators are not trace preserving");
  }
  return Channel(num_qubits, std::move(super), false);
}

Channel Channel::from_chi(int num_qubits, const Matrix& chi) {
  const Eigen::Index d2 = Eigen::Index(1) << (2 * num_qubits);
  if (chi.rows() != d2 || chi.cols() != d2) {
    throw std::invalid_argument("Channel::from_chi: chi dimension mismatch");
  }
  if (!is_hermitian_matrix(chi, 1e-9)) {
    throw std::invalid_argument("Channel::from_chi: chi matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(chi, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-9) {
    throw std::invalid_argument("Channel::from_chi: chi matrix is not positive semidefinite");
  }
  const auto& basis = pauli_basis(num_qubits);
  const Eigen::Index d = Eigen::Index(1) << num_qubits;
  // Trace preservation for rho -> sum chi_ab P_a rho P_b requires
  // sum chi_ab P_b P_a = I (cyclic trace of P_a rho P_b).
  Matrix tp_check = Matrix::Zero(d, d);
  for (Eigen::Index a = 0; a < d2; ++a) {
    for (Eigen::Index b = 0; b < d2; ++b) {
      if (chi(a, b) != Complex(0.0, 0.0)) {
        tp_check += chi(a, b) * basis[static_cast<std::size_t>(b)] * basis[static_cast<std::size_t>(a)];
      }
    }
  }
  if (max_abs_diff(tp_check, Matrix::Identity(d, d)) > 1e-9) {
    throw std::invalid_argument("Channel::from_chi: trace-preservation condition violated");
  }
  Matrix super = Matrix::Zero(d2, d2);
  for (Eigen::Index a = 0; a < d2; ++a) {
    for (Eigen::Index b = 0; b < d2; ++b) {
      if (chi(a, b) != Complex(0.0, 0.0)) {
        super += chi(a, b) * kron(basis[static_cast<std::size_t>(b)].transpose(),
                                  basis[static_cast<std::size_t>(a)]);
      }
    }
  }
  Channel out(num_qubits, std::move(super), false);
  out.chi_cache_ = chi;
  return out;
}

Channel Channel::from_pauli_probs(int num_qubits, const std::vector<double>& probs) {
  const std::size_t count = std::size_t(1) << (2 * num_qubits);
  if (probs.size() != count) {
    throw std::invalid_argument("Channel::from_pauli_probs: wrong vector length");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (p < -1e-10) throw std::invalid_argument("Channel::from_pauli_probs: negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-8) {
    throw std::invalid_argument("Channel::from_pauli_probs: probabilities do not sum to 1");
  }
  const auto& basis = pauli_basis(num_qubits);
  const Eigen::Index d2 = Eigen::Index(1) << (2 * num_qubits);
  Matrix super = Matrix::Zero(d2, d2);
  Matrix chi = Matrix::Zero(d2, d2);
  for (std::size_t a = 0; a < count; ++a) {
    const double p = std::max(probs[a], 0.0);
    chi(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = p;
    if (p == 0.0) continue;
    super += p * kron(basis[a].transpose(), basis[a]);
  }
  Channel out(num_qubits, std::move(super), false);
  out.chi_cache_ = std::move(chi);
  return out;
}

Channel Channel::depolarizing(int num_qubits, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("depolarizing: p out of [0, 1]");
  const std::size_t count = std::size_t(1) << (2 * num_qubits);
  std::vector<double> probs(count, (1.0 - p) / static_cast<double>(count - 1));
  probs[0] = p;
  return from_pauli_probs(num_qubits, probs);
}

Matrix Channel::chi() const {
  if (chi_cache_) return *chi_cache_;
  const auto& basis = pauli_basis(n_);
  const Eigen::Index d2 = super_.rows();
  const double norm = static_cast<double>(d2);
  Matrix chi(d2, d2);
  for (Eigen::Index a = 0; a < d2; ++a) {
    for (Eigen::Index b = 0; b < d2; ++b) {
      const Matrix basis_elem = kron(basis[static_cast<std::size_t>(b)].transpose(),
                                     basis[static_cast<std::size_t>(a)]);
      chi(a, b) = (basis_elem.adjoint() * super_).trace() / norm;
    }
  }
  return chi;
}

Matrix Channel::choi() const { return choi_from_super(super_, dim()); }

std::vector<Matrix> Channel::kraus() const {
  const Eigen::Index d = dim();
  const Matrix scaled_choi = choi() * static_cast<double>(d);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(scaled_choi);
  std::vector<Matrix> ops;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lambda = solver.eigenvalues()(i);
    if (lambda < kKrausCutoff) continue;
    const Vector v = solver.eigenvectors().col(i);
    // Choi columns hold the input index on high bits: K[m, k] = v[k*d + m].
    Matrix k(d, d);
    for (Eigen::Index col = 0; col < d; ++col) {
      for (Eigen::Index row = 0; row < d; ++row) {
        k(row, col) = v(col * d + row);
      }
    }
    ops.push_back(std::sqrt(lambda) * k);
  }
  return ops;
}

std::vector<double> Channel::pauli_probs() const {
  const Matrix c = chi();
  std::vector<double> probs;
  probs.reserve(static_cast<std::size_t>(c.rows()));
  for (Eigen::Index a = 0; a < c.rows(); ++a) {
    probs.push_back(c(a, a).real());
  }
  return probs;
}

Matrix Channel::apply_matrix(const Matrix& rho) const {
  return unvectorize(super_ * vectorize(rho), dim());
}

DensityMatrix Channel::apply(const DensityMatrix& rho) const {
  if (rho.num_qubits() != n_) throw std::invalid_argument("Channel::apply: dimension mismatch");
  Matrix out = apply_matrix(rho.matrix());
  // Re-symmetrize floating point dust before validation.
  out = 0.5 * (out + Matrix(out.adjoint()));
  return DensityMatrix(n_, std::move(out));
}

Channel Channel::compose(const Channel& inner) const {
  if (inner.n_ != n_) throw std::invalid_argument("Channel::compose: dimension mismatch");
  return Channel(n_, super_ * inner.super_, false);
}

double entanglement_fidelity(const Channel& c) {
  const Vector phi = bell_vector(c.num_qubits());
  const Matrix j = apply_to_second_factor(c, phi * phi.adjoint());
  return (phi.adjoint() * j * phi)(0, 0).real();
}

double coherent_offdiag_sum(const Channel& c) {
  const Matrix chi = c.chi();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < chi.rows(); ++i) {
    for (Eigen::Index j = 0; j < chi.cols(); ++j) {
      if (i != j) sum += std::abs(chi(i, j));
    }
  }
  return sum;
}

DensityMatrix choi_state(const Channel& c) {
  Matrix j = c.choi();
  j = 0.5 * (j + Matrix(j.adjoint()));
  return DensityMatrix(2 * c.num_qubits(), std::move(j));
}

RealMatrix pauli_transfer_matrix(const Channel& c) {
  const auto& basis = pauli_basis(c.num_qubits());
  const Eigen::Index d2 = Eigen::Index(1) << (2 * c.num_qubits());
  const double norm = static_cast<double>(c.dim());
  RealMatrix r(d2, d2);
  for (Eigen::Index j = 0; j < d2; ++j) {
    const Matrix mapped = c.apply_matrix(basis[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < d2; ++i) {
      r(i, j) = (basis[static_cast<std::size_t>(i)] * mapped).trace().real() / norm;
    }
  }
  return r;
}

int ptm_rank(const Channel& c) {
  Eigen::JacobiSVD<RealMatrix> svd(pauli_transfer_matrix(c));
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > kPtmRankTol) ++rank;
  }
  return rank;
}

Matrix apply_to_second_factor(const Channel& c, const Matrix& rho) {
  const Eigen::Index d = c.dim();
  if (rho.rows() != d * d || rho.cols() != d * d) {
    throw std::invalid_argument("apply_to_second_factor: dimension mismatch");
  }
  Matrix out(d * d, d * d);
  Matrix block(d, d);
  for (Eigen::Index ka = 0; ka < d; ++ka) {
    for (Eigen::Index la = 0; la < d; ++la) {
      block = rho.block(ka * d, la * d, d, d);
      out.block(ka * d, la * d, d, d) = c.apply_matrix(block);
    }
  }
  return out;
}

double diamond_lower_bound(const Channel& c1, const Channel& c2, int num_samples,
                           std::mt19937_64& g) {
  if (c1.num_qubits() != c2.num_qubits()) {
    throw std::invalid_argument("diamond_lower_bound: dimension mismatch");
  }
  double best = 0.0;
  for (int s = 0; s < num_samples; ++s) {
    const Vector psi = rng::haar_state_vector(2 * c1.num_qubits(), g);
    const Matrix rho = psi * psi.adjoint();
    const Matrix diff = apply_to_second_factor(c1, rho) - apply_to_second_factor(c2, rho);
    best = std::max(best, trace_norm(diff));
  }
  return best;
}

nlohmann::json channel_to_json(const Channel& c) {
  const Matrix chi = c.chi();
  nlohmann::json data = nlohmann::json::array();
  for (Eigen::Index i = 0; i < chi.rows(); ++i) {
    for (Eigen::Index j = 0; j < chi.cols(); ++j) {
      data.push_back({chi(i, j).real(), chi(i, j).imag()});
    }
  }
  return {{"n", c.num_qubits()}, {"representation", "chi"}, {"data", data}};
}

Channel channel_from_json(const nlohmann::json& j) {
  if (!j.contains("n") || !j.contains("representation") || !j.contains("data")) {
    throw std::invalid_argument("channel_from_json: missing field");
  }
  if (j.at("representation").get<std::string>() != "chi") {
    throw std::invalid_argument("channel_from_json: unsupported representation");
  }
  const int n = j.at("n").get<int>();
  const Eigen::Index d2 = Eigen::Index(1) << (2 * n);
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != d2 * d2) {
    throw std::invalid_argument("channel_from_json: wrong data length");
  }
  Matrix chi(d2, d2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < d2; ++i) {
    for (Eigen::Index jj = 0; jj < d2; ++jj) {
      const auto& pair = data[static_cast<std::size_t>(k++)];
      chi(i, jj) = Complex(pair[0].get<double>(), pair[1].get<double>());
    }
  }
  return Channel::from_chi(n, chi);
}

}  // namespace qpdwire
