#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qpdwire {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

/// Kronecker product, first factor on the high-order index bits.
Matrix kron(const Matrix& a, const Matrix& b);

/// Column-stacking vectorization: vec(m)[i + rows*j] = m(i, j).
Vector vectorize(const Matrix& m);
Matrix unvectorize(const Vector& v, Eigen::Index rows);

double max_abs_diff(const Matrix& a, const Matrix& b);
bool is_unitary(const Matrix& u, double tol = 1e-10);
bool is_hermitian_matrix(const Matrix& m, double tol = 1e-10);

}  // namespace qpdwire
