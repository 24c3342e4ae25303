#include "qpdwire/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qpdwire::rng {

std::size_t sample_index(std::mt19937_64& g, const std::vector<double>& probs) {
  if (probs.empty()) throw std::invalid_argument("sample_index: empty probability vector");
  const double u = canonical(g);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

Vector haar_state_vector(int num_qubits, std::mt19937_64& g) {
  const Eigen::Index dim = Eigen::Index(1) << num_qubits;
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector psi(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double re = normal(g);
    const double im = normal(g);
    psi(i) = Complex(re, im);
  }
  psi.normalize();
  return psi;
}

std::array<double, 3> uniform_simplex3(std::mt19937_64& g) {
  double u = canonical(g);
  double v = canonical(g);
  if (u > v) std::swap(u, v);
  return {u, v - u, 1.0 - v};
}

std::array<double, 3> uniform_sphere(std::mt19937_64& g) {
  std::normal_distribution<double> normal(0.0, 1.0);
  double x = normal(g), y = normal(g), z = normal(g);
  double norm = std::sqrt(x * x + y * y + z * z);
  while (norm < 1e-12) {
    x = normal(g);
    y = normal(g);
    z = normal(g);
    norm = std::sqrt(x * x + y * y + z * z);
  }
  return {x / norm, y / norm, z / norm};
}

}  // namespace qpdwire::rng
