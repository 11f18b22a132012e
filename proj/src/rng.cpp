#include "mflab/rng.hpp"

namespace mflab {

Vector haar_random_vector(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(gauss(rng), gauss(rng));
  v.normalize();
  return v;
}

Matrix random_density_matrix(Eigen::Index dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Vector psi = haar_random_vector(dim, rng);
  double w = uni(rng);
  Matrix rho = w * (psi * psi.adjoint());
  rho += ((1.0 - w) / static_cast<double>(dim)) * Matrix::Identity(dim, dim);
  return rho;
}

Matrix random_matrix(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) m(i, j) = Complex(gauss(rng), gauss(rng));
  return m;
}

Matrix random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
  Matrix m = random_matrix(dim, rng);
  return 0.5 * (m + m.adjoint());
}

}  // namespace mflab
