#include "mflab/modular.hpp"
#include "mflab/rng.hpp"

#include <cmath>

namespace mflab {

ModularData::ModularData(const ThermalState& rho, double faithfulness_tol)
    : p_(rho.rho_spectrum.eigenvalues), v_(rho.rho_spectrum.eigenvectors), rho_(rho.rho) {
  if (p_.minCoeff() <= faithfulness_tol)
    throw Error(ErrorCode::StateNotFaithful,
                "smallest weight " + std::to_string(p_.minCoeff()));
}

Matrix ModularData::omega() const {
  return Matrix(p_.cwiseSqrt().cast<Complex>().asDiagonal());
}

Matrix ModularData::represent(const Matrix& a) const { return v_.adjoint() * a * v_; }

Matrix ModularData::apply_pi(const Matrix& a_repr, const Matrix& y) const { return a_repr * y; }

Matrix ModularData::apply_s(const Matrix& y) const {
  // Solve A Omega = Y for the algebra element, then return A* Omega.
  Matrix a = y * p_.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal();
  return a.adjoint() * p_.cwiseSqrt().cast<Complex>().asDiagonal();
}

Matrix ModularData::apply_s_star(const Matrix& y) const {
  Matrix a = y * p_.cwiseSqrt().cast<Complex>().asDiagonal();
  return a.adjoint() * p_.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal();
}

Matrix ModularData::apply_delta(const Matrix& y) const { return apply_s_star(apply_s(y)); }

Matrix ModularData::apply_delta_power(const Matrix& y, double exponent) const {
  RealVector pw = p_.array().pow(exponent);
  RealVector pw_inv = p_.array().pow(-exponent);
  return pw.cast<Complex>().asDiagonal() * y * pw_inv.cast<Complex>().asDiagonal();
}

Matrix ModularData::apply_delta_imaginary_power(const Matrix& y, double t) const {
  Vector ph(p_.size());
  for (Eigen::Index n = 0; n < p_.size(); ++n) ph[n] = std::exp(Complex(0.0, t * std::log(p_[n])));
  return ph.asDiagonal() * y * ph.conjugate().asDiagonal();
}

Matrix ModularData::apply_j(const Matrix& y) const {
  return apply_s(apply_delta_power(y, -0.5));
}

Matrix ModularData::modular_flow_of_pi(const Matrix& a, double s) const {
  Matrix id = Matrix::Identity(p_.size(), p_.size());
  return apply_delta_imaginary_power(apply_pi(represent(a), apply_delta_imaginary_power(id, -s)),
                                     s);
}

double ModularData::delta_identity_residual(int n_samples, std::uint64_t seed) const {
  auto rng = seeded_engine(seed, 7);
  Matrix rho_inv = v_ * p_.cwiseInverse().cast<Complex>().asDiagonal() * v_.adjoint();
  double worst = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    Matrix y = random_matrix(p_.size(), rng);
    Matrix via_s = apply_delta(y);
    Matrix x = v_ * y * v_.adjoint();          // computational-basis coefficients
    Matrix closed = v_.adjoint() * (rho_ * x * rho_inv) * v_;
    worst = std::max(worst, (via_s - closed).norm() / y.norm());
  }
  return worst;
}

double ModularData::modular_flow_residual(const Matrix& a, const Matrix& hamiltonian, double beta,
                                          double t) const {
  Matrix sigma_side = modular_flow_of_pi(a, -t / beta);
  Spectrum hs = eig_hermitian(hamiltonian);
  Vector ph(hs.eigenvalues.size());
  for (Eigen::Index n = 0; n < ph.size(); ++n)
    ph[n] = std::exp(Complex(0.0, t * hs.eigenvalues[n]));
  Matrix u = hs.eigenvectors * ph.asDiagonal() * hs.eigenvectors.adjoint();
  Matrix heis = represent(u * a * u.adjoint());
  return operator_norm(sigma_side - heis);
}

double ModularData::commutant_residual(int n_samples, std::uint64_t seed) const {
  auto rng = seeded_engine(seed, 11);
  double worst = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    Matrix a = represent(random_matrix(p_.size(), rng));
    Matrix b = represent(random_matrix(p_.size(), rng));
    Matrix y = random_matrix(p_.size(), rng);
    Matrix jaj_then_b = apply_pi(b, apply_j(apply_pi(a, apply_j(y))));
    Matrix b_then_jaj = apply_j(apply_pi(a, apply_j(apply_pi(b, y))));
    double scale = a.norm() * b.norm() * y.norm();
    worst = std::max(worst, (jaj_then_b - b_then_jaj).norm() / scale);
  }
  return worst;
}

double ModularData::jdj_residual(int n_samples, std::uint64_t seed) const {
  auto rng = seeded_engine(seed, 13);
  double worst = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    Matrix y = random_matrix(p_.size(), rng);
    Matrix lhs = apply_j(apply_delta(apply_j(y)));
    Matrix rhs = apply_delta_power(y, -1.0);
    worst = std::max(worst, (lhs - rhs).norm() / std::max(rhs.norm(), 1e-300));
  }
  return worst;
}

}  // namespace mflab
