#pragma once

#include "mflab/thermal.hpp"

#include <cstdint>

namespace mflab {

// Tomita-Takesaki data of a faithful state via purification. The doubled
// space C^D (x) C^D is coordinatized in the product eigenbasis of the density
// matrix: a vector is a D x D coefficient matrix Y, the purification vector is
// Omega = diag(sqrt p), and pi(A) acts by left multiplication with the
// eigenbasis representative of A. S is defined through S(A Omega) = A* Omega,
// Delta = S* S, and J = S Delta^{-1/2}.
class ModularData {
 public:
  explicit ModularData(const ThermalState& rho, double faithfulness_tol = 1e-14);

  Eigen::Index dim() const { return p_.size(); }
  double min_weight() const { return p_.minCoeff(); }

  Matrix omega() const;
  Matrix represent(const Matrix& a) const;  // V^* A V
  Matrix apply_pi(const Matrix& a_repr, const Matrix& y) const;
  Matrix apply_s(const Matrix& y) const;
  Matrix apply_s_star(const Matrix& y) const;
  Matrix apply_delta(const Matrix& y) const;  // composed as S* after S
  Matrix apply_delta_power(const Matrix& y, double exponent) const;
  Matrix apply_delta_imaginary_power(const Matrix& y, double t) const;  // Delta^{it}
  Matrix apply_j(const Matrix& y) const;  // composed as S after Delta^{-1/2}

  // Matrix of sigma_s(pi(A)) = Delta^{is} pi(A) Delta^{-is}, a left
  // multiplication; extracted by applying the composition to the identity.
  Matrix modular_flow_of_pi(const Matrix& a, double s) const;

  // max_Y ||Delta Y - transport of rho . rho^{-1} conjugation|| / ||Y|| over a
  // random panel; checks Delta = D (x) conj(D)^{-1} through the basis change.
  double delta_identity_residual(int n_samples, std::uint64_t seed) const;

  // ||sigma_{-t/beta}(pi(A)) - pi(e^{itH} A e^{-itH})||, Heisenberg side from
  // an independent eigendecomposition of H.
  double modular_flow_residual(const Matrix& a, const Matrix& hamiltonian, double beta,
                               double t) const;

  double commutant_residual(int n_samples, std::uint64_t seed) const;
  double jdj_residual(int n_samples, std::uint64_t seed) const;  // J Delta J vs Delta^{-1}

 private:
  RealVector p_;
  Matrix v_;  // eigenvectors of the density matrix
  Matrix rho_;
};

}  // namespace mflab
