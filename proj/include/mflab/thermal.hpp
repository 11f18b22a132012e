#pragma once

#include "mflab/interaction.hpp"
#include "mflab/linalg.hpp"

#include <cstdint>
#include <optional>

namespace mflab {

// Density matrix with cached eigendata. Gibbs states keep their generator's
// spectrum so thermal expectations never form e^{+beta H}.
struct ThermalState {
  Matrix rho;
  double beta = 0.0;
  Spectrum rho_spectrum;                  // of the density matrix
  std::optional<Matrix> generator;        // H with rho = e^{-beta H}/Z, when built as Gibbs
  std::optional<Spectrum> generator_spectrum;

  Eigen::Index dim() const { return rho.rows(); }
  Complex expectation(const Matrix& a) const {
    return rho.transpose().cwiseProduct(a).sum();  // tr(rho a)
  }
  double min_eigenvalue() const { return rho_spectrum.eigenvalues.minCoeff(); }
};

ThermalState gibbs(const Matrix& hamiltonian, double beta);
ThermalState gibbs(const Spectrum& spectrum, const Matrix& hamiltonian, double beta);

// Any density matrix wrapped as a state (eigendata computed, unit trace and
// positivity enforced within 1e-12).
ThermalState state_from_density(const Matrix& rho, double beta = 0.0);

ThermalState tracial_state(Eigen::Index dim);

double entropy(const ThermalState& rho);                       // von Neumann, full window
double entropy_density(const ThermalState& rho, const FockContext& ctx);

double energy_density(const ThermalState& rho, const Matrix& hamiltonian, const FockContext& ctx);

// f = rho(U_L)/|Lambda_L| - s/beta.
double free_energy_density(const ThermalState& rho, const Matrix& hamiltonian, double beta,
                           const FockContext& ctx);
double free_energy_density(const ThermalState& rho, const Interaction& phi, double beta,
                           const FockContext& ctx);

// (beta |Lambda_L|)^{-1} ln Trace e^{-beta H}, spectral-shifted.
double pressure(const Matrix& hamiltonian, double beta, const FockContext& ctx);
double pressure(const Interaction& phi, double beta, const FockContext& ctx);
double pressure_from_spectrum(const RealVector& eigenvalues, double beta, double volume);

struct KmsResidual {
  double residual = 0.0;
  bool gibbs_of_generator = false;  // flags StateNotGibbsOfH when false
};

// |omega(A tau_{i beta}(B)) - omega(B A)| in the eigenbasis of H. For Gibbs
// states the bounded form Z^{-1} sum A_nm B_mn e^{-beta E_m} is used; for
// other states the boundary value needs e^{+beta dE} factors, which are
// exponent-clamped, and the result is flagged.
KmsResidual kms_boundary_residual(const ThermalState& rho, const Matrix& hamiltonian, double beta,
                                  const Matrix& a, const Matrix& b);

// Residual of the smeared KMS identity with a Gaussian test function of width
// sigma; the time integrals are Gaussian-exponential closed forms per
// eigenvalue pair.
double kms_smeared_residual(const ThermalState& rho, const Matrix& hamiltonian, double beta,
                            const Matrix& a, const Matrix& b, double sigma);

struct VariationalReport {
  double gibbs_free_energy = 0.0;
  double pressure_value = 0.0;
  double identity_residual = 0.0;   // |f(Gibbs) + P|
  double worst_violation = 0.0;     // max over samples of f(Gibbs) - f(sample)
  int samples = 0;
  double curvature = 0.0;           // second difference along a random perturbation
};

VariationalReport gibbs_variational_check(const Interaction& phi, double beta,
                                          const FockContext& ctx, int n_samples,
                                          std::uint64_t seed);

}  // namespace mflab
