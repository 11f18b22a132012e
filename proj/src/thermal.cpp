#include "mflab/thermal.hpp"
#include "mflab/rng.hpp"

#include <cmath>

namespace mflab {

namespace {

RealVector gibbs_weights(const RealVector& energies, double beta) {
  const double shift = energies.minCoeff();
  RealVector w = (-beta * (energies.array() - shift)).exp();
  return w / w.sum();
}

}  // namespace

ThermalState gibbs(const Spectrum& spectrum, const Matrix& hamiltonian, double beta) {
  if (beta <= 0.0) throw Error(ErrorCode::ConfigInvalid, "beta must be positive");
  ThermalState st;
  st.beta = beta;
  st.generator = hamiltonian;
  st.generator_spectrum = spectrum;
  RealVector w = gibbs_weights(spectrum.eigenvalues, beta);
  st.rho = apply_spectral_function(spectrum, w);
  st.rho_spectrum.eigenvalues = w;
  st.rho_spectrum.eigenvectors = spectrum.eigenvectors;
  return st;
}

ThermalState gibbs(const Matrix& hamiltonian, double beta) {
  require_hermitian(hamiltonian, 1e-10, "Gibbs generator");
  return gibbs(eig_hermitian(hamiltonian), hamiltonian, beta);
}

ThermalState state_from_density(const Matrix& rho, double beta) {
  require_hermitian(rho, 1e-10, "density matrix");
  ThermalState st;
  st.beta = beta;
  st.rho = rho;
  st.rho_spectrum = eig_hermitian(st.rho);
  double tr = st.rho_spectrum.eigenvalues.sum();
  if (std::abs(tr - 1.0) > 1e-12)
    throw Error(ErrorCode::NonPhysicalState, "trace " + std::to_string(tr));
  if (st.rho_spectrum.eigenvalues.minCoeff() < -1e-12)
    throw Error(ErrorCode::NonPhysicalState,
                "negative weight " + std::to_string(st.rho_spectrum.eigenvalues.minCoeff()));
  return st;
}

ThermalState tracial_state(Eigen::Index dim) {
  ThermalState st;
  st.rho = Matrix::Identity(dim, dim) / static_cast<double>(dim);
  st.rho_spectrum.eigenvalues = RealVector::Constant(dim, 1.0 / static_cast<double>(dim));
  st.rho_spectrum.eigenvectors = Matrix::Identity(dim, dim);
  return st;
}

double entropy(const ThermalState& rho) {
  double s = 0.0;
  for (double p : rho.rho_spectrum.eigenvalues) {
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

double entropy_density(const ThermalState& rho, const FockContext& ctx) {
  return entropy(rho) / static_cast<double>(ctx.n_sites);
}

double energy_density(const ThermalState& rho, const Matrix& hamiltonian, const FockContext& ctx) {
  return rho.expectation(hamiltonian).real() / static_cast<double>(ctx.n_sites);
}

double free_energy_density(const ThermalState& rho, const Matrix& hamiltonian, double beta,
                           const FockContext& ctx) {
  return energy_density(rho, hamiltonian, ctx) - entropy_density(rho, ctx) / beta;
}

double free_energy_density(const ThermalState& rho, const Interaction& phi, double beta,
                           const FockContext& ctx) {
  return free_energy_density(rho, local_hamiltonian(phi, ctx).mat, beta, ctx);
}

double pressure_from_spectrum(const RealVector& eigenvalues, double beta, double volume) {
  const double shift = eigenvalues.minCoeff();
  double z_shifted = (-beta * (eigenvalues.array() - shift)).exp().sum();
  return (std::log(z_shifted) - beta * shift) / (beta * volume);
}

double pressure(const Matrix& hamiltonian, double beta, const FockContext& ctx) {
  require_hermitian(hamiltonian, 1e-10, "pressure generator");
  Spectrum s = eig_hermitian(hamiltonian, /*with_vectors=*/false);
  return pressure_from_spectrum(s.eigenvalues, beta, static_cast<double>(ctx.n_sites));
}

double pressure(const Interaction& phi, double beta, const FockContext& ctx) {
  return pressure(local_hamiltonian(phi, ctx).mat, beta, ctx);
}

namespace {

bool is_gibbs_of(const ThermalState& rho, const Matrix& hamiltonian, const Spectrum& hs,
                 double beta) {
  if (rho.generator && (*rho.generator - hamiltonian).cwiseAbs().maxCoeff() <=
                           1e-10 * std::max(1.0, hamiltonian.cwiseAbs().maxCoeff()) &&
      rho.beta == beta)
    return true;
  RealVector w = gibbs_weights(hs.eigenvalues, beta);
  Matrix ref = apply_spectral_function(hs, w);
  return (ref - rho.rho).cwiseAbs().maxCoeff() <= 1e-8;
}

constexpr double kExpClamp = 500.0;

double clamped_exp(double x) { return std::exp(std::min(x, kExpClamp)); }

}  // namespace

KmsResidual kms_boundary_residual(const ThermalState& rho, const Matrix& hamiltonian, double beta,
                                  const Matrix& a, const Matrix& b) {
  require_hermitian(hamiltonian, 1e-10, "KMS generator");
  Spectrum hs = rho.generator_spectrum && rho.generator &&
                        (*rho.generator - hamiltonian).cwiseAbs().maxCoeff() <=
                            1e-12 * std::max(1.0, hamiltonian.cwiseAbs().maxCoeff())
                    ? *rho.generator_spectrum
                    : eig_hermitian(hamiltonian);
  const Matrix& v = hs.eigenvectors;
  const RealVector& e = hs.eigenvalues;
  Matrix at = v.adjoint() * a * v;
  Matrix bt = v.adjoint() * b * v;

  KmsResidual out;
  out.gibbs_of_generator = is_gibbs_of(rho, hamiltonian, hs, beta);
  if (out.gibbs_of_generator) {
    // omega(A tau_{i beta}(B)) = Z^{-1} sum_{n,m} A_nm B_mn e^{-beta E_m}.
    const double shift = e.minCoeff();
    RealVector w = (-beta * (e.array() - shift)).exp();
    const double z = w.sum();
    Complex lhs = 0.0, rhs = 0.0;
    for (Eigen::Index n = 0; n < e.size(); ++n)
      for (Eigen::Index m = 0; m < e.size(); ++m) {
        lhs += at(n, m) * bt(m, n) * w[m];
        rhs += w[n] * bt(n, m) * at(m, n);
      }
    out.residual = std::abs(lhs - rhs) / z;
    return out;
  }
  // General state: tau_{i beta}(B)_{mp} = B_mp e^{-beta(E_m - E_p)}, clamped.
  Matrix rt = v.adjoint() * rho.rho * v;
  Matrix bhat(bt.rows(), bt.cols());
  for (Eigen::Index mm = 0; mm < e.size(); ++mm)
    for (Eigen::Index p = 0; p < e.size(); ++p)
      bhat(mm, p) = bt(mm, p) * clamped_exp(-beta * (e[mm] - e[p]));
  Complex lhs = (rt * at * bhat).trace();
  Complex rhs = (rt * bt * at).trace();
  out.residual = std::abs(lhs - rhs);
  return out;
}

double kms_smeared_residual(const ThermalState& rho, const Matrix& hamiltonian, double beta,
                            const Matrix& a, const Matrix& b, double sigma) {
  require_hermitian(hamiltonian, 1e-10, "KMS generator");
  Spectrum hs = eig_hermitian(hamiltonian);
  const Matrix& v = hs.eigenvectors;
  const RealVector& e = hs.eigenvalues;
  Matrix at = v.adjoint() * a * v;
  Matrix bt = v.adjoint() * b * v;
  Matrix rt = v.adjoint() * rho.rho * v;
  const double norm = std::sqrt(2.0 * M_PI) * sigma;

  // With f(t) = exp(-t^2 / (2 sigma^2)):
  //   int f(t - i beta) e^{i t dE} dt = norm e^{-beta dE} e^{-sigma^2 dE^2 / 2},
  //   int f(t) e^{i t dE} dt = norm e^{-sigma^2 dE^2 / 2};
  // the Gaussian factor dominates the e^{-beta dE} growth, so no clamping.
  Matrix bhat_l(bt.rows(), bt.cols()), bhat_r(bt.rows(), bt.cols());
  for (Eigen::Index m = 0; m < e.size(); ++m)
    for (Eigen::Index p = 0; p < e.size(); ++p) {
      const double de = e[m] - e[p];
      const double gauss = std::exp(-0.5 * sigma * sigma * de * de);
      bhat_l(m, p) = bt(m, p) * gauss * std::exp(-beta * de);
      bhat_r(p, m) = bt(p, m) * gauss;
    }
  Complex lhs = norm * (rt * at * bhat_l).trace();
  Complex rhs = norm * (rt * bhat_r * at).trace();
  return std::abs(lhs - rhs);
}

VariationalReport gibbs_variational_check(const Interaction& phi, double beta,
                                          const FockContext& ctx, int n_samples,
                                          std::uint64_t seed) {
  Matrix h = local_hamiltonian(phi, ctx).mat;
  VariationalReport rep;
  rep.pressure_value = pressure(h, beta, ctx);
  ThermalState g = gibbs(h, beta);
  rep.gibbs_free_energy = free_energy_density(g, h, beta, ctx);
  rep.identity_residual = std::abs(rep.gibbs_free_energy + rep.pressure_value);
  rep.samples = n_samples;
  auto rng = seeded_engine(seed, 0);
  for (int i = 0; i < n_samples; ++i) {
    ThermalState sample = state_from_density(random_density_matrix(ctx.fock_dim, rng), beta);
    double f = free_energy_density(sample, h, beta, ctx);
    rep.worst_violation = std::max(rep.worst_violation, rep.gibbs_free_energy - f);
  }
  // Second difference of f along rho_t = M rho M^* / tr(...), M = 1 + t K; the
  // path stays in the state space and passes through the minimizer at t = 0.
  Matrix k = random_hermitian(ctx.fock_dim, rng);
  k /= std::max(operator_norm(k), 1e-12);
  const double eps = 1e-3;
  auto f_of = [&](double t) {
    Matrix m = Matrix::Identity(ctx.fock_dim, ctx.fock_dim) + t * k;
    Matrix rho = m * g.rho * m.adjoint();
    rho /= rho.trace().real();
    return free_energy_density(state_from_density(rho, beta), h, beta, ctx);
  };
  rep.curvature = (f_of(eps) + f_of(-eps) - 2.0 * rep.gibbs_free_energy) / (eps * eps);
  return rep;
}

}  // namespace mflab
