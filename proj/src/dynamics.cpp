#include "mflab/dynamics.hpp"

#include <cmath>

namespace mflab {

namespace {

Vector phase_vector(const RealVector& e, double t) {
  Vector ph(e.size());
  for (Eigen::Index n = 0; n < e.size(); ++n) ph[n] = std::exp(Complex(0.0, t * e[n]));
  return ph;
}

}  // namespace

Matrix heisenberg(const Spectrum& s, const Matrix& a, double t) {
  Vector ph = phase_vector(s.eigenvalues, t);
  Matrix u = s.eigenvectors * ph.asDiagonal() * s.eigenvectors.adjoint();
  return u * a * u.adjoint();
}

Matrix heisenberg(const Matrix& hamiltonian, const Matrix& a, double t) {
  require_hermitian(hamiltonian, 1e-10, "dynamics generator");
  return heisenberg(eig_hermitian(hamiltonian), a, t);
}

LocalOperator heisenberg_lr(const LongRangeModel& m, const FockContext& ctx,
                            const LocalOperator& a, double t) {
  Matrix u_m = long_range_hamiltonian(m, ctx).mat;
  Matrix evolved = heisenberg(u_m, a.mat, t);
  std::vector<int> support(ctx.n_sites);
  for (int i = 0; i < ctx.n_sites; ++i) support[i] = i;
  return make_local_operator(ctx, std::move(evolved), std::move(support));
}

namespace {

// One RK4 step of V' = -i H(t) V.
Matrix rk4_unitary_step(const std::function<Matrix(double)>& h_of_t, const Matrix& v, double t,
                        double dt) {
  const Complex mi(0.0, -1.0);
  Matrix k1 = mi * (h_of_t(t) * v);
  Matrix k2 = mi * (h_of_t(t + 0.5 * dt) * (v + 0.5 * dt * k1));
  Matrix k3 = mi * (h_of_t(t + 0.5 * dt) * (v + 0.5 * dt * k2));
  Matrix k4 = mi * (h_of_t(t + dt) * (v + dt * k3));
  return v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double unitarity_defect(const Matrix& v) {
  return (v.adjoint() * v - Matrix::Identity(v.rows(), v.cols())).cwiseAbs().maxCoeff();
}

// Closest unitary via the Hermitian square root of V^* V.
Matrix reunitarize(const Matrix& v) {
  Matrix gram = v.adjoint() * v;
  Spectrum s = eig_hermitian(gram);
  RealVector inv_sqrt = s.eigenvalues.cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return v * apply_spectral_function(s, inv_sqrt);
}

}  // namespace

Propagator nonautonomous_propagator(const std::function<Matrix(double)>& h_of_t,
                                    Eigen::Index dim, double s, double t,
                                    const PropagatorOptions& opts) {
  double dt = opts.dt;
  const double direction = t >= s ? 1.0 : -1.0;
  for (int attempt = 0; attempt <= opts.max_halvings; ++attempt) {
    Matrix v = Matrix::Identity(dim, dim);
    double drift = 0.0;
    double time = s;
    long steps_since_polar = 0;
    bool ok = true;
    while (direction * (t - time) > 1e-15) {
      double step = std::min(dt, std::abs(t - time)) * direction;
      v = rk4_unitary_step(h_of_t, v, time, step);
      time += step;
      if (++steps_since_polar >= 64) {
        v = reunitarize(v);
        steps_since_polar = 0;
      }
      double defect = unitarity_defect(v);
      drift = std::max(drift, defect);
      if (defect > opts.unitarity_tol) {
        ok = false;
        break;
      }
    }
    if (ok) {
      Propagator p;
      p.u = reunitarize(v);
      p.unitarity_drift = drift;
      p.halvings = attempt;
      p.dt_used = dt;
      return p;
    }
    dt *= 0.5;
  }
  throw Error(ErrorCode::StepTooLarge,
              "unitarity drift persists after " + std::to_string(opts.max_halvings) + " halvings");
}

Matrix evolve_heisenberg(const Propagator& p, const Matrix& a) {
  return p.u.adjoint() * a * p.u;
}

namespace {

double flow_energy(const LongRangeModel& m, const ModelOperators& ops, const Matrix& rho,
                   const Vector& c) {
  double e = (rho.transpose().cwiseProduct(ops.u_phi)).sum().real() / ops.volume;
  for (int k = 0; k < m.n_terms(); ++k) e += m.terms[k].gamma * std::norm(c[k]);
  return e;
}

double snapshot_entropy(const Matrix& rho) {
  Spectrum s = eig_hermitian(rho);
  double out = 0.0;
  for (double p : s.eigenvalues)
    if (p > 0.0) out -= p * std::log(p);
  return out;
}

}  // namespace

namespace {

// The flow state as parity blocks when every generator and the initial datum
// are even; a single full block otherwise.
struct FlowBlocks {
  ParityBlocks pb;
  bool blocked = false;
  std::vector<Matrix> u_phi;                // per block
  std::vector<std::vector<Matrix>> u_psi;   // [term][block]

  int count() const { return blocked ? 2 : 1; }

  std::vector<Matrix> split(const Matrix& full) const {
    if (!blocked) return {full};
    return {parity_gather(pb, full, 0), parity_gather(pb, full, 1)};
  }
  Matrix assemble(const std::vector<Matrix>& blocks) const {
    if (!blocked) return blocks[0];
    return parity_assemble(pb, blocks[0], blocks[1]);
  }
};

FlowBlocks make_flow_blocks(const ModelOperators& ops, const Matrix& rho0) {
  FlowBlocks fb;
  fb.pb = parity_blocks(ops.fock_dim);
  fb.blocked = fb.pb.usable && parity_block_diagonal(fb.pb, rho0, 1e-12) &&
               parity_block_diagonal(fb.pb, ops.u_phi, 1e-12);
  for (size_t k = 0; fb.blocked && k < ops.u_psi.size(); ++k)
    fb.blocked = parity_block_diagonal(fb.pb, ops.u_psi[k], 1e-12);
  if (fb.blocked) {
    fb.u_phi = fb.split(ops.u_phi);
    for (const auto& u : ops.u_psi) fb.u_psi.push_back(fb.split(u));
  } else {
    fb.u_phi = {ops.u_phi};
    for (const auto& u : ops.u_psi) fb.u_psi.push_back({u});
  }
  return fb;
}

Vector block_coefficients(const FlowBlocks& fb, double volume, const std::vector<Matrix>& d) {
  Vector c(static_cast<Eigen::Index>(fb.u_psi.size()));
  for (size_t k = 0; k < fb.u_psi.size(); ++k) {
    Complex tr = 0.0;
    for (int b = 0; b < fb.count(); ++b)
      tr += d[b].transpose().cwiseProduct(fb.u_psi[k][b]).sum();
    c[static_cast<Eigen::Index>(k)] = tr / volume;
  }
  return c;
}

}  // namespace

FlowTrajectory selfconsistent_flow(const LongRangeModel& m, const ModelOperators& ops,
                                   const Matrix& rho0, double t_final, const FlowOptions& opts) {
  require_hermitian(rho0, 1e-10, "initial state");
  const Complex mi(0.0, -1.0);
  FlowBlocks fb = make_flow_blocks(ops, rho0);
  auto field = [&](const std::vector<Matrix>& d) {
    Vector c = block_coefficients(fb, ops.volume, d);
    std::vector<Matrix> out(fb.count());
    for (int b = 0; b < fb.count(); ++b) {
      Matrix h = fb.u_phi[b];
      for (int k = 0; k < m.n_terms(); ++k) {
        h += (m.terms[k].gamma * std::conj(c[k])) * fb.u_psi[k][b];
        h += (m.terms[k].gamma * c[k]) * fb.u_psi[k][b].adjoint();
      }
      out[b] = mi * (h * d[b] - d[b] * h);
    }
    return out;
  };

  double dt = opts.dt;
  for (int attempt = 0; attempt <= opts.max_halvings; ++attempt) {
    FlowTrajectory traj;
    traj.dt_used = dt;
    const long n_steps = std::lround(std::ceil(t_final / dt - 1e-12));
    const long stride = std::max<long>(1, std::lround(opts.snapshot_interval / dt));
    std::vector<Matrix> d = fb.split(rho0);
    const double trace0 = rho0.trace().real();

    std::vector<double> times;
    bool ok = true;
    auto record = [&](double time) {
      double pmin = 1e300;
      std::vector<Spectrum> spectra(fb.count());
      for (int b = 0; b < fb.count(); ++b) {
        spectra[b] = eig_hermitian(d[b]);
        pmin = std::min(pmin, spectra[b].eigenvalues.minCoeff());
      }
      if (pmin < opts.positivity_tol) {
        // positivity genuinely lost at t = 0 means bad input; later on it is
        // integrator drift and the step gets halved
        if (time == 0.0)
          throw Error(ErrorCode::NonPhysicalState,
                      "density weight " + std::to_string(pmin) + " in the initial state");
        ok = false;
        return;
      }
      if (pmin < opts.positivity_floor) {
        double total = 0.0;
        for (int b = 0; b < fb.count(); ++b)
          total += spectra[b].eigenvalues.cwiseMax(0.0).sum();
        for (int b = 0; b < fb.count(); ++b) {
          RealVector clipped = spectra[b].eigenvalues.cwiseMax(0.0) / total;
          d[b] = apply_spectral_function(spectra[b], clipped);
        }
        ++traj.positivity_repairs;
      }
      times.push_back(time);
      traj.coefficients.push_back(block_coefficients(fb, ops.volume, d));
      traj.snapshots.push_back(fb.assemble(d));
    };
    record(0.0);
    double time = 0.0;
    for (long step = 0; step < n_steps && ok; ++step) {
      double h = std::min(dt, t_final - time);
      std::vector<Matrix> k1 = field(d);
      std::vector<Matrix> stage(fb.count());
      for (int b = 0; b < fb.count(); ++b) stage[b] = d[b] + 0.5 * h * k1[b];
      std::vector<Matrix> k2 = field(stage);
      for (int b = 0; b < fb.count(); ++b) stage[b] = d[b] + 0.5 * h * k2[b];
      std::vector<Matrix> k3 = field(stage);
      for (int b = 0; b < fb.count(); ++b) stage[b] = d[b] + h * k3[b];
      std::vector<Matrix> k4 = field(stage);
      double trace_now = 0.0;
      for (int b = 0; b < fb.count(); ++b) {
        d[b] += (h / 6.0) * (k1[b] + 2.0 * k2[b] + 2.0 * k3[b] + k4[b]);
        d[b] = 0.5 * (d[b] + d[b].adjoint().eval());
        trace_now += d[b].trace().real();
      }
      time += h;
      if (std::abs(trace_now - trace0) > opts.trace_tol) {
        ok = false;
        break;
      }
      if ((step + 1) % stride == 0 || step + 1 == n_steps) record(time);
    }
    if (!ok) {
      dt *= 0.5;
      continue;
    }
    const auto n = static_cast<Eigen::Index>(times.size());
    traj.times = Eigen::Map<const RealVector>(times.data(), n);
    traj.energies.resize(n);
    traj.traces.resize(n);
    traj.entropies.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      traj.energies[i] = flow_energy(m, ops, traj.snapshots[i], traj.coefficients[i]);
      traj.traces[i] = traj.snapshots[i].trace().real();
      traj.entropies[i] = snapshot_entropy(traj.snapshots[i]);
    }
    traj.energy_drift = (traj.energies.array() - traj.energies[0]).abs().maxCoeff();
    traj.trace_drift = (traj.traces.array() - traj.traces[0]).abs().maxCoeff();
    return traj;
  }
  throw Error(ErrorCode::StepTooLarge, "trace or positivity drift persists after " +
                                           std::to_string(opts.max_halvings) + " halvings");
}

FlowTrajectory selfconsistent_flow(const LongRangeModel& m, const FockContext& ctx,
                                   const Matrix& rho0, double t_final, const FlowOptions& opts) {
  ModelOperators ops = build_model_operators(m, ctx);
  return selfconsistent_flow(m, ops, rho0, t_final, opts);
}

StationarityReport stationarity_check(const LongRangeModel& m, const FockContext& ctx,
                                      double beta, const Vector& d, double t_final,
                                      const FlowOptions& opts) {
  ModelOperators ops = build_model_operators(m, ctx);
  ThermalState omega = gibbs(approx_hamiltonian(m, ops, d), beta);

  StationarityReport rep;
  FlowTrajectory traj = selfconsistent_flow(m, ops, omega.rho, t_final, opts);
  for (const auto& c : traj.coefficients)
    rep.selfconsistent_deviation =
        std::max(rep.selfconsistent_deviation, weighted_norm(m, Vector(c - traj.coefficients[0])));

  std::vector<Matrix> panel;
  panel.push_back(ops.u_phi / ops.volume);
  for (const auto& u : ops.u_psi) panel.push_back(u / ops.volume);
  Spectrum um = eig_hermitian(ops.u_model);
  Vector ph = phase_vector(um.eigenvalues, -t_final);
  Matrix u = um.eigenvectors * ph.asDiagonal() * um.eigenvectors.adjoint();
  Matrix evolved = u * omega.rho * u.adjoint();
  for (const auto& a : panel) {
    Complex before = omega.rho.transpose().cwiseProduct(a).sum();
    Complex after = evolved.transpose().cwiseProduct(a).sum();
    rep.exact_deviation = std::max(rep.exact_deviation, std::abs(after - before));
  }
  return rep;
}

LimitAgreementReport limit_agreement(
    const LongRangeModel& m, const std::vector<int>& widths,
    const std::vector<std::string>& spins,
    const std::function<Matrix(const FockContext&)>& initial_state,
    const std::function<Matrix(const FockContext&)>& observable, double t,
    const FlowOptions& opts, int mode_cap) {
  LimitAgreementReport rep;
  rep.widths = widths;
  for (int width : widths) {
    FockContext ctx = build_fock_context(m.dim(), width, spins, mode_cap);
    ModelOperators ops = build_model_operators(m, ctx);
    Matrix rho0 = initial_state(ctx);
    Matrix a = observable(ctx);

    Spectrum um = eig_hermitian(ops.u_model);
    Vector ph = phase_vector(um.eigenvalues, -t);
    Matrix u = um.eigenvectors * ph.asDiagonal() * um.eigenvectors.adjoint();
    Matrix exact_state = u * rho0 * u.adjoint();
    Complex exact = exact_state.transpose().cwiseProduct(a).sum();

    FlowTrajectory traj = selfconsistent_flow(m, ops, rho0, t, opts);
    Complex flow = traj.snapshots.back().transpose().cwiseProduct(a).sum();
    rep.deviations.push_back(std::abs(exact - flow));
  }
  return rep;
}

}  // namespace mflab
