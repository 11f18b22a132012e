#pragma once

#include "mflab/game.hpp"

#include <functional>
#include <vector>

namespace mflab {

Matrix heisenberg(const Spectrum& s, const Matrix& a, double t);
Matrix heisenberg(const Matrix& hamiltonian, const Matrix& a, double t);

// tau_t^{(L,m)}(A) = e^{i t U_L^m} A e^{-i t U_L^m}.
LocalOperator heisenberg_lr(const LongRangeModel& m, const FockContext& ctx,
                            const LocalOperator& a, double t);

struct PropagatorOptions {
  double dt = 1e-3;
  double unitarity_tol = 1e-8;
  int max_halvings = 16;
};

struct Propagator {
  Matrix u;  // V(t, s): i dV/dt = H(t) V
  double unitarity_drift = 0.0;
  int halvings = 0;
  double dt_used = 0.0;
};

// RK4 on the unitary with polar re-unitarization; halves the step until the
// unitarity drift stays within tolerance.
Propagator nonautonomous_propagator(const std::function<Matrix(double)>& h_of_t,
                                    Eigen::Index dim, double s, double t,
                                    const PropagatorOptions& opts = {});

// tau_{t,s}(A) = V(t,s)^* A V(t,s).
Matrix evolve_heisenberg(const Propagator& p, const Matrix& a);

struct FlowOptions {
  double dt = 1e-3;
  double snapshot_interval = 0.1;
  double trace_tol = 1e-8;
  double positivity_floor = -1e-10;  // below this, clip and renormalize
  double positivity_tol = -1e-6;     // below this, the state is rejected
  int max_halvings = 6;
};

struct FlowTrajectory {
  RealVector times;
  std::vector<Matrix> snapshots;
  std::vector<Vector> coefficients;  // c(t) at snapshots
  RealVector energies;               // rho(U_Phi)/|Lambda| + sum_k gamma_k |c_k|^2
  RealVector traces;
  RealVector entropies;
  double energy_drift = 0.0;
  double trace_drift = 0.0;
  int positivity_repairs = 0;
  double dt_used = 0.0;
  int order = 4;
};

// Integrates D' = -i [H(c(D)), D], c_k(D) = tr(D U^{Psi_k})/|Lambda|,
// H(c) = U^{Phi_m(c)}; c is re-evaluated inside every RK stage.
FlowTrajectory selfconsistent_flow(const LongRangeModel& m, const ModelOperators& ops,
                                   const Matrix& rho0, double t_final,
                                   const FlowOptions& opts = {});
FlowTrajectory selfconsistent_flow(const LongRangeModel& m, const FockContext& ctx,
                                   const Matrix& rho0, double t_final,
                                   const FlowOptions& opts = {});

struct StationarityReport {
  double selfconsistent_deviation = 0.0;  // max_t ||c(t) - c(0)||
  double exact_deviation = 0.0;           // max over panel of |omega(tau_t(A)) - omega(A)|
};

// Evolves the Gibbs state of Phi_m(d) under both the self-consistent flow and
// the exact finite long-range dynamics; the panel holds the per-site model
// observables U^Phi/|Lambda| and U^{Psi_k}/|Lambda|.
StationarityReport stationarity_check(const LongRangeModel& m, const FockContext& ctx,
                                      double beta, const Vector& d, double t_final,
                                      const FlowOptions& opts = {});

struct LimitAgreementReport {
  std::vector<int> widths;
  std::vector<double> deviations;  // |rho_L(tau_t(A)) - flow value| per L
};

// Same translation-invariant recipe instantiated on each window.
LimitAgreementReport limit_agreement(
    const LongRangeModel& m, const std::vector<int>& widths,
    const std::vector<std::string>& spins,
    const std::function<Matrix(const FockContext&)>& initial_state,
    const std::function<Matrix(const FockContext&)>& observable, double t,
    const FlowOptions& opts = {}, int mode_cap = 14);

}  // namespace mflab
