#pragma once

#include "mflab/longrange.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mflab {

// Coefficient vectors are index-aligned with the model's term list; attractive
// and repulsive coordinates are the Hahn-split index sets. Norms are weighted
// by |gamma|, matching the L^2(S; |a|) geometry.
double weighted_norm(const LongRangeModel& m, const Vector& x);
double repulsive_norm_sq(const LongRangeModel& m, const Vector& c);   // sum_{gamma>0} gamma |c|^2
double attractive_norm_sq(const LongRangeModel& m, const Vector& c);  // sum_{gamma<0} |gamma| |c|^2

// e_k(omega) = omega(U_L^{Psi_k}) / |Lambda_L|.
Vector expectation_coefficients(const ModelOperators& ops, const Matrix& rho);

// Phi_m(c) = Phi + sum_k gamma_k (conj(c_k) Psi_k + c_k Psi_k*).
Interaction approximating_interaction(const LongRangeModel& m, const Vector& c);

// Window Hamiltonian of Phi_m(c), assembled from cached term realizations.
Matrix approx_hamiltonian(const LongRangeModel& m, const ModelOperators& ops, const Vector& c);

double approx_pressure(const LongRangeModel& m, const Vector& c, double beta,
                       const FockContext& ctx);

// f_m(c_-, c_+) = -||c_+||^2 + ||c_-||^2 - P_{Phi_m(c_- + c_+)}.
double game_value(const LongRangeModel& m, const ModelOperators& ops, const Vector& c,
                  double beta);
double game_value(const LongRangeModel& m, const Vector& c_minus, const Vector& c_plus,
                  double beta, const FockContext& ctx);

struct GameSolverOptions {
  double damping = 0.5;
  int max_iterations = 500;
  int restarts = 8;
  double fp_tol = 1e-9;
  double cluster_tol = 1e-6;
  double coarse_step = 0.25;
  std::uint64_t seed = 0;
};

struct GapSolution {
  Vector c;
  double pressure_value = 0.0;  // P_{Phi_m(c)}
  double residual = 0.0;        // ||c - e(omega_c)||
  double game_val = 0.0;
  std::string branch;
  bool converged = false;
  int iterations = 0;
  double damping = 0.0;
  std::uint64_t restart_seed = 0;
  int absorbed_into = -1;  // >= 0 when a start merged into an earlier cluster
};

// Inner maximization over repulsive coordinates at fixed attractive part;
// returns a full-length vector supported on the repulsive indices. Empty
// repulsive part yields the zero vector (r_+ = 0).
Vector decision_rule(const LongRangeModel& m, const ModelOperators& ops, const Vector& c_minus,
                     double beta, const GameSolverOptions& opts);

// Damped iteration c <- (1-alpha) c + alpha e(omega_c) from seeded restarts;
// distinct fixed points are clustered. Unconverged starts are logged, not fatal.
std::vector<GapSolution> gap_fixed_point(const LongRangeModel& m, const FockContext& ctx,
                                         double beta, const GameSolverOptions& opts);
std::vector<GapSolution> gap_fixed_point(const LongRangeModel& m, const ModelOperators& ops,
                                         double beta, const GameSolverOptions& opts);

struct ConservativeSet {
  std::vector<Vector> strategies;       // attractive parts within tolerance of the min
  std::vector<Vector> full_points;      // d_- + r_+(d_-)
  double game_value = 0.0;              // min_d- max_c+ f
  double minmax_pressure = 0.0;         // -game_value
  std::vector<GapSolution> solutions;   // the fixed points that seeded the search
};

ConservativeSet conservative_set(const LongRangeModel& m, const FockContext& ctx, double beta,
                                 const GameSolverOptions& opts);

struct MinmaxReport {
  double minmax_pressure = 0.0;
  double direct_pressure = 0.0;  // pressure_lr
  double residual = 0.0;
};

MinmaxReport minmax_pressure(const LongRangeModel& m, const FockContext& ctx, double beta,
                             const GameSolverOptions& opts);

// min_{d_- in C_m} || e(rho) - (d_- + r_+(d_-)) ||; zero by convention at K=0.
double bogoliubov_residual(const ThermalState& rho, const LongRangeModel& m,
                           const ModelOperators& ops, const ConservativeSet& cons);
double bogoliubov_residual(const ThermalState& rho, const LongRangeModel& m,
                           const FockContext& ctx, double beta, const GameSolverOptions& opts);

struct SelfConsistentKmsReport {
  Vector coefficients;       // e(rho)
  double max_residual = 0.0;  // worst KMS boundary residual over the panel
  bool gibbs_of_generator = true;
};

// KMS residual of rho against the Hamiltonian of Phi_m(e(rho)) over a panel of
// random even observables.
SelfConsistentKmsReport selfconsistent_kms_check(const ThermalState& rho, const LongRangeModel& m,
                                                 const ModelOperators& ops, double beta,
                                                 int panel_size, std::uint64_t seed);

struct GameGridSpec {
  double radius = 2.0;
  double step = 0.01;
  int phases = 1;
  long cell_cap = 2000000;
};

struct GameSurface {
  std::vector<int> independent_indices;      // term indices carrying a free amplitude
  std::vector<Vector> points;                // full coefficient vectors per cell
  std::vector<double> values;                // f at each cell
  double minmax_value = 0.0;
  double minmax_pressure = 0.0;
  Vector argmin;                             // d_- + r_+ grid point attaining the min-max
  std::vector<Vector> stationary_points;     // grid-local minima over attractive coordinates
};

// Exhaustive grid over the independent amplitudes (conjugation-paired
// coordinates carry no extra freedom: the Hamiltonian depends on paired
// coordinates only through c_k + conj(c_partner), and the norm term is
// minimal on the conjugation-symmetric slice).
GameSurface brute_force_game_oracle(const LongRangeModel& m, const FockContext& ctx, double beta,
                                    const GameGridSpec& grid);

struct SimpleProbe {
  double epsilon = 0.0;
  int clusters_plus = 0;
  int clusters_minus = 0;
  double branch_distance = 0.0;
  bool simple_flag = false;
};

// Heuristic only: symmetry-breaking field +/- eps along the first term.
SimpleProbe simple_model_probe(const LongRangeModel& m, const FockContext& ctx, double beta,
                               double eps, const GameSolverOptions& opts);

}  // namespace mflab
