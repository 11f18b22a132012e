#pragma once

#include "mflab/thermal.hpp"

#include <string>
#include <vector>

namespace mflab {

struct LongRangeTerm {
  Interaction psi;  // unit W-norm element of the sphere
  double gamma = 0.0;
};

// m = (Phi, a) with a = sum_k gamma_k delta_{Psi_k}, a finitely supported
// self-adjoint signed measure on the unit sphere of interactions.
struct LongRangeModel {
  Interaction phi;
  std::vector<LongRangeTerm> terms;
  std::vector<int> adjoint_partner;  // index of Psi_k* within the term list
  double phi_norm = 0.0;             // ||Phi||_W at construction

  int dim() const { return phi.dim(); }
  int n_terms() const { return static_cast<int>(terms.size()); }
  double measure_norm() const;  // sum |gamma_k|
  double model_norm() const { return phi_norm + measure_norm(); }
};

struct SymmetrizationReport {
  bool modified = false;
  int terms_added = 0;
};

// Validates ||Psi_k||_W = 1 and Phi = Phi*, and closes the term list under the
// adjoint (a non-closed list is completed with (Psi*, gamma), reported).
LongRangeModel make_long_range_model(Interaction phi, std::vector<LongRangeTerm> terms,
                                     const DecayFunction& f,
                                     SymmetrizationReport* report = nullptr);

enum class ModelClass { ShortRange, PurelyAttractive, PurelyRepulsive, Mixed };

const char* model_class_name(ModelClass c);

struct HahnSplit {
  std::vector<int> repulsive;   // gamma_k > 0
  std::vector<int> attractive;  // gamma_k < 0
  double weight_repulsive = 0.0;
  double weight_attractive = 0.0;
  ModelClass model_class = ModelClass::ShortRange;
};

HahnSplit hahn_split(const LongRangeModel& m);

// U_L^m = U_L^Phi + |Lambda_L|^{-1} sum_k gamma_k (U_L^{Psi_k})* U_L^{Psi_k}.
LocalOperator long_range_hamiltonian(const LongRangeModel& m, const FockContext& ctx);

// Window realizations reused across solver iterations.
struct ModelOperators {
  Matrix u_phi;
  std::vector<Matrix> u_psi;
  Matrix u_model;
  double volume = 0.0;
  Eigen::Index fock_dim = 0;
};

ModelOperators build_model_operators(const LongRangeModel& m, const FockContext& ctx);

struct SpaceAvgReport {
  double value = 0.0;                   // Delta_{a,ell}(rho)
  std::vector<double> term_values;      // rho(|(e_Psi_k)_ell|^2) before weights
  std::vector<double> lower_bounds;     // |rho(e_Psi_k)|^2
  std::vector<double> upper_bounds;     // ||e_Psi_k||^2
};

SpaceAvgReport space_avg_functional(const LongRangeModel& m, const ThermalState& rho, int ell,
                                    const FockContext& ctx);

double pressure_lr(const LongRangeModel& m, double beta, const FockContext& ctx);

// Delta_{a,ell}(rho) + rho(U_L^Phi)/|Lambda_L| - s/beta; at ell = L this equals
// the plain free energy density of U_L^m on the torus.
double lr_free_energy(const LongRangeModel& m, const ThermalState& rho, double beta, int ell,
                      const FockContext& ctx);

struct WindowTraceReport {
  std::vector<int> widths;           // L values
  std::vector<Matrix> reduced;       // Gibbs states restricted to Lambda_ell
  Eigen::MatrixXd distances;         // pairwise trace-norm distances
};

WindowTraceReport gibbs_window_trace(const LongRangeModel& m, double beta,
                                     const std::vector<int>& widths, int ell,
                                     const std::vector<std::string>& spins, int mode_cap = 14);

}  // namespace mflab
