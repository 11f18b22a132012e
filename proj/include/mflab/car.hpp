#pragma once

#include "mflab/types.hpp"

#include <string>
#include <vector>

namespace mflab {

// Finite cubic window of the lattice with periodic identification. Sites are
// ordered by shells (sup-norm radius, then lexicographically), so the modes of
// any sub-window come first and restriction is a partial trace over trailing
// Jordan-Wigner factors. Within a site, spins follow the context's spin list.
struct FockContext {
  int dim = 1;           // spatial dimension
  int half_width = 0;    // L; the window is { x : |x_i| <= L }
  std::vector<std::string> spins;
  std::vector<IntVector> sites;  // shell order
  int n_sites = 0;
  int n_spins = 0;
  int n_modes = 0;
  Eigen::Index fock_dim = 0;  // 2^n_modes
  int mode_cap = 14;

  int side() const { return 2 * half_width + 1; }
  int mode_index(int site, int spin) const { return site * n_spins + spin; }
  int spin_index(const std::string& s) const;

  // Torus-wrapped site lookup; the input may lie outside the window.
  int site_index(const IntVector& x) const;
  IntVector wrap(const IntVector& x) const;
};

FockContext build_fock_context(int dim, int half_width, std::vector<std::string> spins,
                               int mode_cap = 14);

enum class Parity { Even, Odd, Mixed };

const char* parity_name(Parity p);

struct LocalOperator {
  Matrix mat;
  std::vector<int> support;  // site indices, sorted
  Parity parity = Parity::Mixed;
};

Parity compute_parity(const FockContext& ctx, const Matrix& m);

LocalOperator make_local_operator(const FockContext& ctx, Matrix m, std::vector<int> support);

LocalOperator local_identity(const FockContext& ctx);

LocalOperator annihilation(const FockContext& ctx, const IntVector& site, const std::string& spin);
LocalOperator creation(const FockContext& ctx, const IntVector& site, const std::string& spin);
Matrix annihilation_matrix(const FockContext& ctx, int mode);

LocalOperator op_adjoint(const FockContext& ctx, const LocalOperator& a);
LocalOperator op_product(const FockContext& ctx, const LocalOperator& a, const LocalOperator& b);
LocalOperator op_sum(const FockContext& ctx, const LocalOperator& a, const LocalOperator& b);

// Total number operator (diagonal).
Matrix number_operator(const FockContext& ctx);

// Parity unitary g_pi, diagonal with entries (-1)^popcount.
Matrix parity_unitary(const FockContext& ctx);

// e^{i theta N} A e^{-i theta N}; sends every annihilator to e^{-i theta} times itself.
LocalOperator gauge_automorphism(const FockContext& ctx, double theta, const LocalOperator& a);
Matrix gauge_automorphism(const FockContext& ctx, double theta, const Matrix& a);

// Second-quantized permutation unitary of a mode permutation (new = perm[old]).
Matrix mode_permutation_unitary(const FockContext& ctx, const std::vector<int>& perm);

// Cyclic lattice translation by x, realized as conjugation by the
// second-quantized permutation unitary; an exact *-automorphism of the window.
LocalOperator translate(const FockContext& ctx, const LocalOperator& a, const IntVector& x);
Matrix translate(const FockContext& ctx, const Matrix& a, const IntVector& x);

// All sites of the sub-window Lambda_ell (shell order prefix).
std::vector<IntVector> window_sites(const FockContext& ctx, int ell);

// A_ell = |Lambda_ell|^{-1} sum_{x in Lambda_ell} alpha_x(A).
LocalOperator space_average(const FockContext& ctx, const LocalOperator& a, int ell);

// rho(|A_ell|^2) - |rho(A)|^2 for a density matrix rho.
double ergodicity_gap(const FockContext& ctx, const Matrix& rho, const LocalOperator& a, int ell);

// Partial trace onto the modes of Lambda_ell (a Jordan-Wigner prefix).
Matrix restrict_to_window(const FockContext& ctx, const Matrix& rho, int ell);

// Finite realization of the state construction inside the non-orthogonality
// argument: a single-site product state with nonzero four-generator
// expectation, together with its two gauge twists.
struct GaugeTwistDemo {
  Matrix rho0, rho1, rho2;            // density matrices; rho_i = rho0 o g_{theta_i}
  Complex value0, value1, value2;     // expectations of the four-mode monomial
  Complex two_mode_ratio1, two_mode_ratio2;  // rho_i(a a) / rho0(a a)
  double twist_residual;              // max |rho0(A) + rho_i(A)|
  double state_distance;              // trace distance between rho1 and rho2
};

GaugeTwistDemo gauge_twist_demo(const FockContext& ctx);

}  // namespace mflab
