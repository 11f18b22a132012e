#pragma once

#include "mflab/car.hpp"
#include "mflab/types.hpp"

#include <string>
#include <vector>

namespace mflab {

// F(x, y) = exp(-varsigma |x-y|) (1 + |x-y|)^{-(dim+epsilon)}, Euclidean distance.
struct DecayFunction {
  double varsigma = 0.0;
  double epsilon = 1.0;
  int dim = 1;

  double value(double distance) const;
  double operator()(const IntVector& x, const IntVector& y) const;

  // Window truncation of sup_y sum_x F(x,y) plus a rigorous tail bound.
  double norm_one_truncated(int radius) const;
  double tail_bound(int radius) const;
};

struct GeneratorFactor {
  IntVector offset;
  std::string spin;
  bool dagger = false;
};

struct InteractionMonomial {
  Complex coeff;
  std::vector<GeneratorFactor> factors;  // leftmost factor acts last
};

struct AnchorTerm {
  std::vector<IntVector> support;  // canonical: sorted, lexicographic minimum at 0
  std::vector<InteractionMonomial> poly;
};

// Translation-invariant finite-range interaction, stored as anchor terms
// {Phi_Z : Z ni 0}; the full family is generated by translation covariance.
// Every anchor must be even (all monomials have an even number of generators).
class Interaction {
 public:
  explicit Interaction(int dim = 1, std::string label = "");

  int dim() const { return dim_; }
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  void add_anchor(std::vector<IntVector> support, std::vector<InteractionMonomial> poly);
  const std::vector<AnchorTerm>& anchors() const { return anchors_; }
  bool empty() const { return anchors_.empty(); }

  // Max anchor extent per coordinate direction.
  int range() const;
  std::vector<std::string> referenced_spins() const;

 private:
  int dim_;
  std::string label_;
  std::vector<AnchorTerm> anchors_;
};

Interaction adjoint_interaction(const Interaction& phi);
Interaction scale_interaction(const Interaction& phi, Complex factor);
Interaction add_interactions(const Interaction& a, const Interaction& b);

// Realizes one anchor, shifted by `shift` and torus-wrapped, on the window.
Matrix realize_anchor(const FockContext& ctx, const AnchorTerm& anchor, const IntVector& shift);

// sup_{x,y} sum_{Z containing both} ||Phi_Z|| / F(x,y); exact finite sum.
double interaction_norm(const Interaction& phi, const DecayFunction& f);

bool interactions_equal(const Interaction& a, const Interaction& b, double tol = 1e-12);
bool interaction_is_selfadjoint(const Interaction& phi, double tol = 1e-12);

// U_L^Phi: every anchor translated over the window, torus-wrapped, each
// distinct translated subset summed once.
LocalOperator local_hamiltonian(const Interaction& phi, const FockContext& ctx);

// Per-site energy element e_Phi = sum_{Z ni 0} Phi_Z / |Z|.
LocalOperator energy_per_site_element(const Interaction& phi, const FockContext& ctx);

// delta_L^Phi(A) = i [U_L^Phi, A].
LocalOperator derivation(const Interaction& phi, const FockContext& ctx, const LocalOperator& a);
Matrix derivation(const Matrix& hamiltonian, const Matrix& a);

}  // namespace mflab
