#include "mflab/modular.hpp"
#include "mflab/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace mflab;

TEST_CASE("S acts as the star operation on the algebra image of omega") {
  auto rng = seeded_engine(41, 0);
  Matrix h = random_hermitian(8, rng);
  // independent eigendecomposition of the density matrix itself
  ThermalState g = state_from_density(gibbs(h, 1.0).rho);
  ModularData md(g);
  Matrix omega = md.omega();
  for (int i = 0; i < 4; ++i) {
    Matrix a = md.represent(random_matrix(8, rng));
    Matrix lhs = md.apply_s(md.apply_pi(a, omega));
    Matrix rhs = md.apply_pi(Matrix(a.adjoint()), omega);
    CHECK((lhs - rhs).norm() <= 1e-10 * rhs.norm());
  }
  // S Omega = Omega
  CHECK((md.apply_s(omega) - omega).norm() <= 1e-12);
}

TEST_CASE("tracial state has trivial modular data") {
  ThermalState tr = tracial_state(8);
  ModularData md(tr);
  auto rng = seeded_engine(43, 0);
  Matrix y = random_matrix(8, rng);
  CHECK((md.apply_delta(y) - y).norm() <= 1e-12 * y.norm());
  Matrix a = random_matrix(8, rng);
  Matrix flow = md.modular_flow_of_pi(a, 0.37);
  CHECK((flow - md.represent(a)).norm() <= 1e-11 * a.norm());
}

TEST_CASE("modular operator matches the closed form through the basis change") {
  auto rng = seeded_engine(47, 0);
  Matrix h = random_hermitian(8, rng);
  ThermalState g = state_from_density(gibbs(h, 0.7).rho);
  ModularData md(g);
  CHECK(md.delta_identity_residual(5, 9) <= 1e-8);
}

TEST_CASE("modular flow undoes the rescaled Heisenberg dynamics") {
  FockContext ctx = build_fock_context(1, 0, {"s"});
  Matrix a_op = annihilation_matrix(ctx, 0);
  Matrix h = a_op.adjoint() * a_op;
  const double beta = 1.3;
  ThermalState g = state_from_density(gibbs(h, beta).rho, beta);
  ModularData md(g);
  auto rng = seeded_engine(53, 0);
  for (double t : {0.1, 1.0}) {
    Matrix a = random_matrix(2, rng);
    CHECK(md.modular_flow_residual(a, h, beta, t) <= 1e-10);
  }
}

TEST_CASE("modular flow on an interacting four-mode window") {
  auto rng = seeded_engine(59, 0);
  Matrix h = random_hermitian(16, rng);
  const double beta = 0.9;
  ThermalState g = state_from_density(gibbs(h, beta).rho, beta);
  ModularData md(g);
  for (double t : {0.1, 1.0}) {
    Matrix a = random_matrix(16, rng);
    CHECK(md.modular_flow_residual(a, h, beta, t) <= 1e-8 * operator_norm(a));
  }
  CHECK(md.jdj_residual(5, 1) <= 1e-8);
  CHECK(md.commutant_residual(5, 2) <= 1e-8);
}

TEST_CASE("faithfulness guard") {
  Vector psi = Vector::Zero(4);
  psi[0] = 1.0;
  ThermalState pure = state_from_density(psi * psi.adjoint());
  CHECK_THROWS_AS(ModularData md(pure), Error);
}
