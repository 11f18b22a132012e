#include "mflab/game.hpp"
#include "mflab/rng.hpp"
#include "models.hpp"

#include <doctest.h>

#include <cmath>

using namespace mflab;
using namespace testmodels;

namespace {

GameSolverOptions fast_opts(int restarts = 4) {
  GameSolverOptions opts;
  opts.restarts = restarts;
  opts.damping = 0.9;
  opts.seed = 17;
  return opts;
}

const GapSolution* lowest_branch(const std::vector<GapSolution>& sols) {
  const GapSolution* best = nullptr;
  for (const auto& s : sols) {
    if (!s.converged || s.absorbed_into >= 0) continue;
    if (!best || s.game_val < best->game_val) best = &s;
  }
  return best;
}

int distinct_count(const std::vector<GapSolution>& sols) {
  int n = 0;
  for (const auto& s : sols)
    if (s.converged && s.absorbed_into < 0) ++n;
  return n;
}

}  // namespace

TEST_CASE("approximating interaction reduces and linearizes") {
  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  FockContext ctx = build_fock_context(1, 1, {"up", "dn"});
  ModelOperators ops = build_model_operators(bcs, ctx);

  Vector zero = Vector::Zero(2);
  CHECK(interactions_equal(approximating_interaction(bcs, zero), bcs.phi));

  LongRangeModel sr = short_range_only(hopping_chain(1.0, {"up"}));
  CHECK(interactions_equal(approximating_interaction(sr, Vector(0)), sr.phi));

  // anchor-level route equals the cached-operator route, and equals the
  // explicit linearized pairing field on the window
  Vector c(2);
  c << Complex(0.3, -0.2), Complex(0.3, 0.2);
  Matrix via_anchors = local_hamiltonian(approximating_interaction(bcs, c), ctx).mat;
  Matrix via_ops = approx_hamiltonian(bcs, ops, c);
  CHECK((via_anchors - via_ops).cwiseAbs().maxCoeff() <= 1e-12);
  Matrix b = ops.u_psi[0];
  Matrix field = ops.u_phi - 4.0 * (std::conj(c[0]) * b + c[0] * b.adjoint()) -
                 4.0 * (std::conj(c[1]) * b.adjoint() + c[1] * b);
  CHECK((via_ops - field).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(hermiticity_residual(via_ops) <= 1e-12);

  Vector wrong(3);
  wrong.setZero();
  CHECK_THROWS_AS((void)approximating_interaction(bcs, wrong), Error);
}

TEST_CASE("approx pressure closed form and convexity along real lines") {
  LongRangeModel free_model = short_range_only(Interaction(1));
  FockContext ctx = build_fock_context(1, 0, {"up", "dn"});
  CHECK(approx_pressure(free_model, Vector(0), 1.0, ctx) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-13));

  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  FockContext c1 = build_fock_context(1, 1, {"up", "dn"});
  auto p_at = [&](double amp) {
    Vector c(2);
    c << Complex(amp, 0.0), Complex(amp, 0.0);
    return approx_pressure(bcs, c, 1.0, c1);
  };
  for (double amp : {-0.5, -0.1, 0.2, 0.6}) {
    double h = 0.05;
    double second = p_at(amp + h) + p_at(amp - h) - 2.0 * p_at(amp);
    CHECK(second >= -1e-8);
  }
}

TEST_CASE("game value at zero is minus the short-range pressure") {
  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  FockContext ctx = build_fock_context(1, 1, {"up", "dn"});
  ModelOperators ops = build_model_operators(bcs, ctx);
  Vector zero = Vector::Zero(2);
  CHECK(game_value(bcs, ops, zero, 1.0) ==
        doctest::Approx(-pressure(bcs.phi, 1.0, ctx)).epsilon(1e-12));
}

TEST_CASE("decision rule of attractive models is the zero strategy") {
  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  FockContext ctx = build_fock_context(1, 0, {"up", "dn"});
  ModelOperators ops = build_model_operators(bcs, ctx);
  Vector c_minus = Vector::Zero(2);
  c_minus[0] = Complex(0.3, 0.1);
  c_minus[1] = std::conj(c_minus[0]);
  Vector r = decision_rule(bcs, ops, c_minus, 1.0, fast_opts());
  CHECK(r.norm() == 0.0);
}

TEST_CASE("decision rule matches a grid argmax on a repulsive toy") {
  LongRangeModel rep = repulsive_model(2.0, 1.0);
  FockContext ctx = build_fock_context(1, 0, {"up", "dn"});
  ModelOperators ops = build_model_operators(rep, ctx);
  Vector zero = Vector::Zero(1);
  Vector r = decision_rule(rep, ops, zero, 1.0, fast_opts());

  // brute-force scan of the inner objective over the real line
  double best_amp = 0.0, best_val = -1e300;
  for (double amp = -2.0; amp <= 2.0 + 1e-12; amp += 0.01) {
    Vector c(1);
    c[0] = amp;
    double v = game_value(rep, ops, c, 1.0);
    if (v > best_val) {
      best_val = v;
      best_amp = amp;
    }
  }
  CHECK(std::abs(r[0].real() - best_amp) <= 0.01 + 1e-9);
  CHECK(std::abs(r[0].imag()) <= 1e-9);

  // optimality against random strategies
  auto rng = seeded_engine(71, 0);
  std::normal_distribution<double> gauss(0.0, 0.5);
  double f_star = game_value(rep, ops, r, 1.0);
  for (int i = 0; i < 20; ++i) {
    Vector c(1);
    c[0] = Complex(gauss(rng), gauss(rng));
    CHECK(f_star >= game_value(rep, ops, c, 1.0) - 1e-10);
  }
}

TEST_CASE("decision rule responds continuously on a mixed model") {
  std::vector<LongRangeTerm> terms;
  terms.push_back({pair_annihilation(), -1.5});
  terms.push_back({spin_imbalance(), 0.8});
  LongRangeModel mixed = make_long_range_model(chemical_potential(0.5, {"up", "dn"}),
                                               std::move(terms), default_decay());
  FockContext ctx = build_fock_context(1, 0, {"up", "dn"});
  ModelOperators ops = build_model_operators(mixed, ctx);
  HahnSplit split = hahn_split(mixed);
  CHECK(split.model_class == ModelClass::Mixed);

  Vector c_minus = Vector::Zero(mixed.n_terms());
  for (int k : split.attractive) c_minus[k] = 0.2;
  Vector r0 = decision_rule(mixed, ops, c_minus, 1.0, fast_opts());
  const double h = 1e-3;
  Vector c_shift = c_minus;
  for (int k : split.attractive) c_shift[k] += h;
  Vector r1 = decision_rule(mixed, ops, c_shift, 1.0, fast_opts());
  double lipschitz = weighted_norm(mixed, Vector(r1 - r0)) / h;
  CHECK(lipschitz < 100.0);
}

TEST_CASE("gap fixed point: trivial, normal, and paired branches") {
  // K = 0 collapses to the short-range pressure
  LongRangeModel sr = short_range_only(hopping_chain(1.0, {"up"}));
  FockContext c_sr = build_fock_context(1, 1, {"up"});
  auto sols0 = gap_fixed_point(sr, c_sr, 1.0, fast_opts());
  REQUIRE(sols0.size() == 1);
  CHECK(sols0[0].c.size() == 0);
  CHECK(sols0[0].pressure_value == doctest::Approx(pressure(sr.phi, 1.0, c_sr)).epsilon(1e-13));

  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  FockContext ctx = build_fock_context(1, 1, {"up", "dn"});
  ModelOperators ops = build_model_operators(bcs, ctx);

  // high temperature: unique normal solution
  auto hot = gap_fixed_point(bcs, ops, 0.2, fast_opts(5));
  CHECK(distinct_count(hot) == 1);
  CHECK(weighted_norm(bcs, lowest_branch(hot)->c) <= 1e-6);

  // low temperature: a paired branch appears and wins
  auto cold = gap_fixed_point(bcs, ops, 1.0, fast_opts(5));
  CHECK(distinct_count(cold) >= 2);
  const GapSolution* best = lowest_branch(cold);
  CHECK(std::abs(best->c[0]) > 0.1);
  CHECK(best->residual <= 1e-9);
  CHECK(std::abs(best->c[1] - std::conj(best->c[0])) <= 1e-7);
  bool saw_normal = false;
  for (const auto& s : cold)
    if (s.converged && s.absorbed_into < 0 && weighted_norm(bcs, s.c) <= 1e-6) {
      saw_normal = true;
      CHECK(s.game_val > best->game_val);
    }
  CHECK(saw_normal);

  // accepted solutions are first-order stationary in every real coordinate
  const double h = 1e-4;
  for (int k = 0; k < bcs.n_terms(); ++k)
    for (int part = 0; part < 2; ++part) {
      Vector dc = Vector::Zero(bcs.n_terms());
      dc[k] = part == 0 ? Complex(h, 0.0) : Complex(0.0, h);
      double up = game_value(bcs, ops, Vector(best->c + dc), 1.0);
      double dn = game_value(bcs, ops, Vector(best->c - dc), 1.0);
      CHECK(std::abs(up - dn) / (2.0 * h) <= 1e-5);
    }
}

TEST_CASE("gauge covariance of the game value") {
  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  FockContext ctx = build_fock_context(1, 1, {"up", "dn"});
  ModelOperators ops = build_model_operators(bcs, ctx);
  Vector c(2);
  c << Complex(0.3, 0.1), Complex(0.3, -0.1);
  double base = game_value(bcs, ops, c, 1.0);
  for (double phi : {0.4, 1.1, 2.7}) {
    Vector rotated(2);
    rotated << c[0] * std::exp(Complex(0.0, phi)), c[1] * std::exp(Complex(0.0, -phi));
    CHECK(std::abs(game_value(bcs, ops, rotated, 1.0) - base) <= 1e-10);
  }
}

TEST_CASE("conservative set structure") {
  // purely repulsive: C_m = {0}
  LongRangeModel rep = repulsive_model(2.0, 1.0);
  FockContext ctx0 = build_fock_context(1, 0, {"up", "dn"});
  ConservativeSet cs = conservative_set(rep, ctx0, 1.0, fast_opts());
  REQUIRE(cs.strategies.size() == 1);
  CHECK(cs.strategies[0].norm() == 0.0);
  CHECK(cs.full_points[0].norm() > 0.0);  // r_+(0) is the self-consistent density

  // K = 0: the single empty strategy and the short-range pressure
  LongRangeModel sr = short_range_only(hopping_chain(1.0, {"up"}));
  FockContext c_sr = build_fock_context(1, 1, {"up"});
  ConservativeSet cs0 = conservative_set(sr, c_sr, 1.0, fast_opts());
  REQUIRE(cs0.strategies.size() == 1);
  CHECK(cs0.minmax_pressure == doctest::Approx(pressure(sr.phi, 1.0, c_sr)).epsilon(1e-13));

  // BCS: the conservative strategies sit on the paired branch
  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  FockContext ctx = build_fock_context(1, 1, {"up", "dn"});
  ConservativeSet cb = conservative_set(bcs, ctx, 1.0, fast_opts());
  ModelOperators ops = build_model_operators(bcs, ctx);
  auto sols = gap_fixed_point(bcs, ops, 1.0, fast_opts());
  const GapSolution* best = lowest_branch(sols);
  for (const auto& d : cb.full_points)
    CHECK(std::abs(weighted_norm(bcs, d) - weighted_norm(bcs, best->c)) <= 1e-6);
  CHECK(cb.game_value == doctest::Approx(best->game_val).epsilon(1e-9));
}

TEST_CASE("minmax pressure reduces exactly at K = 0") {
  LongRangeModel sr = short_range_only(hopping_chain(1.0, {"up"}));
  FockContext ctx = build_fock_context(1, 1, {"up"});
  MinmaxReport rep = minmax_pressure(sr, ctx, 1.0, fast_opts());
  CHECK(rep.residual <= 1e-12);
}

TEST_CASE("minmax residual shrinks with the window for the repulsive toy") {
  LongRangeModel rep = repulsive_model(2.0, 1.0);
  GameSolverOptions opts = fast_opts(2);
  double r0 = minmax_pressure(rep, build_fock_context(1, 0, {"up", "dn"}), 1.0, opts).residual;
  double r1 = minmax_pressure(rep, build_fock_context(1, 1, {"up", "dn"}), 1.0, opts).residual;
  CHECK(r1 < r0);
}

TEST_CASE("bogoliubov residual separates equilibrium from non-equilibrium") {
  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  FockContext ctx = build_fock_context(1, 1, {"up", "dn"});
  ModelOperators ops = build_model_operators(bcs, ctx);
  GameSolverOptions opts = fast_opts();
  ConservativeSet cs = conservative_set(bcs, ctx, 1.0, opts);

  // Gibbs at a conservative gap solution: residual within the solver tolerance
  ThermalState good = gibbs(approx_hamiltonian(bcs, ops, cs.full_points[0]), 1.0);
  CHECK(bogoliubov_residual(good, bcs, ops, cs) <= 1e-7);

  // tracial state at strong coupling: far from every conservative point
  ThermalState tr = tracial_state(ctx.fock_dim);
  CHECK(bogoliubov_residual(tr, bcs, ops, cs) > 0.1);

  // K = 0: zero by convention
  LongRangeModel sr = short_range_only(hopping_chain(1.0, {"up"}));
  FockContext c_sr = build_fock_context(1, 1, {"up"});
  ModelOperators ops_sr = build_model_operators(sr, c_sr);
  ConservativeSet cs_sr = conservative_set(sr, c_sr, 1.0, opts);
  CHECK(bogoliubov_residual(tracial_state(c_sr.fock_dim), sr, ops_sr, cs_sr) == 0.0);
}

TEST_CASE("self-consistent KMS check distinguishes the three state classes") {
  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  FockContext ctx = build_fock_context(1, 1, {"up", "dn"});
  ModelOperators ops = build_model_operators(bcs, ctx);
  GameSolverOptions opts = fast_opts();
  ConservativeSet cs = conservative_set(bcs, ctx, 1.0, opts);

  // (a) Gibbs at a conservative gap solution: self-consistently KMS and Bogoliubov
  ThermalState omega = gibbs(approx_hamiltonian(bcs, ops, cs.full_points[0]), 1.0);
  SelfConsistentKmsReport good = selfconsistent_kms_check(omega, bcs, ops, 1.0, 10, 5);
  CHECK(good.max_residual <= 1e-9);
  CHECK(bogoliubov_residual(omega, bcs, ops, cs) <= 1e-7);

  // (b) Gibbs at the non-conservative normal fixed point: KMS without Bogoliubov
  ThermalState normal = gibbs(ops.u_phi, 1.0);
  SelfConsistentKmsReport kms_only = selfconsistent_kms_check(normal, bcs, ops, 1.0, 10, 6);
  CHECK(kms_only.max_residual <= 1e-9);
  CHECK(bogoliubov_residual(normal, bcs, ops, cs) > 0.1);

  // (c) tracial state: fails the KMS side
  SelfConsistentKmsReport bad =
      selfconsistent_kms_check(tracial_state(ctx.fock_dim), bcs, ops, 1.0, 10, 7);
  CHECK(bad.max_residual > 1e-2);
  CHECK_FALSE(bad.gibbs_of_generator);
}

TEST_CASE("grid oracle agrees with the fixed-point solver") {
  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  FockContext ctx = build_fock_context(1, 1, {"up", "dn"});
  ModelOperators ops = build_model_operators(bcs, ctx);

  GameGridSpec grid;
  grid.radius = 1.0;
  grid.step = 0.01;
  GameSurface surf = brute_force_game_oracle(bcs, ctx, 1.0, grid);

  auto sols = gap_fixed_point(bcs, ops, 1.0, fast_opts());
  const GapSolution* best = lowest_branch(sols);
  CHECK(std::abs(std::abs(surf.argmin[0]) - std::abs(best->c[0])) <= 0.01 + 1e-9);
  CHECK(std::abs(surf.minmax_value - best->game_val) <= 1e-3);

  // the grid's local minima contain both stationary amplitudes (0 and the gap)
  bool has_zero = false, has_gap = false;
  for (const auto& p : surf.stationary_points) {
    if (std::abs(p[0]) <= 1e-12) has_zero = true;
    if (std::abs(std::abs(p[0]) - std::abs(best->c[0])) <= 0.01 + 1e-9) has_gap = true;
  }
  CHECK(has_zero);
  CHECK(has_gap);

  // K = 0: single cell holding -P_Phi
  LongRangeModel sr = short_range_only(hopping_chain(1.0, {"up"}));
  FockContext c_sr = build_fock_context(1, 1, {"up"});
  GameSurface flat = brute_force_game_oracle(sr, c_sr, 1.0, GameGridSpec{});
  CHECK(flat.values.size() == 1);
  CHECK(flat.minmax_pressure == doctest::Approx(pressure(sr.phi, 1.0, c_sr)).epsilon(1e-13));

  // phase invariance of the surface for the gauge-symmetric model
  Vector c(2);
  c << Complex(0.4, 0.0), Complex(0.4, 0.0);
  double base = game_value(bcs, ops, c, 1.0);
  for (int ph = 1; ph < 8; ++ph) {
    double angle = 2.0 * M_PI * ph / 8.0;
    Vector rot(2);
    rot << std::polar(0.4, angle), std::polar(0.4, -angle);
    CHECK(std::abs(game_value(bcs, ops, rot, 1.0) - base) <= 1e-10);
  }
}

TEST_CASE("grid oracle guards its dimension cap") {
  std::vector<LongRangeTerm> terms;
  terms.push_back({pair_annihilation(), -1.0});
  terms.push_back({spin_imbalance(), 1.0});
  Interaction third(1, "up-density");
  third.add_anchor({off1(0)}, {{1.0, {fac(0, "up", true), fac(0, "up", false)}}});
  terms.push_back({third, 0.5});
  LongRangeModel three =
      make_long_range_model(chemical_potential(0.0, {"up", "dn"}), std::move(terms),
                            default_decay());
  FockContext ctx = build_fock_context(1, 0, {"up", "dn"});
  CHECK(three.n_terms() == 4);  // pair term symmetrized
  CHECK_THROWS_AS((void)brute_force_game_oracle(three, ctx, 1.0, GameGridSpec{}), Error);

  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  GameGridSpec tiny;
  tiny.cell_cap = 10;
  CHECK_THROWS_AS((void)brute_force_game_oracle(bcs, ctx, 1.0, tiny), Error);
}

TEST_CASE("gap magnitude switches on across the pairing transition") {
  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  FockContext ctx = build_fock_context(1, 0, {"up", "dn"});
  ModelOperators ops = build_model_operators(bcs, ctx);
  std::vector<double> gaps;
  for (double beta : {0.25, 0.5, 0.75, 1.0, 1.5}) {
    auto sols = gap_fixed_point(bcs, ops, beta, fast_opts(3));
    gaps.push_back(weighted_norm(bcs, lowest_branch(sols)->c));
  }
  CHECK(gaps.front() <= 1e-6);
  CHECK(gaps.back() > 0.1);
  for (size_t i = 1; i < gaps.size(); ++i) CHECK(gaps[i] >= gaps[i - 1] - 1e-9);
}

TEST_CASE("simple-model probe runs and reports") {
  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  FockContext ctx = build_fock_context(1, 0, {"up", "dn"});
  SimpleProbe hot = simple_model_probe(bcs, ctx, 0.2, 1e-3, fast_opts(3));
  CHECK(hot.clusters_plus >= 1);
  CHECK(hot.clusters_minus >= 1);
  // high temperature: a unique branch continuous through zero field
  CHECK(hot.simple_flag);
}
