#include "mflab/longrange.hpp"
#include "mflab/rng.hpp"
#include "models.hpp"

#include <doctest.h>

#include <cmath>

using namespace mflab;
using namespace testmodels;

TEST_CASE("hahn split and classification") {
  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  HahnSplit s = hahn_split(bcs);
  CHECK(s.model_class == ModelClass::PurelyAttractive);
  CHECK(s.attractive.size() == 2);  // pair term plus its adjoint
  CHECK(s.repulsive.empty());
  CHECK(s.weight_attractive == doctest::Approx(8.0));

  LongRangeModel rep = repulsive_model(2.0, 0.5);
  CHECK(hahn_split(rep).model_class == ModelClass::PurelyRepulsive);

  LongRangeModel sr = short_range_only(hopping_chain(1.0, {"up"}));
  CHECK(hahn_split(sr).model_class == ModelClass::ShortRange);

  // mixed model reconciles |a| = |a_+| + |a_-|
  std::vector<LongRangeTerm> terms;
  terms.push_back({pair_annihilation(), -1.5});
  terms.push_back({spin_imbalance(), 0.5});
  LongRangeModel mixed =
      make_long_range_model(chemical_potential(1.0, {"up", "dn"}), std::move(terms),
                            default_decay());
  HahnSplit ms = hahn_split(mixed);
  CHECK(ms.model_class == ModelClass::Mixed);
  CHECK(ms.weight_attractive + ms.weight_repulsive ==
        doctest::Approx(mixed.measure_norm()).epsilon(1e-14));
}

TEST_CASE("model construction enforces the sphere and closes the measure") {
  // non-unit term is rejected
  Interaction two = scale_interaction(pair_annihilation(), 2.0);
  std::vector<LongRangeTerm> bad;
  bad.push_back({two, -1.0});
  CHECK_THROWS_AS(
      (void)make_long_range_model(chemical_potential(0.0, {"up", "dn"}), std::move(bad),
                                  default_decay()),
      Error);

  // pair term gets its adjoint partner appended
  SymmetrizationReport rep;
  std::vector<LongRangeTerm> terms;
  terms.push_back({pair_annihilation(), -4.0});
  LongRangeModel m = make_long_range_model(chemical_potential(1.0, {"up", "dn"}),
                                           std::move(terms), default_decay(), &rep);
  CHECK(rep.modified);
  CHECK(rep.terms_added == 1);
  CHECK(m.n_terms() == 2);
  CHECK(m.adjoint_partner[0] == 1);
  CHECK(m.adjoint_partner[1] == 0);
  CHECK(interactions_equal(m.terms[1].psi, adjoint_interaction(m.terms[0].psi)));

  // a self-adjoint term needs no partner
  SymmetrizationReport rep2;
  std::vector<LongRangeTerm> terms2;
  terms2.push_back({spin_imbalance(), 1.0});
  LongRangeModel m2 = make_long_range_model(chemical_potential(1.0, {"up", "dn"}),
                                            std::move(terms2), default_decay(), &rep2);
  CHECK_FALSE(rep2.modified);
  CHECK(m2.adjoint_partner[0] == 0);
}

TEST_CASE("long-range hamiltonian reduces and stays hermitian") {
  LongRangeModel sr = short_range_only(hopping_chain(1.0, {"up"}));
  FockContext ctx = build_fock_context(1, 1, {"up"});
  Matrix u_m = long_range_hamiltonian(sr, ctx).mat;
  Matrix u_phi = local_hamiltonian(sr.phi, ctx).mat;
  CHECK((u_m - u_phi).cwiseAbs().maxCoeff() == 0.0);

  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  FockContext ctx2 = build_fock_context(1, 1, {"up", "dn"});
  LocalOperator u = long_range_hamiltonian(bcs, ctx2);
  CHECK(hermiticity_residual(u.mat) <= 1e-13);
  CHECK(u.parity == Parity::Even);

  // single site: the mean-field part is gamma (B^* B + B B^*) with B the
  // on-site pair annihilation operator
  FockContext point = build_fock_context(1, 0, {"up", "dn"});
  Matrix u0 = long_range_hamiltonian(bcs, point).mat;
  Matrix b = realize_anchor(point, bcs.terms[0].psi.anchors()[0], off1(0));
  Matrix expected = local_hamiltonian(bcs.phi, point).mat -
                    4.0 * (b.adjoint() * b + b * b.adjoint());
  CHECK((u0 - expected).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("window hamiltonian is additive in the base and in the weights") {
  FockContext ctx = build_fock_context(1, 1, {"up", "dn"});
  Interaction hop = hopping_chain(1.0, {"up"});
  Interaction mu = chemical_potential(0.5, {"up", "dn"});
  Matrix separate = local_hamiltonian(hop, ctx).mat + local_hamiltonian(mu, ctx).mat;
  Matrix joint = local_hamiltonian(add_interactions(hop, mu), ctx).mat;
  CHECK((separate - joint).cwiseAbs().maxCoeff() <= 1e-13);

  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  LongRangeModel half = bcs_model(-2.0, 1.0);
  Matrix u_phi = local_hamiltonian(bcs.phi, ctx).mat;
  Matrix mean_field_full = long_range_hamiltonian(bcs, ctx).mat - u_phi;
  Matrix mean_field_half = long_range_hamiltonian(half, ctx).mat - u_phi;
  CHECK((mean_field_full - 2.0 * mean_field_half).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("model operator cache agrees with the direct construction") {
  LongRangeModel bcs = bcs_model(-3.0, 0.7);
  FockContext ctx = build_fock_context(1, 1, {"up", "dn"});
  ModelOperators ops = build_model_operators(bcs, ctx);
  CHECK((ops.u_model - long_range_hamiltonian(bcs, ctx).mat).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK(ops.volume == 3.0);
}

TEST_CASE("space-averaging functional bounds and linearity") {
  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  FockContext ctx = build_fock_context(1, 1, {"up", "dn"});
  ThermalState g = gibbs(long_range_hamiltonian(bcs, ctx).mat, 1.0);
  for (int ell : {0, 1}) {
    SpaceAvgReport rep = space_avg_functional(bcs, g, ell, ctx);
    for (size_t k = 0; k < rep.term_values.size(); ++k) {
      CHECK(rep.term_values[k] >= rep.lower_bounds[k] - 1e-10);
      CHECK(rep.term_values[k] <= rep.upper_bounds[k] + 1e-10);
    }
  }
  // flipping the weights flips the functional
  LongRangeModel flipped = bcs;
  for (auto& t : flipped.terms) t.gamma = -t.gamma;
  double plus = space_avg_functional(bcs, g, 1, ctx).value;
  double minus = space_avg_functional(flipped, g, 1, ctx).value;
  CHECK(plus == doctest::Approx(-minus).epsilon(1e-12));
}

TEST_CASE("space averages of a product state head toward the squared mean") {
  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  FockContext ctx = build_fock_context(1, 2, {"up", "dn"});
  ThermalState product = state_from_density(paired_product_state(ctx, 0.4));
  SpaceAvgReport at0 = space_avg_functional(bcs, product, 0, ctx);
  SpaceAvgReport at2 = space_avg_functional(bcs, product, 2, ctx);
  for (size_t k = 0; k < at0.term_values.size(); ++k) {
    double excess0 = at0.term_values[k] - at0.lower_bounds[k];
    double excess2 = at2.term_values[k] - at2.lower_bounds[k];
    CHECK(excess0 >= -1e-12);
    CHECK(excess2 <= 0.5 * excess0 + 1e-12);  // fluctuations die off like 1/|Lambda_ell|
  }
}

TEST_CASE("pressure of long-range models") {
  LongRangeModel free_model = short_range_only(Interaction(1));
  FockContext ctx = build_fock_context(1, 1, {"up", "dn"});
  CHECK(pressure_lr(free_model, 1.0, ctx) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-13));

  LongRangeModel sr = short_range_only(hopping_chain(1.0, {"up"}));
  FockContext c1 = build_fock_context(1, 1, {"up"});
  CHECK(pressure_lr(sr, 1.0, c1) == doctest::Approx(pressure(sr.phi, 1.0, c1)).epsilon(1e-14));

  // finite-size pressure sequence of the BCS model is reported per L
  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  std::vector<double> seq;
  for (int L : {0, 1, 2})
    seq.push_back(pressure_lr(bcs, 1.0, build_fock_context(1, L, {"up", "dn"})));
  CHECK(std::isfinite(seq[0]));
  CHECK(std::abs(seq[2] - seq[1]) < std::abs(seq[1] - seq[0]));
}

TEST_CASE("long-range free energy identity at ell = L") {
  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  FockContext ctx = build_fock_context(1, 1, {"up", "dn"});
  Matrix u_m = long_range_hamiltonian(bcs, ctx).mat;
  const double beta = 1.0;
  ThermalState g = gibbs(u_m, beta);

  double via_delta = lr_free_energy(bcs, g, beta, ctx.half_width, ctx);
  double plain = free_energy_density(g, u_m, beta, ctx);
  CHECK(via_delta == doctest::Approx(plain).epsilon(1e-10));
  CHECK(via_delta == doctest::Approx(-pressure_lr(bcs, beta, ctx)).epsilon(1e-10));

  // random states cannot beat the Gibbs value
  auto rng = seeded_engine(61, 0);
  for (int i = 0; i < 30; ++i) {
    ThermalState sample = state_from_density(random_density_matrix(ctx.fock_dim, rng));
    CHECK(lr_free_energy(bcs, sample, beta, ctx.half_width, ctx) >= via_delta - 1e-12);
  }

  // empty measure reduces to the short-range functional
  LongRangeModel sr = short_range_only(hopping_chain(1.0, {"up", "dn"}));
  ThermalState g2 = gibbs(local_hamiltonian(sr.phi, ctx).mat, beta);
  CHECK(lr_free_energy(sr, g2, beta, ctx.half_width, ctx) ==
        doctest::Approx(free_energy_density(g2, sr.phi, beta, ctx)).epsilon(1e-12));
}

TEST_CASE("window trace of on-site product models is L-independent") {
  LongRangeModel m = short_range_only(chemical_potential(0.8, {"up", "dn"}));
  WindowTraceReport rep = gibbs_window_trace(m, 1.0, {0, 1, 2}, 0, {"up", "dn"});
  CHECK(rep.distances.maxCoeff() <= 1e-12);
}

TEST_CASE("window trace of the BCS model tightens with L") {
  LongRangeModel bcs = bcs_model(-4.0, 1.0);
  WindowTraceReport rep = gibbs_window_trace(bcs, 1.0, {0, 1, 2}, 0, {"up", "dn"});
  double d01 = rep.distances(0, 1);
  double d12 = rep.distances(1, 2);
  CHECK(d12 < d01);
  CHECK_THROWS_AS((void)gibbs_window_trace(bcs, 1.0, {0, 1}, 1, {"up", "dn"}), Error);
}
