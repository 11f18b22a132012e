#include "mflab/longrange.hpp"

#include <cmath>

namespace mflab {

double LongRangeModel::measure_norm() const {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.gamma);
  return s;
}

LongRangeModel make_long_range_model(Interaction phi, std::vector<LongRangeTerm> terms,
                                     const DecayFunction& f, SymmetrizationReport* report) {
  SymmetrizationReport rep;
  if (!interaction_is_selfadjoint(phi))
    throw Error(ErrorCode::ConfigInvalid, "base interaction must be self-adjoint");
  for (const auto& t : terms) {
    if (t.gamma == 0.0) throw Error(ErrorCode::ConfigInvalid, "term weights must be nonzero");
    double n = interaction_norm(t.psi, f);
    if (std::abs(n - 1.0) > 1e-10)
      throw Error(ErrorCode::ConfigInvalid,
                  "term '" + t.psi.label() + "' has W-norm " + std::to_string(n) + ", want 1");
  }
  // Close the list under the adjoint with equal weights.
  std::vector<Interaction> adjoints;
  adjoints.reserve(terms.size());
  for (const auto& t : terms) adjoints.push_back(adjoint_interaction(t.psi));
  std::vector<int> partner(terms.size(), -1);
  for (size_t k = 0; k < terms.size(); ++k) {
    if (partner[k] >= 0) continue;
    for (size_t j = k; j < terms.size(); ++j) {
      if (j > k && partner[j] >= 0) continue;
      if (terms[j].gamma == terms[k].gamma && interactions_equal(terms[j].psi, adjoints[k])) {
        partner[k] = static_cast<int>(j);
        partner[j] = static_cast<int>(k);
        break;
      }
    }
  }
  size_t original = terms.size();
  for (size_t k = 0; k < original; ++k) {
    if (partner[k] >= 0) continue;
    LongRangeTerm conj;
    conj.psi = adjoints[k];
    conj.psi.set_label(terms[k].psi.label().empty() ? "" : terms[k].psi.label() + "*");
    conj.gamma = terms[k].gamma;
    terms.push_back(std::move(conj));
    partner.push_back(static_cast<int>(k));
    partner[k] = static_cast<int>(terms.size() - 1);
    rep.modified = true;
    ++rep.terms_added;
  }
  LongRangeModel m;
  m.phi_norm = interaction_norm(phi, f);
  m.phi = std::move(phi);
  m.terms = std::move(terms);
  m.adjoint_partner = std::move(partner);
  if (report) *report = rep;
  return m;
}

const char* model_class_name(ModelClass c) {
  switch (c) {
    case ModelClass::ShortRange: return "short-range";
    case ModelClass::PurelyAttractive: return "purely-attractive";
    case ModelClass::PurelyRepulsive: return "purely-repulsive";
    case ModelClass::Mixed: return "mixed";
  }
  return "?";
}

HahnSplit hahn_split(const LongRangeModel& m) {
  HahnSplit split;
  for (int k = 0; k < m.n_terms(); ++k) {
    if (m.terms[k].gamma > 0.0) {
      split.repulsive.push_back(k);
      split.weight_repulsive += m.terms[k].gamma;
    } else {
      split.attractive.push_back(k);
      split.weight_attractive += -m.terms[k].gamma;
    }
  }
  if (m.terms.empty())
    split.model_class = ModelClass::ShortRange;
  else if (split.repulsive.empty())
    split.model_class = ModelClass::PurelyAttractive;
  else if (split.attractive.empty())
    split.model_class = ModelClass::PurelyRepulsive;
  else
    split.model_class = ModelClass::Mixed;
  return split;
}

ModelOperators build_model_operators(const LongRangeModel& m, const FockContext& ctx) {
  ModelOperators ops;
  ops.volume = static_cast<double>(ctx.n_sites);
  ops.fock_dim = ctx.fock_dim;
  ops.u_phi = local_hamiltonian(m.phi, ctx).mat;
  ops.u_psi.reserve(m.terms.size());
  for (const auto& t : m.terms) ops.u_psi.push_back(local_hamiltonian(t.psi, ctx).mat);
  ops.u_model = ops.u_phi;
  for (size_t k = 0; k < m.terms.size(); ++k)
    ops.u_model += (m.terms[k].gamma / ops.volume) * (ops.u_psi[k].adjoint() * ops.u_psi[k]);
  return ops;
}

LocalOperator long_range_hamiltonian(const LongRangeModel& m, const FockContext& ctx) {
  LocalOperator u_phi = local_hamiltonian(m.phi, ctx);
  Matrix h = u_phi.mat;
  std::vector<int> support = u_phi.support;
  const double volume = static_cast<double>(ctx.n_sites);
  for (const auto& t : m.terms) {
    LocalOperator u = local_hamiltonian(t.psi, ctx);
    h += (t.gamma / volume) * (u.mat.adjoint() * u.mat);
    support.insert(support.end(), u.support.begin(), u.support.end());
  }
  return make_local_operator(ctx, std::move(h), std::move(support));
}

SpaceAvgReport space_avg_functional(const LongRangeModel& m, const ThermalState& rho, int ell,
                                    const FockContext& ctx) {
  SpaceAvgReport rep;
  for (const auto& t : m.terms) {
    LocalOperator e = energy_per_site_element(t.psi, ctx);
    LocalOperator avg = space_average(ctx, e, ell);
    double second = rho.expectation(avg.mat.adjoint() * avg.mat).real();
    rep.term_values.push_back(second);
    rep.lower_bounds.push_back(std::norm(rho.expectation(e.mat)));
    rep.upper_bounds.push_back(std::pow(operator_norm(e.mat), 2));
    rep.value += t.gamma * second;
  }
  return rep;
}

double pressure_lr(const LongRangeModel& m, double beta, const FockContext& ctx) {
  return pressure(long_range_hamiltonian(m, ctx).mat, beta, ctx);
}

double lr_free_energy(const LongRangeModel& m, const ThermalState& rho, double beta, int ell,
                      const FockContext& ctx) {
  Matrix u_phi = local_hamiltonian(m.phi, ctx).mat;
  double delta = space_avg_functional(m, rho, ell, ctx).value;
  return delta + rho.expectation(u_phi).real() / static_cast<double>(ctx.n_sites) -
         entropy_density(rho, ctx) / beta;
}

WindowTraceReport gibbs_window_trace(const LongRangeModel& m, double beta,
                                     const std::vector<int>& widths, int ell,
                                     const std::vector<std::string>& spins, int mode_cap) {
  WindowTraceReport rep;
  rep.widths = widths;
  for (int L : widths) {
    if (ell > L)
      throw Error(ErrorCode::WindowTooSmall, "sub-window " + std::to_string(ell) +
                                                 " exceeds L=" + std::to_string(L));
    FockContext ctx = build_fock_context(m.dim(), L, spins, mode_cap);
    ThermalState g = gibbs(long_range_hamiltonian(m, ctx).mat, beta);
    rep.reduced.push_back(restrict_to_window(ctx, g.rho, ell));
  }
  const int n = static_cast<int>(rep.reduced.size());
  rep.distances = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d = trace_norm(rep.reduced[i] - rep.reduced[j]);
      rep.distances(i, j) = rep.distances(j, i) = d;
    }
  return rep;
}

}  // namespace mflab
