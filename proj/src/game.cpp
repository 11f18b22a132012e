#include "mflab/game.hpp"
#include "mflab/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace mflab {

namespace {

Complex fast_trace_product(const Matrix& a, const Matrix& b) {
  return a.transpose().cwiseProduct(b).sum();  // tr(ab) without forming ab
}

}  // namespace

double weighted_norm(const LongRangeModel& m, const Vector& x) {
  double s = 0.0;
  for (int k = 0; k < m.n_terms(); ++k) s += std::abs(m.terms[k].gamma) * std::norm(x[k]);
  return std::sqrt(s);
}

double repulsive_norm_sq(const LongRangeModel& m, const Vector& c) {
  double s = 0.0;
  for (int k = 0; k < m.n_terms(); ++k)
    if (m.terms[k].gamma > 0.0) s += m.terms[k].gamma * std::norm(c[k]);
  return s;
}

double attractive_norm_sq(const LongRangeModel& m, const Vector& c) {
  double s = 0.0;
  for (int k = 0; k < m.n_terms(); ++k)
    if (m.terms[k].gamma < 0.0) s += -m.terms[k].gamma * std::norm(c[k]);
  return s;
}

Vector expectation_coefficients(const ModelOperators& ops, const Matrix& rho) {
  Vector e(static_cast<Eigen::Index>(ops.u_psi.size()));
  for (size_t k = 0; k < ops.u_psi.size(); ++k)
    e[static_cast<Eigen::Index>(k)] = fast_trace_product(rho, ops.u_psi[k]) / ops.volume;
  return e;
}

Interaction approximating_interaction(const LongRangeModel& m, const Vector& c) {
  if (c.size() != m.n_terms())
    throw Error(ErrorCode::LengthMismatch, "coefficient vector has length " +
                                               std::to_string(c.size()) + ", model has " +
                                               std::to_string(m.n_terms()) + " terms");
  Interaction out = m.phi;
  for (int k = 0; k < m.n_terms(); ++k) {
    const auto& t = m.terms[k];
    out = add_interactions(out, scale_interaction(t.psi, t.gamma * std::conj(c[k])));
    out = add_interactions(out, scale_interaction(adjoint_interaction(t.psi), t.gamma * c[k]));
  }
  return out;
}

Matrix approx_hamiltonian(const LongRangeModel& m, const ModelOperators& ops, const Vector& c) {
  if (c.size() != static_cast<Eigen::Index>(ops.u_psi.size()))
    throw Error(ErrorCode::LengthMismatch, "coefficient vector does not match the term list");
  Matrix h = ops.u_phi;
  for (int k = 0; k < m.n_terms(); ++k) {
    h += (m.terms[k].gamma * std::conj(c[k])) * ops.u_psi[k];
    h += (m.terms[k].gamma * c[k]) * ops.u_psi[k].adjoint();
  }
  return h;
}

double approx_pressure(const LongRangeModel& m, const Vector& c, double beta,
                       const FockContext& ctx) {
  return pressure(local_hamiltonian(approximating_interaction(m, c), ctx).mat, beta, ctx);
}

double game_value(const LongRangeModel& m, const ModelOperators& ops, const Vector& c,
                  double beta) {
  Matrix h = approx_hamiltonian(m, ops, c);
  Spectrum s = eig_hermitian(h, /*with_vectors=*/false);
  double p = pressure_from_spectrum(s.eigenvalues, beta, ops.volume);
  return -repulsive_norm_sq(m, c) + attractive_norm_sq(m, c) - p;
}

double game_value(const LongRangeModel& m, const Vector& c_minus, const Vector& c_plus,
                  double beta, const FockContext& ctx) {
  ModelOperators ops = build_model_operators(m, ctx);
  return game_value(m, ops, Vector(c_minus + c_plus), beta);
}

namespace {

struct IterationResult {
  Vector c;
  Vector e;          // e(omega_c) at the final iterate
  double residual = 0.0;
  double pressure = 0.0;
  int iterations = 0;
  bool converged = false;
  int absorbed_into = -1;
};

// Damped fixed-point iteration on the coordinates selected by `update`;
// the others stay frozen at their initial values.
IterationResult damped_iteration(const LongRangeModel& m, const ModelOperators& ops, double beta,
                                 Vector c, const std::vector<bool>& update,
                                 const GameSolverOptions& opts,
                                 const std::vector<Vector>* absorb_targets = nullptr) {
  IterationResult res;
  for (int it = 0; it <= opts.max_iterations; ++it) {
    Matrix h = approx_hamiltonian(m, ops, c);
    Spectrum spec = eig_hermitian(h);
    res.pressure = pressure_from_spectrum(spec.eigenvalues, beta, ops.volume);
    const double shift = spec.eigenvalues.minCoeff();
    RealVector w = (-beta * (spec.eigenvalues.array() - shift)).exp();
    w /= w.sum();
    Matrix rho = apply_spectral_function(spec, w);
    Vector e = expectation_coefficients(ops, rho);

    Vector diff = Vector::Zero(c.size());
    for (Eigen::Index k = 0; k < c.size(); ++k)
      if (update[static_cast<size_t>(k)]) diff[k] = e[k] - c[k];
    res.residual = weighted_norm(m, diff);
    res.iterations = it;
    res.c = c;
    res.e = e;
    if (res.residual <= opts.fp_tol) {
      res.converged = true;
      return res;
    }
    if (absorb_targets) {
      for (size_t j = 0; j < absorb_targets->size(); ++j) {
        if (weighted_norm(m, Vector(c - (*absorb_targets)[j])) <= opts.cluster_tol) {
          res.absorbed_into = static_cast<int>(j);
          return res;
        }
      }
    }
    for (Eigen::Index k = 0; k < c.size(); ++k)
      if (update[static_cast<size_t>(k)]) c[k] = (1.0 - opts.damping) * c[k] + opts.damping * e[k];
  }
  return res;
}

std::vector<int> independent_indices(const LongRangeModel& m) {
  std::vector<int> idx;
  for (int k = 0; k < m.n_terms(); ++k)
    if (m.adjoint_partner[k] >= k) idx.push_back(k);
  return idx;
}

void fill_conjugate_partners(const LongRangeModel& m, Vector& c) {
  for (int k = 0; k < m.n_terms(); ++k) {
    int p = m.adjoint_partner[k];
    if (p > k) c[p] = std::conj(c[k]);
  }
}

bool lex_complex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
    if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
  }
  return a.size() < b.size();
}

}  // namespace

Vector decision_rule(const LongRangeModel& m, const ModelOperators& ops, const Vector& c_minus,
                     double beta, const GameSolverOptions& opts) {
  HahnSplit split = hahn_split(m);
  Vector c = Vector::Zero(m.n_terms());
  if (split.repulsive.empty()) return c;  // r_+ = 0
  for (int k : split.attractive) c[k] = c_minus[k];
  std::vector<bool> update(m.n_terms(), false);
  for (int k : split.repulsive) update[k] = true;

  IterationResult res = damped_iteration(m, ops, beta, c, update, opts);
  if (!res.converged)
    throw Error(ErrorCode::NoConvergence, "decision rule residual " + std::to_string(res.residual) +
                                              " after " + std::to_string(res.iterations) +
                                              " iterations");
  Vector c_plus = Vector::Zero(m.n_terms());
  for (int k : split.repulsive) c_plus[k] = res.c[k];

  const double f_star = game_value(m, ops, Vector(c_minus + c_plus), beta);
  auto rng = seeded_engine(opts.seed, 101);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = 0.05 * (1.0 + c_plus.norm());
  for (int trial = 0; trial < 8; ++trial) {
    Vector perturbed = c_plus;
    for (int k : split.repulsive) perturbed[k] += scale * Complex(gauss(rng), gauss(rng));
    double f = game_value(m, ops, Vector(c_minus + perturbed), beta);
    if (f > f_star + 1e-10 * (1.0 + std::abs(f_star)))
      throw Error(ErrorCode::MaximalityCheckFailed,
                  "perturbation raised the inner objective by " + std::to_string(f - f_star));
  }
  return c_plus;
}

std::vector<GapSolution> gap_fixed_point(const LongRangeModel& m, const ModelOperators& ops,
                                         double beta, const GameSolverOptions& opts) {
  const int K = m.n_terms();
  std::vector<GapSolution> solutions;
  if (K == 0) {
    GapSolution sol;
    sol.c = Vector(0);
    Spectrum s = eig_hermitian(ops.u_phi, /*with_vectors=*/false);
    sol.pressure_value = pressure_from_spectrum(s.eigenvalues, beta, ops.volume);
    sol.game_val = -sol.pressure_value;
    sol.branch = "normal";
    sol.converged = true;
    solutions.push_back(std::move(sol));
    return solutions;
  }
  std::vector<bool> update(K, true);
  std::vector<Vector> cluster_reps;
  const double radius = std::max(m.model_norm(), 1.0);
  auto indep = independent_indices(m);

  for (int start = 0; start < std::max(opts.restarts, 1); ++start) {
    Vector c0 = Vector::Zero(K);
    std::uint64_t restart_seed = split_seed(opts.seed, static_cast<std::uint64_t>(start));
    if (start > 0) {
      auto rng = std::mt19937_64(restart_seed);
      std::uniform_real_distribution<double> uni(-1.0, 1.0);
      for (int k : indep) {
        if (m.adjoint_partner[k] == k) {
          c0[k] = radius * uni(rng);
        } else {
          double re = radius * uni(rng), im = radius * uni(rng);
          c0[k] = Complex(re, im);
        }
      }
      fill_conjugate_partners(m, c0);
    }
    IterationResult res =
        damped_iteration(m, ops, beta, c0, update, opts, &cluster_reps);
    GapSolution sol;
    sol.c = res.c;
    sol.residual = res.residual;
    sol.iterations = res.iterations;
    sol.converged = res.converged;
    sol.damping = opts.damping;
    sol.restart_seed = restart_seed;
    sol.absorbed_into = res.absorbed_into;
    if (res.converged) {
      bool is_new = true;
      for (size_t j = 0; j < cluster_reps.size(); ++j) {
        if (weighted_norm(m, Vector(res.c - cluster_reps[j])) <= opts.cluster_tol) {
          sol.absorbed_into = static_cast<int>(j);
          is_new = false;
          break;
        }
      }
      if (is_new) {
        cluster_reps.push_back(res.c);
        sol.pressure_value = res.pressure;
        sol.game_val = game_value(m, ops, res.c, beta);
        sol.branch = weighted_norm(m, res.c) <= 1e-6 ? "normal"
                                                     : "ordered-" + std::to_string(cluster_reps.size() - 1);
        solutions.push_back(std::move(sol));
        continue;
      }
    }
    // Absorbed or unconverged starts are kept in the trace with no new branch.
    solutions.push_back(std::move(sol));
  }
  std::stable_sort(solutions.begin(), solutions.end(), [&](const GapSolution& a, const GapSolution& b) {
    bool na = a.converged && a.absorbed_into < 0, nb = b.converged && b.absorbed_into < 0;
    if (na != nb) return na;
    if (na && nb) {
      if (a.game_val != b.game_val) return a.game_val < b.game_val;
      return lex_complex_less(a.c, b.c);
    }
    return false;
  });
  return solutions;
}

std::vector<GapSolution> gap_fixed_point(const LongRangeModel& m, const FockContext& ctx,
                                         double beta, const GameSolverOptions& opts) {
  ModelOperators ops = build_model_operators(m, ctx);
  return gap_fixed_point(m, ops, beta, opts);
}

namespace {

std::vector<GapSolution> distinct_solutions(const std::vector<GapSolution>& all) {
  std::vector<GapSolution> out;
  for (const auto& s : all)
    if (s.converged && s.absorbed_into < 0) out.push_back(s);
  return out;
}

}  // namespace

ConservativeSet conservative_set(const LongRangeModel& m, const FockContext& ctx, double beta,
                                 const GameSolverOptions& opts) {
  ModelOperators ops = build_model_operators(m, ctx);
  HahnSplit split = hahn_split(m);
  ConservativeSet cons;

  if (m.n_terms() == 0) {
    cons.strategies.push_back(Vector(0));
    cons.full_points.push_back(Vector(0));
    Spectrum s = eig_hermitian(ops.u_phi, /*with_vectors=*/false);
    cons.minmax_pressure = pressure_from_spectrum(s.eigenvalues, beta, ops.volume);
    cons.game_value = -cons.minmax_pressure;
    return cons;
  }
  if (split.attractive.empty()) {
    // Purely repulsive: C_m = {0}.
    Vector zero = Vector::Zero(m.n_terms());
    Vector r = decision_rule(m, ops, zero, beta, opts);
    cons.strategies.push_back(zero);
    cons.full_points.push_back(r);
    cons.game_value = game_value(m, ops, r, beta);
    cons.minmax_pressure = -cons.game_value;
    return cons;
  }

  cons.solutions = gap_fixed_point(m, ops, beta, opts);
  struct Candidate {
    Vector d_minus;
    Vector full;
    double value;
  };
  std::vector<Candidate> candidates;
  auto add_candidate = [&](const Vector& c) {
    Vector d_minus = Vector::Zero(m.n_terms());
    for (int k : split.attractive) d_minus[k] = c[k];
    for (const auto& existing : candidates)
      if (weighted_norm(m, Vector(existing.d_minus - d_minus)) <= opts.cluster_tol) return;
    Vector r = decision_rule(m, ops, d_minus, beta, opts);
    Vector full = d_minus + r;
    candidates.push_back({d_minus, full, game_value(m, ops, full, beta)});
  };
  for (const auto& s : distinct_solutions(cons.solutions)) add_candidate(s.c);

  // Coarse safety scan over the independent attractive amplitudes.
  std::vector<int> indep_attr;
  for (int k : independent_indices(m))
    if (m.terms[k].gamma < 0.0) indep_attr.push_back(k);
  if (!indep_attr.empty() && indep_attr.size() <= 2) {
    const double radius = std::max(m.model_norm(), 1.0);
    std::vector<double> axis;
    for (double v = -radius; v <= radius + 1e-12; v += opts.coarse_step) axis.push_back(v);
    std::vector<size_t> idx(indep_attr.size(), 0);
    double best_candidate = candidates.empty() ? 1e300 : candidates.front().value;
    for (const auto& cand : candidates) best_candidate = std::min(best_candidate, cand.value);
    while (true) {
      Vector d = Vector::Zero(m.n_terms());
      for (size_t i = 0; i < indep_attr.size(); ++i) d[indep_attr[i]] = axis[idx[i]];
      fill_conjugate_partners(m, d);
      Vector d_minus = Vector::Zero(m.n_terms());
      for (int k : split.attractive) d_minus[k] = d[k];
      Vector r = decision_rule(m, ops, d_minus, beta, opts);
      double v = game_value(m, ops, Vector(d_minus + r), beta);
      if (v < best_candidate - 1e-7) {
        // The scan beat every fixed point; polish from here.
        std::vector<bool> update(m.n_terms(), true);
        IterationResult res =
            damped_iteration(m, ops, beta, Vector(d_minus + r), update, opts);
        if (res.converged) {
          add_candidate(res.c);
          for (const auto& cand : candidates) best_candidate = std::min(best_candidate, cand.value);
        }
      }
      size_t i = 0;
      for (; i < idx.size(); ++i) {
        if (++idx[i] < axis.size()) break;
        idx[i] = 0;
      }
      if (i == idx.size()) break;
    }
  }
  if (candidates.empty())
    throw Error(ErrorCode::NoConvergence, "no conservative-strategy candidate converged");

  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value < b.value;
    return lex_complex_less(a.d_minus, b.d_minus);
  });
  cons.game_value = candidates.front().value;
  cons.minmax_pressure = -cons.game_value;
  for (const auto& cand : candidates)
    if (cand.value <= cons.game_value + 1e-6) {
      cons.strategies.push_back(cand.d_minus);
      cons.full_points.push_back(cand.full);
    }
  return cons;
}

MinmaxReport minmax_pressure(const LongRangeModel& m, const FockContext& ctx, double beta,
                             const GameSolverOptions& opts) {
  MinmaxReport rep;
  rep.minmax_pressure = conservative_set(m, ctx, beta, opts).minmax_pressure;
  rep.direct_pressure = pressure_lr(m, beta, ctx);
  rep.residual = std::abs(rep.minmax_pressure - rep.direct_pressure);
  return rep;
}

double bogoliubov_residual(const ThermalState& rho, const LongRangeModel& m,
                           const ModelOperators& ops, const ConservativeSet& cons) {
  if (m.n_terms() == 0) return 0.0;  // the gap equality holds trivially
  Vector e = expectation_coefficients(ops, rho.rho);
  double best = 1e300;
  for (const auto& point : cons.full_points)
    best = std::min(best, weighted_norm(m, Vector(e - point)));
  return best;
}

double bogoliubov_residual(const ThermalState& rho, const LongRangeModel& m,
                           const FockContext& ctx, double beta, const GameSolverOptions& opts) {
  ModelOperators ops = build_model_operators(m, ctx);
  return bogoliubov_residual(rho, m, ops, conservative_set(m, ctx, beta, opts));
}

namespace {

Matrix even_projection(const Matrix& a) {
  Matrix out = a;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      int pi = std::popcount(static_cast<std::uint64_t>(i)) % 2;
      int pj = std::popcount(static_cast<std::uint64_t>(j)) % 2;
      if (pi != pj) out(i, j) = 0.0;
    }
  return out;
}

}  // namespace

SelfConsistentKmsReport selfconsistent_kms_check(const ThermalState& rho, const LongRangeModel& m,
                                                 const ModelOperators& ops, double beta,
                                                 int panel_size, std::uint64_t seed) {
  SelfConsistentKmsReport rep;
  rep.coefficients = expectation_coefficients(ops, rho.rho);
  Matrix h = approx_hamiltonian(m, ops, rep.coefficients);
  auto rng = seeded_engine(seed, 211);
  for (int i = 0; i < panel_size; ++i) {
    Matrix a = even_projection(random_matrix(ops.fock_dim, rng));
    Matrix b = even_projection(random_matrix(ops.fock_dim, rng));
    KmsResidual r = kms_boundary_residual(rho, h, beta, a, b);
    rep.max_residual = std::max(rep.max_residual, r.residual);
    rep.gibbs_of_generator = rep.gibbs_of_generator && r.gibbs_of_generator;
  }
  return rep;
}

GameSurface brute_force_game_oracle(const LongRangeModel& m, const FockContext& ctx, double beta,
                                    const GameGridSpec& grid) {
  ModelOperators ops = build_model_operators(m, ctx);
  GameSurface surf;
  surf.independent_indices = independent_indices(m);
  if (surf.independent_indices.empty()) {
    Vector c = Vector::Zero(m.n_terms());
    surf.points.push_back(c);
    surf.values.push_back(game_value(m, ops, c, beta));
    surf.minmax_value = surf.values[0];
    surf.minmax_pressure = -surf.minmax_value;
    surf.argmin = c;
    surf.stationary_points.push_back(c);
    return surf;
  }
  if (surf.independent_indices.size() > 2)
    throw Error(ErrorCode::GridTooLarge, "grid oracle is capped at 2 independent amplitudes");

  // Axis values per independent coordinate. With a single phase the signed
  // real line is scanned; otherwise amplitude x phase polar cells.
  std::vector<std::vector<Complex>> axes;
  std::vector<bool> axis_attractive;
  for (int k : surf.independent_indices) {
    std::vector<Complex> axis;
    if (grid.phases <= 1 || m.adjoint_partner[k] == k) {
      long n = std::lround(grid.radius / grid.step);
      for (long i = -n; i <= n; ++i) axis.push_back(Complex(static_cast<double>(i) * grid.step, 0.0));
    } else {
      long n = std::lround(grid.radius / grid.step);
      axis.push_back(0.0);
      for (long i = 1; i <= n; ++i)
        for (int ph = 0; ph < grid.phases; ++ph) {
          double angle = 2.0 * M_PI * ph / grid.phases;
          axis.push_back(std::polar(static_cast<double>(i) * grid.step, angle));
        }
    }
    axes.push_back(std::move(axis));
    axis_attractive.push_back(m.terms[k].gamma < 0.0);
  }
  long cells = 1;
  for (const auto& axis : axes) {
    cells *= static_cast<long>(axis.size());
    if (cells > grid.cell_cap)
      throw Error(ErrorCode::GridTooLarge,
                  "grid has more than " + std::to_string(grid.cell_cap) + " cells");
  }

  std::vector<size_t> attr_axes, rep_axes;
  for (size_t i = 0; i < axes.size(); ++i)
    (axis_attractive[i] ? attr_axes : rep_axes).push_back(i);

  auto assemble = [&](const std::vector<size_t>& idx) {
    Vector c = Vector::Zero(m.n_terms());
    for (size_t i = 0; i < axes.size(); ++i) c[surf.independent_indices[i]] = axes[i][idx[i]];
    fill_conjugate_partners(m, c);
    return c;
  };

  // Enumerate the full product grid, recording f; reduce over repulsive axes
  // by max, then over attractive axes by min.
  std::vector<size_t> shape;
  for (const auto& axis : axes) shape.push_back(axis.size());
  std::vector<size_t> idx(axes.size(), 0);
  std::vector<double> values(static_cast<size_t>(cells));
  std::vector<Vector> points(static_cast<size_t>(cells));
  size_t flat = 0;
  while (true) {
    Vector c = assemble(idx);
    points[flat] = c;
    values[flat] = game_value(m, ops, c, beta);
    ++flat;
    size_t i = 0;
    for (; i < idx.size(); ++i) {
      if (++idx[i] < shape[i]) break;
      idx[i] = 0;
    }
    if (i == idx.size()) break;
  }
  surf.points = points;
  surf.values = values;

  auto flatten = [&](const std::vector<size_t>& index) {
    size_t f = 0, strided = 1;
    for (size_t i = 0; i < index.size(); ++i) {
      f += index[i] * strided;
      strided *= shape[i];
    }
    return f;
  };

  // g(attr cell) = max over repulsive cells; track the maximizer.
  size_t attr_cells = 1, rep_cells = 1;
  for (size_t i : attr_axes) attr_cells *= shape[i];
  for (size_t i : rep_axes) rep_cells *= shape[i];
  std::vector<double> g(attr_cells, -1e300);
  std::vector<size_t> g_arg(attr_cells, 0);
  for (size_t ai = 0; ai < attr_cells; ++ai) {
    std::vector<size_t> full_idx(axes.size(), 0);
    size_t rem = ai;
    for (size_t i : attr_axes) {
      full_idx[i] = rem % shape[i];
      rem /= shape[i];
    }
    for (size_t ri = 0; ri < rep_cells; ++ri) {
      size_t rrem = ri;
      for (size_t i : rep_axes) {
        full_idx[i] = rrem % shape[i];
        rrem /= shape[i];
      }
      size_t f = flatten(full_idx);
      if (values[f] > g[ai]) {
        g[ai] = values[f];
        g_arg[ai] = f;
      }
    }
  }
  size_t best_attr = 0;
  for (size_t ai = 1; ai < attr_cells; ++ai)
    if (g[ai] < g[best_attr]) best_attr = ai;
  surf.minmax_value = g[best_attr];
  surf.minmax_pressure = -surf.minmax_value;
  surf.argmin = points[g_arg[best_attr]];

  // Grid-stationary cells of g over the attractive axes: along every axis the
  // cell is a one-dimensional extremum. Minima, maxima, and saddles all
  // qualify, since gap fixed points land on any of them; boundary cells are
  // skipped.
  auto attr_multi = [&](size_t ai) {
    std::vector<size_t> mi(attr_axes.size());
    size_t rem = ai;
    for (size_t i = 0; i < attr_axes.size(); ++i) {
      mi[i] = rem % shape[attr_axes[i]];
      rem /= shape[attr_axes[i]];
    }
    return mi;
  };
  for (size_t ai = 0; ai < attr_cells; ++ai) {
    auto mi = attr_multi(ai);
    bool stationary = true;
    bool interior = true;
    for (size_t i = 0; i < attr_axes.size() && stationary; ++i) {
      if (shape[attr_axes[i]] < 3 || mi[i] == 0 || mi[i] + 1 >= shape[attr_axes[i]]) {
        interior = false;
        break;
      }
      size_t stride = 1;
      for (size_t j = 0; j < i; ++j) stride *= shape[attr_axes[j]];
      double d_left = g[ai - stride] - g[ai];
      double d_right = g[ai + stride] - g[ai];
      const double tol = 1e-14 * (1.0 + std::abs(g[ai]));
      bool axis_min = d_left >= -tol && d_right >= -tol;
      bool axis_max = d_left <= tol && d_right <= tol;
      stationary = axis_min || axis_max;
    }
    if (interior && stationary) surf.stationary_points.push_back(points[g_arg[ai]]);
  }
  return surf;
}

SimpleProbe simple_model_probe(const LongRangeModel& m, const FockContext& ctx, double beta,
                               double eps, const GameSolverOptions& opts) {
  SimpleProbe probe;
  probe.epsilon = eps;
  if (m.n_terms() == 0) {
    probe.clusters_plus = probe.clusters_minus = 1;
    probe.simple_flag = true;
    return probe;
  }
  Interaction field =
      add_interactions(m.terms[0].psi, adjoint_interaction(m.terms[0].psi));
  auto run = [&](double sign) {
    LongRangeModel shifted = m;
    shifted.phi = add_interactions(m.phi, scale_interaction(field, 0.5 * sign * eps));
    return gap_fixed_point(shifted, ctx, beta, opts);
  };
  auto plus = distinct_solutions(run(+1.0));
  auto minus = distinct_solutions(run(-1.0));
  probe.clusters_plus = static_cast<int>(plus.size());
  probe.clusters_minus = static_cast<int>(minus.size());
  if (!plus.empty() && !minus.empty())
    probe.branch_distance = weighted_norm(m, Vector(plus.front().c - minus.front().c));
  probe.simple_flag = probe.clusters_plus == 1 && probe.clusters_minus == 1 &&
                      probe.branch_distance <= 10.0 * std::sqrt(eps);
  return probe;
}

}  // namespace mflab
