// mflab: finite-volume experiments on lattice-fermion mean-field models.
//
//   mflab <command> --config <path> [--out <dir>] [--seed <u64>] [--set key=value]...
//
// Commands: pressure, gap, game-surface, kms, modular, flow, stationarity,
// limit-trend, ergodicity, demo-gauge-twist, sweep, validate.
// Exit codes: 0 pass, 2 tolerance failure, 3 config error, 4 numeric failure.

#include "mflab/config.hpp"
#include "mflab/dynamics.hpp"
#include "mflab/modular.hpp"
#include "mflab/report.hpp"
#include "mflab/rng.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

using namespace mflab;

namespace {

struct CliArgs {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
};

CliArgs parse_cli(int argc, char** argv) {
  CliArgs args;
  if (argc < 2) throw Error(ErrorCode::ConfigInvalid, "usage: mflab <command> --config <path>");
  args.command = argv[1];
  for (int i = 2; i < argc; ++i) {
    std::string flag = argv[i];
    auto need_value = [&](const char* name) -> std::string {
      if (i + 1 >= argc) throw Error(ErrorCode::ConfigInvalid, std::string(name) + " needs a value");
      return argv[++i];
    };
    if (flag == "--config")
      args.config_path = need_value("--config");
    else if (flag == "--out")
      args.out_dir = need_value("--out");
    else if (flag == "--seed")
      args.overrides.push_back("run.seed=" + need_value("--seed"));
    else if (flag == "--set")
      args.overrides.push_back(need_value("--set"));
    else
      throw Error(ErrorCode::ConfigInvalid, "unknown flag '" + flag + "'");
  }
  if (args.config_path.empty()) throw Error(ErrorCode::ConfigInvalid, "--config is required");
  return args;
}

struct Run {
  ExperimentConfig cfg;
  LongRangeModel model;
  ModelBuildReport build_report;
  std::string out_dir;
  JsonValue report = JsonValue::object();
  JsonValue results = JsonValue::object();
  bool tolerance_failure = false;

  void note_failure(bool failed) { tolerance_failure = tolerance_failure || failed; }
};

JsonValue vector_json(const Vector& v) {
  JsonValue arr = JsonValue::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push(JsonValue::complex_number(v[i]));
  return arr;
}

JsonValue tolerance_table(const ExperimentConfig& cfg) {
  JsonValue t = JsonValue::object();
  t.set("fp_tol", JsonValue::number(cfg.solver.fp_tol));
  t.set("cluster_tol", JsonValue::number(cfg.solver.cluster_tol));
  t.set("kms_boundary", JsonValue::number(1e-10));
  t.set("kms_smeared", JsonValue::number(1e-9));
  t.set("modular", JsonValue::number(1e-8));
  t.set("gibbs_identity", JsonValue::number(1e-10));
  t.set("flow_energy_drift", JsonValue::number(1e-8));
  t.set("flow_trace_drift", JsonValue::number(1e-10));
  t.set("stationarity", JsonValue::number(1e-6));
  t.set("twist", JsonValue::number(1e-12));
  return t;
}

Run open_run(const CliArgs& args) {
  Run run;
  run.cfg = load_config(args.config_path, args.overrides);
  run.model = build_model(run.cfg, &run.build_report);
  run.out_dir = args.out_dir;
  std::filesystem::create_directories(run.out_dir);

  run.report.set("command", JsonValue::string(args.command));
  run.report.set("version", JsonValue::string(kVersion));
  run.report.set("config_hash", JsonValue::string(hex64(fnv1a64(run.cfg.raw_text))));
  run.report.set("seed", JsonValue::integer(static_cast<long long>(run.cfg.seed)));
  run.report.set("tolerances", tolerance_table(run.cfg));
  JsonValue model = JsonValue::object();
  model.set("class", JsonValue::string(model_class_name(hahn_split(run.model).model_class)));
  model.set("n_terms", JsonValue::integer(run.model.n_terms()));
  model.set("phi_norm", JsonValue::number(run.model.phi_norm));
  model.set("measure_norm", JsonValue::number(run.model.measure_norm()));
  model.set("symmetrization_added_terms",
            JsonValue::integer(run.build_report.symmetrization.terms_added));
  run.report.set("model", std::move(model));
  return run;
}

void finish_run(Run& run) {
  run.report.set("results", std::move(run.results));
  run.report.set("config_echo", JsonValue::string(run.cfg.raw_text));
  run.report.set("status",
                 JsonValue::string(run.tolerance_failure ? "tolerance_failure" : "pass"));
  write_text_file(run.out_dir + "/report.json", run.report.dump());
}

void write_csv(const Run& run, const std::string& name, const CsvWriter& csv) {
  write_text_file(run.out_dir + "/" + name, csv.str());
}

Matrix even_random(Eigen::Index dim, std::mt19937_64& rng) {
  Matrix a = random_matrix(dim, rng);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i)
      if ((std::popcount(static_cast<std::uint64_t>(i)) -
           std::popcount(static_cast<std::uint64_t>(j))) % 2 != 0)
        a(i, j) = 0.0;
  return a;
}

Matrix initial_state_for(const Run& run, const FockContext& ctx, const ModelOperators& ops,
                         double beta) {
  const std::string& kind = run.cfg.initial_state;
  if (kind == "gibbs") return gibbs(ops.u_model, beta).rho;
  if (kind == "tracial") return tracial_state(ctx.fock_dim).rho;
  if (kind == "gap-gibbs") {
    auto sols = gap_fixed_point(run.model, ops, beta, run.cfg.solver);
    const GapSolution* best = nullptr;
    for (const auto& s : sols)
      if (s.converged && s.absorbed_into < 0 && (!best || s.game_val < best->game_val)) best = &s;
    if (!best) throw Error(ErrorCode::NoConvergence, "no gap solution for the initial state");
    return gibbs(approx_hamiltonian(run.model, ops, best->c), beta).rho;
  }
  if (kind.rfind("paired:", 0) == 0) {
    if (ctx.n_spins < 2)
      throw Error(ErrorCode::ConfigInvalid, "paired initial state needs two spin labels");
    double theta = std::stod(kind.substr(7));
    // per-site pure pair state on the first two spin modes, vacuum elsewhere
    const Eigen::Index site_dim = Eigen::Index{1} << ctx.n_spins;
    Vector site = Vector::Zero(site_dim);
    site[0] = std::cos(theta);
    site[(Eigen::Index{3}) << (ctx.n_spins - 2)] = std::sin(theta);
    Matrix block = site * site.adjoint();
    Matrix rho = block;
    for (int s = 1; s < ctx.n_sites; ++s) {
      Matrix next = Matrix::Zero(rho.rows() * site_dim, rho.cols() * site_dim);
      for (Eigen::Index i = 0; i < rho.rows(); ++i)
        for (Eigen::Index j = 0; j < rho.cols(); ++j)
          next.block(i * site_dim, j * site_dim, site_dim, site_dim) = rho(i, j) * block;
      rho = std::move(next);
    }
    return rho;
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown initial state '" + kind + "'");
}

const GapSolution* best_solution(const std::vector<GapSolution>& sols) {
  const GapSolution* best = nullptr;
  for (const auto& s : sols)
    if (s.converged && s.absorbed_into < 0 && (!best || s.game_val < best->game_val)) best = &s;
  return best;
}

// ---------------------------------------------------------------------------

void cmd_validate(Run& run) {
  JsonValue terms = JsonValue::array();
  for (int k = 0; k < run.model.n_terms(); ++k) {
    JsonValue t = JsonValue::object();
    t.set("label", JsonValue::string(run.model.terms[k].psi.label()));
    t.set("gamma", JsonValue::number(run.model.terms[k].gamma));
    t.set("adjoint_partner", JsonValue::integer(run.model.adjoint_partner[k]));
    if (k < static_cast<int>(run.build_report.raw_norms.size())) {
      t.set("raw_norm", JsonValue::number(run.build_report.raw_norms[k]));
      t.set("normalized", JsonValue::boolean(run.build_report.normalized[k]));
    } else {
      t.set("added_by_symmetrization", JsonValue::boolean(true));
    }
    terms.push(std::move(t));
  }
  run.results.set("terms", std::move(terms));
  run.results.set("phi_echo", JsonValue::string(serialize_interaction(run.model.phi)));
  run.results.set("phi_selfadjoint", JsonValue::boolean(interaction_is_selfadjoint(run.model.phi)));
  run.results.set("range", JsonValue::integer(run.model.phi.range()));
  const int radius = 10 * std::max(run.model.phi.range(), 1);
  run.results.set("decay_norm_truncated", JsonValue::number(run.cfg.decay.norm_one_truncated(radius)));
  run.results.set("decay_norm_tail_bound", JsonValue::number(run.cfg.decay.tail_bound(radius)));
  run.results.set("decay_truncation_radius", JsonValue::integer(radius));
  if (run.build_report.symmetrization.modified)
    run.results.set("warning",
                    JsonValue::string("term list was not closed under the adjoint; "
                                      "conjugate terms were appended with equal weights"));
}

void cmd_pressure(Run& run) {
  CsvWriter csv({"L", "beta", "volume", "pressure", "gibbs_free_energy", "identity_residual"});
  JsonValue rows = JsonValue::array();
  for (int L : effective_widths(run.cfg)) {
    FockContext ctx = context_for(run.cfg, L);
    Matrix u_m = long_range_hamiltonian(run.model, ctx).mat;
    for (double beta : effective_betas(run.cfg)) {
      double p = pressure(u_m, beta, ctx);
      ThermalState g = gibbs(u_m, beta);
      double f = free_energy_density(g, u_m, beta, ctx);
      double residual = std::abs(f + p);
      run.note_failure(residual > 1e-10);
      csv.add_row_numeric({double(L), beta, double(ctx.n_sites), p, f, residual});
      JsonValue row = JsonValue::object();
      row.set("L", JsonValue::integer(L));
      row.set("beta", JsonValue::number(beta));
      row.set("pressure", JsonValue::number(p));
      row.set("gibbs_free_energy", JsonValue::number(f));
      row.set("identity_residual", JsonValue::number(residual));
      rows.push(std::move(row));
    }
  }
  run.results.set("rows", std::move(rows));
  write_csv(run, "pressure.csv", csv);
}

JsonValue solution_json(const LongRangeModel& model, const GapSolution& s) {
  JsonValue j = JsonValue::object();
  j.set("branch", JsonValue::string(s.branch));
  j.set("converged", JsonValue::boolean(s.converged));
  j.set("absorbed_into", JsonValue::integer(s.absorbed_into));
  j.set("c", vector_json(s.c));
  j.set("gap_magnitude", JsonValue::number(weighted_norm(model, s.c)));
  j.set("residual", JsonValue::number(s.residual));
  j.set("pressure", JsonValue::number(s.pressure_value));
  j.set("game_value", JsonValue::number(s.game_val));
  j.set("iterations", JsonValue::integer(s.iterations));
  j.set("damping", JsonValue::number(s.damping));
  j.set("restart_seed", JsonValue::integer(static_cast<long long>(s.restart_seed)));
  return j;
}

void cmd_gap(Run& run) {
  JsonValue per_width = JsonValue::array();
  for (int L : effective_widths(run.cfg)) {
    FockContext ctx = context_for(run.cfg, L);
    ConservativeSet cons = conservative_set(run.model, ctx, run.cfg.beta, run.cfg.solver);
    JsonValue w = JsonValue::object();
    w.set("L", JsonValue::integer(L));
    JsonValue sols = JsonValue::array();
    for (const auto& s : cons.solutions) {
      if (s.converged && s.absorbed_into < 0)
        run.note_failure(s.residual > run.cfg.solver.fp_tol);
      sols.push(solution_json(run.model, s));
    }
    // K = 0 and purely repulsive models carry no fixed-point list; the
    // conservative strategies themselves are the deliverable
    run.note_failure(cons.full_points.empty());
    w.set("solutions", std::move(sols));
    JsonValue strategies = JsonValue::array();
    for (const auto& d : cons.strategies) strategies.push(vector_json(d));
    w.set("conservative_strategies", std::move(strategies));
    w.set("game_value", JsonValue::number(cons.game_value));
    w.set("minmax_pressure", JsonValue::number(cons.minmax_pressure));
    double direct = pressure_lr(run.model, run.cfg.beta, ctx);
    w.set("direct_pressure", JsonValue::number(direct));
    w.set("minmax_residual", JsonValue::number(std::abs(direct - cons.minmax_pressure)));
    if (run.cfg.probe_simple) {
      SimpleProbe probe = simple_model_probe(run.model, ctx, run.cfg.beta, 1e-3, run.cfg.solver);
      JsonValue p = JsonValue::object();
      p.set("epsilon", JsonValue::number(probe.epsilon));
      p.set("clusters_plus", JsonValue::integer(probe.clusters_plus));
      p.set("clusters_minus", JsonValue::integer(probe.clusters_minus));
      p.set("branch_distance", JsonValue::number(probe.branch_distance));
      p.set("simple_flag", JsonValue::boolean(probe.simple_flag));
      w.set("simple_probe", std::move(p));
    }
    per_width.push(std::move(w));
  }
  run.results.set("per_width", std::move(per_width));
}

void cmd_game_surface(Run& run) {
  FockContext ctx = context_for(run.cfg, run.cfg.half_width);
  GameSurface surf = brute_force_game_oracle(run.model, ctx, run.cfg.beta, run.cfg.grid);
  std::vector<std::string> header;
  for (size_t i = 0; i < surf.independent_indices.size(); ++i) {
    header.push_back("re_c" + std::to_string(surf.independent_indices[i]));
    header.push_back("im_c" + std::to_string(surf.independent_indices[i]));
  }
  header.push_back("game_value");
  CsvWriter csv(header);
  for (size_t cell = 0; cell < surf.values.size(); ++cell) {
    std::vector<double> row;
    for (int k : surf.independent_indices) {
      row.push_back(surf.points[cell][k].real());
      row.push_back(surf.points[cell][k].imag());
    }
    row.push_back(surf.values[cell]);
    csv.add_row_numeric(row);
  }
  write_csv(run, "surface.csv", csv);

  run.results.set("cells", JsonValue::integer(static_cast<long long>(surf.values.size())));
  run.results.set("minmax_value", JsonValue::number(surf.minmax_value));
  run.results.set("minmax_pressure", JsonValue::number(surf.minmax_pressure));
  run.results.set("argmin", vector_json(surf.argmin));
  JsonValue st = JsonValue::array();
  for (const auto& p : surf.stationary_points) st.push(vector_json(p));
  run.results.set("stationary_points", std::move(st));
}

void cmd_kms(Run& run) {
  FockContext ctx = context_for(run.cfg, run.cfg.half_width);
  ModelOperators ops = build_model_operators(run.model, ctx);
  const double beta = run.cfg.beta;

  // the state under test: Gibbs of the best approximating Hamiltonian
  Vector c = Vector::Zero(run.model.n_terms());
  if (run.model.n_terms() > 0) {
    auto sols = gap_fixed_point(run.model, ops, beta, run.cfg.solver);
    if (const GapSolution* best = best_solution(sols)) c = best->c;
  }
  Matrix h = approx_hamiltonian(run.model, ops, c);
  ThermalState g = gibbs(h, beta);
  ThermalState tr = tracial_state(ctx.fock_dim);

  auto rng = seeded_engine(run.cfg.seed, 301);
  double worst_boundary = 0.0, worst_smeared = 0.0, control_boundary = 1e300;
  for (int i = 0; i < run.cfg.kms_panel; ++i) {
    Matrix a = even_random(ctx.fock_dim, rng);
    Matrix b = even_random(ctx.fock_dim, rng);
    worst_boundary = std::max(worst_boundary, kms_boundary_residual(g, h, beta, a, b).residual);
    worst_smeared = std::max(worst_smeared, kms_smeared_residual(g, h, beta, a, b, 1.0));
    control_boundary =
        std::min(control_boundary, kms_boundary_residual(tr, h, beta, a, b).residual);
  }
  run.results.set("panel", JsonValue::integer(run.cfg.kms_panel));
  run.results.set("coefficients", vector_json(c));
  run.results.set("gibbs_boundary_residual", JsonValue::number(worst_boundary));
  run.results.set("gibbs_smeared_residual", JsonValue::number(worst_smeared));
  run.results.set("tracial_control_residual", JsonValue::number(control_boundary));
  run.note_failure(worst_boundary > 1e-10);
  run.note_failure(worst_smeared > 1e-9);
  run.note_failure(control_boundary <= 1e-2);
}

void cmd_modular(Run& run) {
  FockContext ctx = context_for(run.cfg, run.cfg.half_width);
  Matrix u_m = long_range_hamiltonian(run.model, ctx).mat;
  const double beta = run.cfg.beta;
  // re-diagonalize the density matrix itself so both routes are independent
  ThermalState rho = state_from_density(gibbs(u_m, beta).rho, beta);
  ModularData md(rho);

  auto rng = seeded_engine(run.cfg.seed, 401);
  double flow_residual = 0.0;
  for (double t : {0.1, 1.0}) {
    for (int i = 0; i < 4; ++i) {
      Matrix a = even_random(ctx.fock_dim, rng);
      flow_residual =
          std::max(flow_residual, md.modular_flow_residual(a, u_m, beta, t) / operator_norm(a));
    }
  }
  double delta_res = md.delta_identity_residual(6, run.cfg.seed);
  double jdj = md.jdj_residual(6, run.cfg.seed);
  double comm = md.commutant_residual(6, run.cfg.seed);
  run.results.set("min_weight", JsonValue::number(md.min_weight()));
  run.results.set("modular_flow_residual", JsonValue::number(flow_residual));
  run.results.set("delta_identity_residual", JsonValue::number(delta_res));
  run.results.set("jdj_residual", JsonValue::number(jdj));
  run.results.set("commutant_residual", JsonValue::number(comm));
  run.note_failure(flow_residual > 1e-8 || delta_res > 1e-8 || jdj > 1e-8 || comm > 1e-8);
}

void cmd_flow(Run& run) {
  FockContext ctx = context_for(run.cfg, run.cfg.half_width);
  ModelOperators ops = build_model_operators(run.model, ctx);
  Matrix rho0 = initial_state_for(run, ctx, ops, run.cfg.beta);
  FlowTrajectory traj =
      selfconsistent_flow(run.model, ops, rho0, run.cfg.t_final, run.cfg.flow);

  std::vector<std::string> header = {"t"};
  for (int k = 0; k < run.model.n_terms(); ++k) {
    header.push_back("re_c" + std::to_string(k));
    header.push_back("im_c" + std::to_string(k));
  }
  header.insert(header.end(), {"energy", "entropy", "trace", "phi_energy_density"});
  CsvWriter csv(header);
  for (Eigen::Index i = 0; i < traj.times.size(); ++i) {
    std::vector<double> row = {traj.times[i]};
    for (int k = 0; k < run.model.n_terms(); ++k) {
      row.push_back(traj.coefficients[i][k].real());
      row.push_back(traj.coefficients[i][k].imag());
    }
    row.push_back(traj.energies[i]);
    row.push_back(traj.entropies[i]);
    row.push_back(traj.traces[i]);
    row.push_back(
        (traj.snapshots[i].transpose().cwiseProduct(ops.u_phi)).sum().real() / ops.volume);
    csv.add_row_numeric(row);
  }
  write_csv(run, "trajectory.csv", csv);

  run.results.set("snapshots", JsonValue::integer(traj.times.size()));
  run.results.set("dt_used", JsonValue::number(traj.dt_used));
  run.results.set("energy_drift", JsonValue::number(traj.energy_drift));
  run.results.set("trace_drift", JsonValue::number(traj.trace_drift));
  run.results.set("positivity_repairs", JsonValue::integer(traj.positivity_repairs));
  run.note_failure(traj.energy_drift > 1e-8 || traj.trace_drift > 1e-10);
}

void cmd_stationarity(Run& run) {
  JsonValue rows = JsonValue::array();
  double previous = -1.0;
  bool decreasing = true;
  for (int L : effective_widths(run.cfg)) {
    FockContext ctx = context_for(run.cfg, L);
    ModelOperators ops = build_model_operators(run.model, ctx);
    Vector d = Vector::Zero(run.model.n_terms());
    if (run.model.n_terms() > 0) {
      auto sols = gap_fixed_point(run.model, ops, run.cfg.beta, run.cfg.solver);
      const GapSolution* best = best_solution(sols);
      if (!best) throw Error(ErrorCode::NoConvergence, "no gap solution at L=" + std::to_string(L));
      d = best->c;
    }
    StationarityReport rep =
        stationarity_check(run.model, ctx, run.cfg.beta, d, run.cfg.t_final, run.cfg.flow);
    run.note_failure(rep.selfconsistent_deviation > 1e-6);
    if (previous >= 0.0 && rep.exact_deviation >= previous) decreasing = false;
    previous = rep.exact_deviation;
    JsonValue row = JsonValue::object();
    row.set("L", JsonValue::integer(L));
    row.set("selfconsistent_deviation", JsonValue::number(rep.selfconsistent_deviation));
    row.set("exact_deviation", JsonValue::number(rep.exact_deviation));
    rows.push(std::move(row));
  }
  run.results.set("rows", std::move(rows));
  run.results.set("exact_deviation_decreasing", JsonValue::boolean(decreasing));
  if (effective_widths(run.cfg).size() > 1 && run.model.n_terms() > 0)
    run.note_failure(!decreasing);
}

void cmd_limit_trend(Run& run) {
  auto initial = [&](const FockContext& c) {
    ModelOperators ops = build_model_operators(run.model, c);
    return initial_state_for(run, c, ops, run.cfg.beta);
  };
  auto observable = [&](const FockContext& c) {
    IntVector origin = IntVector::Zero(run.cfg.dim);
    if (run.model.n_terms() > 0) {
      Matrix b = local_hamiltonian(run.model.terms[0].psi, c).mat;
      return Matrix((b + b.adjoint()) / static_cast<double>(c.n_sites));
    }
    return Matrix(local_hamiltonian(run.model.phi, c).mat / static_cast<double>(c.n_sites));
  };
  LimitAgreementReport rep =
      limit_agreement(run.model, effective_widths(run.cfg), run.cfg.spins, initial, observable,
                      run.cfg.t_final, run.cfg.flow, run.cfg.mode_cap);
  CsvWriter csv({"L", "deviation"});
  bool non_increasing = true;
  for (size_t i = 0; i < rep.widths.size(); ++i) {
    csv.add_row_numeric({double(rep.widths[i]), rep.deviations[i]});
    if (i > 0 && rep.deviations[i] > rep.deviations[i - 1] + 1e-12) non_increasing = false;
  }
  write_csv(run, "limit_trend.csv", csv);
  JsonValue devs = JsonValue::array();
  for (double d : rep.deviations) devs.push(JsonValue::number(d));
  run.results.set("deviations", std::move(devs));
  run.results.set("non_increasing", JsonValue::boolean(non_increasing));
  run.note_failure(!non_increasing);
}

void cmd_ergodicity(Run& run) {
  FockContext ctx = context_for(run.cfg, run.cfg.half_width);
  ModelOperators ops = build_model_operators(run.model, ctx);
  Matrix rho = initial_state_for(run, ctx, ops, run.cfg.beta);
  IntVector origin = IntVector::Zero(run.cfg.dim);
  LocalOperator n = op_product(ctx, creation(ctx, origin, run.cfg.spins[0]),
                               annihilation(ctx, origin, run.cfg.spins[0]));
  CsvWriter csv({"ell", "gap"});
  JsonValue gaps = JsonValue::array();
  std::vector<double> values;
  for (int ell = 0; ell <= ctx.half_width; ++ell) {
    double gap = ergodicity_gap(ctx, rho, n, ell);
    values.push_back(gap);
    csv.add_row_numeric({double(ell), gap});
    gaps.push(JsonValue::number(gap));
    run.note_failure(gap < -1e-12);
  }
  write_csv(run, "ergodicity.csv", csv);
  run.results.set("gaps", std::move(gaps));
  if (values.size() >= 2 && values.front() > 0.0)
    run.results.set("last_over_first", JsonValue::number(values.back() / values.front()));
}

void cmd_demo_gauge_twist(Run& run) {
  FockContext ctx = context_for(run.cfg, run.cfg.half_width);
  GaugeTwistDemo demo = gauge_twist_demo(ctx);
  run.results.set("value0", JsonValue::complex_number(demo.value0));
  run.results.set("value1", JsonValue::complex_number(demo.value1));
  run.results.set("value2", JsonValue::complex_number(demo.value2));
  run.results.set("twist_residual", JsonValue::number(demo.twist_residual));
  run.results.set("two_mode_ratio1", JsonValue::complex_number(demo.two_mode_ratio1));
  run.results.set("two_mode_ratio2", JsonValue::complex_number(demo.two_mode_ratio2));
  run.results.set("state_distance", JsonValue::number(demo.state_distance));
  run.note_failure(demo.twist_residual > 1e-12 || std::abs(demo.value0) < 1e-6);
  run.note_failure(std::abs(demo.two_mode_ratio1 - Complex(0, 1)) > 1e-12);
  run.note_failure(std::abs(demo.two_mode_ratio2 - Complex(0, -1)) > 1e-12);
}

void cmd_sweep(Run& run) {
  auto widths = effective_widths(run.cfg);
  auto betas = effective_betas(run.cfg);
  long cells = static_cast<long>(widths.size()) * static_cast<long>(betas.size());
  if (cells > run.cfg.sweep_cap)
    throw Error(ErrorCode::GridTooLarge, std::to_string(cells) + " sweep cells exceed cap " +
                                             std::to_string(run.cfg.sweep_cap));
  CsvWriter csv({"L", "beta", "pressure_lr", "gap_magnitude", "minmax_residual"});
  JsonValue rows = JsonValue::array();
  for (int L : widths) {
    FockContext ctx = context_for(run.cfg, L);
    for (double beta : betas) {
      ConservativeSet cons = conservative_set(run.model, ctx, beta, run.cfg.solver);
      double direct = pressure_lr(run.model, beta, ctx);
      double gap_mag = cons.full_points.empty()
                           ? 0.0
                           : weighted_norm(run.model, cons.full_points.front());
      csv.add_row_numeric(
          {double(L), beta, direct, gap_mag, std::abs(direct - cons.minmax_pressure)});
      JsonValue row = JsonValue::object();
      row.set("L", JsonValue::integer(L));
      row.set("beta", JsonValue::number(beta));
      row.set("pressure_lr", JsonValue::number(direct));
      row.set("gap_magnitude", JsonValue::number(gap_mag));
      row.set("minmax_residual", JsonValue::number(std::abs(direct - cons.minmax_pressure)));
      rows.push(std::move(row));
    }
  }
  write_csv(run, "sweep.csv", csv);
  run.results.set("rows", std::move(rows));
}

}  // namespace

int main(int argc, char** argv) {
  std::string command;
  try {
    CliArgs args = parse_cli(argc, argv);
    command = args.command;
    Run run = open_run(args);
    if (command == "validate")
      cmd_validate(run);
    else if (command == "pressure")
      cmd_pressure(run);
    else if (command == "gap")
      cmd_gap(run);
    else if (command == "game-surface")
      cmd_game_surface(run);
    else if (command == "kms")
      cmd_kms(run);
    else if (command == "modular")
      cmd_modular(run);
    else if (command == "flow")
      cmd_flow(run);
    else if (command == "stationarity")
      cmd_stationarity(run);
    else if (command == "limit-trend")
      cmd_limit_trend(run);
    else if (command == "ergodicity")
      cmd_ergodicity(run);
    else if (command == "demo-gauge-twist")
      cmd_demo_gauge_twist(run);
    else if (command == "sweep")
      cmd_sweep(run);
    else
      throw Error(ErrorCode::ConfigInvalid, "unknown command '" + command + "'");
    bool failed = run.tolerance_failure;
    finish_run(run);
    std::cout << "mflab " << command << ": " << (failed ? "TOLERANCE FAILURE" : "ok")
              << " (report in " << run.out_dir << "/report.json)\n";
    return failed ? 2 : 0;
  } catch (const Error& e) {
    std::cerr << "mflab " << command << ": " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigInvalid ? 3 : 4;
  } catch (const std::exception& e) {
    std::cerr << "mflab " << command << ": " << e.what() << "\n";
    return 4;
  }
}
