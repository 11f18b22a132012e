#pragma once

#include "mflab/dynamics.hpp"
#include "mflab/game.hpp"

#include <string>
#include <vector>

namespace mflab {

struct TermSpec {
  Interaction psi;
  double gamma = 0.0;
  std::string gamma_text;  // decimal string as written
  bool normalize = false;  // rescale (psi, gamma) -> (psi/s, gamma s^2) to reach the sphere
};

struct ExperimentConfig {
  // lattice
  int dim = 1;
  int half_width = 1;
  std::vector<int> width_list;
  std::vector<std::string> spins = {"up", "dn"};
  int mode_cap = 14;
  // decay
  DecayFunction decay;
  // model
  Interaction phi{1, "phi"};
  std::vector<TermSpec> terms;
  // thermo
  double beta = 1.0;
  std::vector<double> beta_list;
  // solver
  GameSolverOptions solver;
  GameGridSpec grid;
  int kms_panel = 20;
  int samples = 50;
  long sweep_cap = 256;
  bool probe_simple = false;
  // dynamics
  FlowOptions flow;
  double t_final = 1.0;
  std::string initial_state = "gibbs";
  // run
  std::uint64_t seed = 0;
  int sub_window = 0;  // ell

  std::string raw_text;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {});

// Applies one `section.key=value` override to the config text form.
std::string apply_override(const std::string& text, const std::string& override_kv);

struct ModelBuildReport {
  SymmetrizationReport symmetrization;
  std::vector<double> raw_norms;      // W-norms before any normalization
  std::vector<bool> normalized;
};

LongRangeModel build_model(const ExperimentConfig& cfg, ModelBuildReport* report = nullptr);

FockContext context_for(const ExperimentConfig& cfg, int half_width);

// Width and beta lists fall back to the scalar entries.
std::vector<int> effective_widths(const ExperimentConfig& cfg);
std::vector<double> effective_betas(const ExperimentConfig& cfg);

// Anchor-line echo of an interaction in the config grammar; parsing the echo
// reproduces the interaction.
std::string serialize_interaction(const Interaction& phi);

}  // namespace mflab
