// Experiment configuration: JSON schema with strict key checking, defaults
// matching the reference setup, and construction of the configured models.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pcosync/phase_function.hpp"

namespace pcosync {

struct ExperimentConfig {
  std::string phase_kind = "peskin";  // "peskin" | "tabulated"
  double gamma = 2.0;
  std::vector<double> table;  // samples for the tabulated kind

  double epsilon = 0.02;
  int n = 2;
  double rho = 0.0;
  std::vector<std::vector<double>> delays;
  int cycle_cap = 1000;

  int m_tilde = 10;
  std::vector<double> p_grid = {0.05, 0.10, 0.15, 0.20, 0.25,
                                0.30, 0.35, 0.40, 0.45};
  int d = 1;

  std::uint64_t trials = 10000;
  std::uint64_t mc_trials = 0;  // sampled-entropy column; 0 disables it
  // Sessions per strategy in the jam pipeline. Kept separate from trials: the
  // grid adversary costs cycle_cap * grid_points one-cycle probes per stalled
  // session, so pmf-sized trial counts would run for hours.
  std::uint64_t jam_trials = 600;
  std::uint64_t seed = 1;
  int workers = 1;

  std::string jammer = "none";  // none | uniform-random | adversarial-grid
  int jam_grid_points = 96;

  double boundary_tol = 1e-10;
  double fixed_point_tol = 1e-12;
  std::size_t extremum_grid = 10001;

  std::string out_dir = "out";
};

// Parses and validates a JSON document; unknown keys and out-of-range values
// raise ConfigError naming the offending field path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

// Re-checks every field constraint (used after programmatic overrides).
void validate_experiment_config(const ExperimentConfig& cfg);

// The fully resolved configuration as a JSON document; parsing it back yields
// an identical configuration.
std::string config_to_json(const ExperimentConfig& cfg);

PhaseFunction make_phase_function(const ExperimentConfig& cfg);

}  // namespace pcosync
