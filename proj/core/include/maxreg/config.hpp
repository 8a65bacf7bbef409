#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "maxreg/counterexample.hpp"
#include "maxreg/weighted_spaces.hpp"

namespace maxreg {

/// All experiment parameters. The defaults are the standard counterexample
/// (a = b = 3/2, c = 1, d chosen automatically, T = 1).
struct ExperimentConfig {
  std::vector<Variant> variants{Variant::nonsymmetric, Variant::symmetric};
  double weight_exp = 1.5;
  double phase_exp = 1.5;
  double profile_exp = 1.0;
  double phase_scale = 1.0;
  double profile_scale = 1.0;
  std::optional<double> shift_d;  // "auto" when empty
  std::optional<double> alpha;
  std::optional<double> M;
  std::optional<double> k_term;
  double horizon_T = 1.0;
  MassModel mass_model = MassModel::lumped;

  // mr-divergence and conditions
  std::vector<double> eps_sweep{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  int n_cells = 2048;
  double gamma = 2.0;
  int solver_cells = 256;
  double solver_min_eps = 1e-2;

  // verify-form and holder-fit
  double form_epsilon = 1e-4;
  int form_cells = 2048;
  int rayleigh_samples = 10000;
  int holder_deltas = 25;
  int holder_bases = 8;

  // verify-extension
  int extension_trials = 200;
  int extension_dofs = 64;

  // solve
  double theta = 1.0;
  std::vector<double> energy_eps{1e-1, 3e-2, 1e-2};
  double convergence_epsilon = 1e-2;
  int convergence_cells = 64;
  int convergence_levels = 4;
  double residual_epsilon = 0.1;
  std::vector<int> residual_cells{2048, 4096, 8192};
  int residual_steps = 20;
  int residual_tests = 100;

  std::uint64_t seed = 1;
  std::string out_dir;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;

  CounterexampleSpec spec(Variant v) const;

  /// Canonical key = value pairs, in file order.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Flat "key = value" text with '#' comments. Unknown keys and malformed values
/// throw ConfigError naming the key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace maxreg
