#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gradvar/config.hpp"
#include "gradvar/csv.hpp"
#include "gradvar/estimator.hpp"
#include "gradvar/mdp.hpp"
#include "gradvar/trainers.hpp"

namespace gradvar {

/// A fully specified experiment invocation. `overrides` layers the config
/// file (if any) under the individual CLI flags; keys mirror the trainer
/// config field names.
struct ExperimentSpec {
  std::string experiment;  // coinflips | bandit | two_state_mdp | ppo | fixed_policy
  std::string baseline = "none";
  std::string output_path = "results.csv";
  std::uint64_t seed = 12345;
  int replications = -1;  // -1: experiment default
  bool analytic = false;
  bool allow_partial = false;
  int threads = 0;
  KeyValueConfig overrides;
};

struct ExperimentResult {
  int exit_code = 0;
  std::size_t rows_written = 0;
  int aborted_replications = 0;
  std::string message;
};

/// Runs the experiment and writes its CSV atomically to spec.output_path.
/// Nonzero exit on invalid specs or on aborted replications without
/// --allow-partial.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// The row-producing core of run_experiment, exposed for tests.
std::vector<CsvRow> experiment_rows(const ExperimentSpec& spec, int* aborted_replications);

/// Analytic variance sweep rows (the --analytic path).
std::vector<CsvRow> analytic_sweep_rows(const ExperimentSpec& spec);

/// Exact baseline of the named family for an enumerable environment.
/// Names: none, value, q_weighted, constant_optimal, state_optimal,
/// prefix_optimal, per_parameter.
BaselineSpec analytic_baseline(const std::string& name, const TabularMdp& mdp,
                               const SoftmaxPolicy& policy,
                               std::size_t max_paths = kDefaultEnumerationBound);

/// The built-in starting policy for each experiment's environment.
SoftmaxPolicy default_policy(const std::string& experiment, const TabularMdp& mdp);

/// Builds the experiment's environment, pulling two-state rewards from the
/// overrides when needed.
TabularMdp build_environment(const std::string& experiment, const KeyValueConfig& overrides);

}  // namespace gradvar
