// Command line front end: reproduces each experiment and writes long-format
// CSV for external plotting. See README.md for the column schema.

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "gradvar/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gradvar - score-function gradient estimators with baseline control variates"};

  gradvar::ExperimentSpec spec;
  std::string config_path;
  std::vector<std::string> sets;
  double lr = -1.0, gamma = -1.0, kappa = -1.0, epsilon = -1.0;

  app.add_option("experiment", spec.experiment,
                 "coinflips | bandit | two_state_mdp | ppo | fixed_policy");
  app.add_option("--experiment", spec.experiment, "Experiment name (alternative to positional)");
  app.add_option("--baseline", spec.baseline, "Baseline family (default: none)");
  app.add_option("--seed", spec.seed, "Base seed; replications derive disjoint streams");
  app.add_option("--reps", spec.replications, "Replication count (default per experiment)");
  app.add_option("--lr", lr, "Policy learning rate");
  app.add_option("--gamma", gamma, "Discount factor");
  app.add_option("--kappa", kappa, "GAE bootstrap parameter");
  app.add_option("--epsilon", epsilon, "PPO clipping parameter");
  app.add_option("--out", spec.output_path, "Output CSV path (default results.csv)");
  app.add_flag("--analytic", spec.analytic, "Exact sweep instead of training");
  app.add_flag("--allow-partial", spec.allow_partial,
               "Exit 0 even if some replications aborted");
  app.add_option("--config", config_path,
                 "Key-value config file; keys mirror the trainer config fields");
  app.add_option("--set", sets, "Extra key=value overrides (repeatable)")->take_all();
  app.add_option("--threads", spec.threads, "Worker cap (also via GRADVAR_THREADS)");

  CLI11_PARSE(app, argc, argv);

  if (spec.experiment.empty()) {
    std::fprintf(stderr, "error: no experiment given (try --help)\n");
    return 2;
  }

  try {
    if (!config_path.empty()) spec.overrides = gradvar::KeyValueConfig::from_file(config_path);
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
      spec.overrides.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (lr >= 0.0) {
      spec.overrides.set("learning_rate", gradvar::format_csv_value(lr));
      spec.overrides.set("alpha_theta", gradvar::format_csv_value(lr));
    }
    if (gamma >= 0.0) spec.overrides.set("gamma", gradvar::format_csv_value(gamma));
    if (kappa >= 0.0) spec.overrides.set("kappa", gradvar::format_csv_value(kappa));
    if (epsilon >= 0.0) spec.overrides.set("epsilon", gradvar::format_csv_value(epsilon));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  const gradvar::ExperimentResult result = gradvar::run_experiment(spec);
  if (result.exit_code == 0)
    std::printf("%s\n", result.message.c_str());
  else
    std::fprintf(stderr, "error: %s\n", result.message.c_str());
  return result.exit_code;
}
