#include "gradvar/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

#include "gradvar/baselines.hpp"

namespace gradvar {

namespace {

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::invalid_argument("expected a comma-separated number list");
  return out;
}

CsvRow make_row(const ExperimentSpec& spec, int replication, int iteration,
                const std::string& metric, double value, const std::string& baseline) {
  CsvRow r;
  r.experiment = spec.experiment;
  r.replication = replication;
  r.iteration = iteration;
  r.metric_name = metric;
  r.value = value;
  r.baseline = baseline;
  r.seed = spec.seed;
  return r;
}

void append_variance_row(std::vector<CsvRow>& rows, const ExperimentSpec& spec, int rep,
                         const TraceRecord& rec, const std::string& baseline) {
  if (!rec.variance) return;
  const char* metric = rec.variance->exact ? "exact_variance" : "empirical_variance";
  rows.push_back(make_row(spec, rep, rec.iteration, metric, rec.variance->variance, baseline));
}

SgdEstimatorSpec sgd_spec_from(const std::string& baseline, const KeyValueConfig& ov) {
  SgdEstimatorSpec est;
  const double gamma = ov.get_double("gamma", 0.9);
  const double kappa = ov.get_double("kappa", 0.2);
  if (baseline == "none") {
    est.baseline = SgdBaseline::None;
  } else if (baseline == "value") {
    est.baseline = SgdBaseline::Value;
  } else if (baseline == "constant_optimal") {
    est.baseline = SgdBaseline::ConstantOptimal;
  } else if (baseline == "state_optimal") {
    est.baseline = SgdBaseline::StateOptimal;
  } else if (baseline == "per_parameter") {
    est.baseline = SgdBaseline::PerParameter;
  } else if (baseline == "q_weighted") {
    est.baseline = SgdBaseline::QWeighted;
    est.exact_oracle = true;
  } else if (baseline == "gae") {
    est.returns = ReturnKind::Gae;
    est.baseline = SgdBaseline::None;
  } else if (baseline == "gae_optimal") {
    est.returns = ReturnKind::Gae;
    est.baseline = SgdBaseline::ConstantOptimal;
  } else if (baseline == "gae_state_optimal") {
    est.returns = ReturnKind::Gae;
    est.baseline = SgdBaseline::StateOptimal;
  } else {
    throw std::invalid_argument("unknown baseline '" + baseline + "'");
  }
  est.gae = GaeParams(gamma, kappa);
  est.exact_oracle = ov.get_bool("exact_oracle", est.exact_oracle);
  est.baseline_learning_rate = ov.get_double("baseline_learning_rate", 0.01);
  const std::string fit = ov.get_string("baseline_fit", "running_average");
  if (fit == "running_average")
    est.fit = FitMode::RunningAverage;
  else if (fit == "constant_rate")
    est.fit = FitMode::ConstantRate;
  else
    throw std::invalid_argument("baseline_fit must be running_average or constant_rate");
  return est;
}

SgdConfig sgd_config_from(const ExperimentSpec& spec, const TabularMdp& mdp, int default_iters,
                          int default_reps) {
  const KeyValueConfig& ov = spec.overrides;
  SgdConfig cfg;
  cfg.learning_rate = ov.get_double("learning_rate", 0.01);
  cfg.iterations = static_cast<int>(ov.get_int("iterations", default_iters));
  cfg.replications = spec.replications > 0 ? spec.replications : default_reps;
  cfg.seed = spec.seed;
  cfg.objective = mdp.objective();
  cfg.variance_log_every = static_cast<int>(ov.get_int("variance_log_every", 10));
  cfg.variance_samples = static_cast<std::size_t>(ov.get_int("variance_samples", 200));
  cfg.independent_baseline_batch = ov.get_bool("independent_baseline_batch", false);
  return cfg;
}

void check_baseline_allowed(const std::string& experiment, const std::string& baseline) {
  static const std::vector<std::string> mc_family = {
      "none", "value", "q_weighted", "constant_optimal", "state_optimal", "per_parameter"};
  static const std::vector<std::string> gae_family = {"gae", "gae_optimal", "gae_state_optimal"};
  auto in = [](const std::vector<std::string>& v, const std::string& x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };
  if (experiment == "coinflips" || experiment == "bandit") {
    if (!in(mc_family, baseline))
      throw std::invalid_argument("baseline '" + baseline + "' is not valid for " + experiment +
                                  " (episodes are too short for bootstrapped estimators)");
  } else if (experiment == "two_state_mdp") {
    if (!in(mc_family, baseline) && !in(gae_family, baseline))
      throw std::invalid_argument("baseline '" + baseline + "' is not valid for two_state_mdp");
  }
}

double action_prob_from_theta(const SoftmaxPolicy& tmpl, const Vec& theta, int state,
                              int action) {
  SoftmaxPolicy p(tmpl.num_states(), tmpl.num_actions(), tmpl.layout(), theta);
  return p.action_probs(state)[action];
}

// ---------------------------------------------------------------------------
// Training experiments (coinflips / bandit / two_state_mdp)
// ---------------------------------------------------------------------------

std::vector<CsvRow> run_sgd_experiment(const ExperimentSpec& spec, const TabularMdp& mdp,
                                       const SoftmaxPolicy& init, int default_iters,
                                       int default_reps,
                                       const std::string& prob_metric, int prob_state,
                                       int prob_action, int* aborted) {
  check_baseline_allowed(spec.experiment, spec.baseline);
  const SgdEstimatorSpec est = sgd_spec_from(spec.baseline, spec.overrides);
  const SgdConfig cfg = sgd_config_from(spec, mdp, default_iters, default_reps);
  const int csv_every =
      static_cast<int>(spec.overrides.get_int("csv_every", std::max(1, cfg.variance_log_every)));
  const int reps = cfg.replications;

  std::vector<std::vector<CsvRow>> per_rep(reps);
  std::vector<char> rep_aborted(reps, 0);
  parallel_for(static_cast<std::size_t>(reps), spec.threads, [&](std::size_t rep) {
    Rng rng(derive_seed(spec.seed, rep));
    SgdConfig rep_cfg = cfg;
    rep_cfg.seed = derive_seed(spec.seed, rep);
    const TrainingTrace trace = sgd_train(mdp, init, est, rep_cfg, rng);
    rep_aborted[rep] = trace.aborted ? 1 : 0;
    auto& rows = per_rep[rep];
    for (const TraceRecord& rec : trace.records) {
      const bool last = rec.iteration == trace.records.back().iteration;
      if (rec.iteration % csv_every == 0 || last || rec.variance) {
        rows.push_back(make_row(spec, static_cast<int>(rep), rec.iteration, "expected_reward",
                                rec.expected_reward, spec.baseline));
        if (!prob_metric.empty())
          rows.push_back(make_row(spec, static_cast<int>(rep), rec.iteration, prob_metric,
                                  action_prob_from_theta(init, rec.theta, prob_state, prob_action),
                                  spec.baseline));
        append_variance_row(rows, spec, static_cast<int>(rep), rec, spec.baseline);
      }
    }
    if (trace.aborted)
      rows.push_back(make_row(spec, static_cast<int>(rep), trace.abort_iteration, "aborted", 1.0,
                              spec.baseline));
    if (spec.experiment == "two_state_mdp") {
      const double p_right =
          action_prob_from_theta(init, trace.records.back().theta, 0, 1);
      rows.push_back(make_row(spec, static_cast<int>(rep), trace.records.back().iteration,
                              "final_policy_optimal", p_right > 0.5 ? 1.0 : 0.0, spec.baseline));
    }
  });

  std::vector<CsvRow> rows;
  for (int rep = 0; rep < reps; ++rep) {
    if (rep_aborted[rep]) ++*aborted;
    rows.insert(rows.end(), per_rep[rep].begin(), per_rep[rep].end());
  }
  return rows;
}

// ---------------------------------------------------------------------------
// PPO experiment
// ---------------------------------------------------------------------------

PpoConfig ppo_config_from(const ExperimentSpec& spec, const TabularMdp& mdp) {
  const KeyValueConfig& ov = spec.overrides;
  PpoConfig cfg;
  cfg.nsteps = static_cast<int>(ov.get_int("nsteps", 256));
  cfg.nepochs = static_cast<int>(ov.get_int("nepochs", 4));
  cfg.niterations = static_cast<int>(ov.get_int("niterations", 300));
  cfg.minibatch_size = static_cast<int>(ov.get_int("minibatch_size", 64));
  cfg.epsilon = ov.get_double("epsilon", 0.2);
  cfg.gae = GaeParams(ov.get_double("gamma", 0.99), ov.get_double("kappa", 0.95));
  cfg.alpha_theta = ov.get_double("alpha_theta", ov.get_double("learning_rate", 0.01));
  cfg.alpha_psi = ov.get_double("alpha_psi", 0.003);
  cfg.alpha_phi = ov.get_double("alpha_phi", 0.003);
  cfg.objective = mdp.objective();
  cfg.variance_log_every = static_cast<int>(ov.get_int("variance_log_every", 10));
  cfg.variance_samples = static_cast<std::size_t>(ov.get_int("variance_samples", 200));
  cfg.validate();
  return cfg;
}

PpoVariant ppo_variant_from_baseline(const std::string& baseline) {
  if (baseline == "none") return PpoVariant::Vanilla;
  if (baseline == "state_optimal") return PpoVariant::Optimal;
  if (baseline == "per_parameter") return PpoVariant::PerParameter;
  if (baseline == "extra") return PpoVariant::ExtraBaseline;
  throw std::invalid_argument("ppo variant must be one of none | state_optimal | per_parameter | "
                              "extra, got '" +
                              baseline + "'");
}

std::vector<CsvRow> run_ppo_experiment(const ExperimentSpec& spec, int* aborted) {
  const TabularMdp mdp = build_environment(spec.experiment, spec.overrides);
  const SoftmaxPolicy init = default_policy(spec.experiment, mdp);
  PpoConfig cfg = ppo_config_from(spec, mdp);
  cfg.variant = ppo_variant_from_baseline(spec.baseline);
  const int reps = spec.replications > 0 ? spec.replications : 10;
  const int csv_every =
      static_cast<int>(spec.overrides.get_int("csv_every", std::max(1, cfg.variance_log_every)));

  std::vector<std::vector<CsvRow>> per_rep(reps);
  std::vector<char> rep_aborted(reps, 0);
  parallel_for(static_cast<std::size_t>(reps), spec.threads, [&](std::size_t rep) {
    Rng rng(derive_seed(spec.seed, rep));
    PpoConfig rep_cfg = cfg;
    rep_cfg.seed = derive_seed(spec.seed, rep);
    PpoResult result = ppo_train(mdp, make_ppo_state(mdp, init, rep_cfg), rep_cfg, rng);
    rep_aborted[rep] = result.trace.aborted ? 1 : 0;
    auto& rows = per_rep[rep];
    for (const TraceRecord& rec : result.trace.records) {
      const bool last = rec.iteration == result.trace.records.back().iteration;
      if (rec.iteration % csv_every == 0 || last || rec.variance) {
        rows.push_back(make_row(spec, static_cast<int>(rep), rec.iteration, "expected_reward",
                                rec.expected_reward, spec.baseline));
        append_variance_row(rows, spec, static_cast<int>(rep), rec, spec.baseline);
      }
    }
    if (result.trace.aborted)
      rows.push_back(make_row(spec, static_cast<int>(rep), result.trace.abort_iteration, "aborted",
                              1.0, spec.baseline));
  });

  std::vector<CsvRow> rows;
  for (int rep = 0; rep < reps; ++rep) {
    if (rep_aborted[rep]) ++*aborted;
    rows.insert(rows.end(), per_rep[rep].begin(), per_rep[rep].end());
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Fixed-policy experiment
// ---------------------------------------------------------------------------

std::vector<SoftmaxPolicy> load_policies_file(const std::string& path, const SoftmaxPolicy& tmpl) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open policies file " + path);
  std::vector<SoftmaxPolicy> out;
  std::string line;
  while (std::getline(f, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    if (key != "policy") throw std::runtime_error("policies file: expected 'policy <logits...>'");
    Vec theta;
    double v;
    while (ss >> v) theta.push_back(v);
    out.emplace_back(tmpl.num_states(), tmpl.num_actions(), tmpl.layout(), std::move(theta));
  }
  if (out.empty()) throw std::runtime_error("policies file " + path + " lists no policies");
  return out;
}

std::vector<SoftmaxPolicy> preset_policies(const std::string& env, const SoftmaxPolicy& tmpl) {
  std::vector<Vec> thetas;
  if (env == "two_state_mdp") {
    thetas = {{0.0, -1.0}, {0.0, -0.2}, {0.0, 0.75}, {0.0, 2.0}};
  } else if (env == "coinflips") {
    thetas = {{1.0, 1.0}, {1.0, 1.4}, {1.0, 2.2}, {0.5, 1.0}};
  } else if (env == "bandit") {
    thetas = {{3.0, 2.0, 1.0}, {0.0, 0.0, 0.0}, {1.0, 2.0, 3.0}};
  } else {
    throw std::invalid_argument("no preset policies for env '" + env + "'");
  }
  std::vector<SoftmaxPolicy> out;
  for (Vec& t : thetas)
    out.emplace_back(tmpl.num_states(), tmpl.num_actions(), tmpl.layout(), std::move(t));
  return out;
}

std::vector<CsvRow> run_fixed_policy_experiment(const ExperimentSpec& spec, int* /*aborted*/) {
  const KeyValueConfig& ov = spec.overrides;
  const std::string env = ov.get_string("env", "two_state_mdp");
  const TabularMdp mdp = build_environment(env == spec.experiment ? spec.experiment : env,
                                           spec.overrides);
  const SoftmaxPolicy tmpl = default_policy(env, mdp);

  std::vector<SoftmaxPolicy> policies;
  if (auto file = ov.get("policies_file"))
    policies = load_policies_file(*file, tmpl);
  else
    policies = preset_policies(env, tmpl);

  FixedPolicyConfig cfg;
  cfg.train_transitions = static_cast<std::size_t>(ov.get_int("train_transitions", 100000));
  cfg.eval_transitions = static_cast<std::size_t>(ov.get_int("eval_transitions", 100000));
  cfg.replications = spec.replications > 0 ? spec.replications : 10;
  cfg.gae = GaeParams(ov.get_double("gamma", 0.992), ov.get_double("kappa", 0.5));
  cfg.seed = spec.seed;
  cfg.threads = spec.threads;
  cfg.ppo.nsteps = static_cast<int>(ov.get_int("nsteps", 256));
  cfg.ppo.nepochs = static_cast<int>(ov.get_int("nepochs", 4));
  cfg.ppo.minibatch_size = static_cast<int>(ov.get_int("minibatch_size", 64));
  cfg.ppo.epsilon = ov.get_double("epsilon", 0.2);
  cfg.ppo.alpha_psi = ov.get_double("alpha_psi", 0.003);
  cfg.ppo.alpha_phi = ov.get_double("alpha_phi", 0.003);

  const auto records = fixed_policy_variance_experiment(mdp, policies, cfg);
  std::vector<CsvRow> rows;
  rows.reserve(records.size());
  for (const FixedPolicyRecord& rec : records) {
    CsvRow r = make_row(spec, rec.replication, rec.policy_index, "empirical_variance",
                        rec.report.variance, fixed_policy_estimator_name(rec.estimator));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public surface
// ---------------------------------------------------------------------------

TabularMdp build_environment(const std::string& experiment, const KeyValueConfig& overrides) {
  const std::string env = (experiment == "ppo" || experiment == "fixed_policy")
                              ? overrides.get_string("env", "two_state_mdp")
                              : experiment;
  if (env == "coinflips") return coin_flip_mdp(overrides.get_double("payoff_scale", 1.0));
  if (env == "bandit") return bandit_mdp();
  if (env == "two_state_mdp") {
    const auto rewards = two_state_rewards_from(overrides);
    if (!rewards)
      throw std::invalid_argument(
          "two_state_mdp rewards are not configured; supply reward_ll, reward_lr, reward_rl and "
          "reward_rr via --config (see configs/russo_mdp.cfg)");
    const double term = overrides.get_double("termination_prob", 0.2);
    const int cap = static_cast<int>(overrides.get_int("horizon_cap", 100));
    const double init_l = overrides.get_double("initial_left", 0.6);
    return two_state_mdp(rewards->ll, rewards->lr, rewards->rl, rewards->rr, term,
                         {init_l, 1.0 - init_l}, cap);
  }
  throw std::invalid_argument("unknown experiment/environment '" + env + "'");
}

SoftmaxPolicy default_policy(const std::string& experiment, const TabularMdp& mdp) {
  if (experiment == "coinflips")
    return SoftmaxPolicy(mdp.num_states(), mdp.num_actions(), PolicyLayout::StateAgnostic,
                         {1.0, 1.0});
  if (experiment == "bandit")
    return SoftmaxPolicy(mdp.num_states(), mdp.num_actions(), PolicyLayout::PerState,
                         {3.0, 2.0, 1.0});
  if (experiment == "two_state_mdp" || experiment == "ppo" || experiment == "fixed_policy")
    return SoftmaxPolicy(mdp.num_states(), mdp.num_actions(), PolicyLayout::StateAgnostic,
                         {0.0, -1.0});
  throw std::invalid_argument("unknown experiment '" + experiment + "'");
}

BaselineSpec analytic_baseline(const std::string& name, const TabularMdp& mdp,
                               const SoftmaxPolicy& policy, std::size_t max_paths) {
  if (name == "none") return BaselineSpec::none();
  if (name == "value") return BaselineSpec::per_state(exact_value_functions(mdp, policy).v);
  if (name == "q_weighted")
    return BaselineSpec::per_state(q_weighted_baseline_exact(mdp, policy));
  if (name == "constant_optimal")
    return optimal_baseline_exact(mdp, policy, ReturnsSpec::monte_carlo(), ContextKind::Constant,
                                  max_paths)
        .to_spec();
  if (name == "state_optimal")
    return optimal_baseline_exact(mdp, policy, ReturnsSpec::monte_carlo(), ContextKind::State,
                                  max_paths)
        .to_spec();
  if (name == "prefix_optimal")
    return optimal_baseline_exact(mdp, policy, ReturnsSpec::monte_carlo(), ContextKind::Prefix,
                                  max_paths)
        .to_spec();
  if (name == "per_parameter")
    return per_param_baseline_exact(mdp, policy, ReturnsSpec::monte_carlo(),
                                    ContextKind::Constant, max_paths)
        .to_spec();
  throw std::invalid_argument("unknown analytic baseline '" + name + "'");
}

std::vector<CsvRow> analytic_sweep_rows(const ExperimentSpec& spec) {
  const KeyValueConfig& ov = spec.overrides;
  std::vector<CsvRow> rows;
  if (spec.experiment == "coinflips" || spec.experiment == "bandit") {
    const bool coin = spec.experiment == "coinflips";
    const double lo = ov.get_double("grid_min", coin ? -2.0 : -4.0);
    const double hi = ov.get_double("grid_max", coin ? 4.0 : 4.0);
    const double step = ov.get_double("grid_step", coin ? 0.5 : 0.25);
    std::vector<double> scales{1.0};
    if (auto s = ov.get("payoff_scales")) scales = parse_double_list(*s);
    int index = 0;
    for (double scale : scales) {
      const TabularMdp mdp = coin ? coin_flip_mdp(scale) : bandit_mdp();
      for (double t = lo; t <= hi + 1e-9; t += step) {
        SoftmaxPolicy policy =
            coin ? SoftmaxPolicy(mdp.num_states(), 2, PolicyLayout::StateAgnostic,
                                 {ov.get_double("theta1", 1.0), t})
                 : SoftmaxPolicy(1, 3, PolicyLayout::PerState,
                                 {ov.get_double("theta1", 0.0), ov.get_double("theta2", 0.0), t});
        const BaselineSpec baseline = analytic_baseline(spec.baseline, mdp, policy);
        const VarianceReport report =
            exact_variance(mdp, policy, ReturnsSpec::monte_carlo(), baseline);
        rows.push_back(make_row(spec, 0, index, coin ? "theta2" : "theta3", t, spec.baseline));
        if (scales.size() > 1)
          rows.push_back(make_row(spec, 0, index, "payoff_scale", scale, spec.baseline));
        rows.push_back(
            make_row(spec, 0, index, "exact_variance", report.variance, spec.baseline));
        ++index;
      }
    }
    return rows;
  }
  if (spec.experiment == "two_state_mdp") {
    const TabularMdp mdp = build_environment(spec.experiment, ov);
    const double lo = ov.get_double("grid_min", -6.0);
    const double hi = ov.get_double("grid_max", 6.0);
    const double step = ov.get_double("grid_step", 0.1);
    const double theta1 = ov.get_double("theta1", 0.0);
    int index = 0;
    for (double t = lo; t <= hi + 1e-9; t += step) {
      SoftmaxPolicy policy(mdp.num_states(), 2, PolicyLayout::StateAgnostic, {theta1, t});
      rows.push_back(make_row(spec, 0, index, "theta2", t, spec.baseline));
      rows.push_back(make_row(spec, 0, index, "expected_reward",
                              exact_expected_reward(mdp, policy), spec.baseline));
      ++index;
    }
    return rows;
  }
  throw std::invalid_argument("--analytic is not available for experiment '" + spec.experiment +
                              "'");
}

std::vector<CsvRow> experiment_rows(const ExperimentSpec& spec, int* aborted_replications) {
  int aborted = 0;
  std::vector<CsvRow> rows;
  if (spec.analytic) {
    rows = analytic_sweep_rows(spec);
  } else if (spec.experiment == "coinflips") {
    const TabularMdp mdp = build_environment(spec.experiment, spec.overrides);
    rows = run_sgd_experiment(spec, mdp, default_policy(spec.experiment, mdp),
                              /*default_iters=*/2000, /*default_reps=*/20, "p_heads", 0, 1,
                              &aborted);
  } else if (spec.experiment == "bandit") {
    const TabularMdp mdp = build_environment(spec.experiment, spec.overrides);
    rows = run_sgd_experiment(spec, mdp, default_policy(spec.experiment, mdp),
                              /*default_iters=*/20000, /*default_reps=*/20, "p_best", 0, 2,
                              &aborted);
  } else if (spec.experiment == "two_state_mdp") {
    const TabularMdp mdp = build_environment(spec.experiment, spec.overrides);
    rows = run_sgd_experiment(spec, mdp, default_policy(spec.experiment, mdp),
                              /*default_iters=*/1500, /*default_reps=*/500, "p_right", 0, 1,
                              &aborted);
  } else if (spec.experiment == "ppo") {
    rows = run_ppo_experiment(spec, &aborted);
  } else if (spec.experiment == "fixed_policy") {
    rows = run_fixed_policy_experiment(spec, &aborted);
  } else {
    throw std::invalid_argument("unknown experiment '" + spec.experiment + "'");
  }
  if (aborted_replications) *aborted_replications = aborted;
  return rows;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  ExperimentResult result;
  std::vector<CsvRow> rows;
  try {
    rows = experiment_rows(spec, &result.aborted_replications);
  } catch (const std::exception& e) {
    result.exit_code = 2;
    result.message = e.what();
    return result;
  }
  write_csv_atomic(spec.output_path, rows);
  result.rows_written = rows.size();
  if (result.aborted_replications > 0 && !spec.allow_partial) {
    result.exit_code = 1;
    result.message = std::to_string(result.aborted_replications) +
                     " replication(s) aborted; rerun with --allow-partial to accept";
  } else {
    result.message = "wrote " + std::to_string(rows.size()) + " rows to " + spec.output_path;
  }
  return result;
}

}  // namespace gradvar
