#include "gradvar/trainers.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace gradvar {

namespace {

double objective_direction(ObjectiveSign sign) {
  return sign == ObjectiveSign::Maximize ? 1.0 : -1.0;
}

}  // namespace

const char* sgd_baseline_name(SgdBaseline b) {
  switch (b) {
    case SgdBaseline::None: return "none";
    case SgdBaseline::Value: return "value";
    case SgdBaseline::ConstantOptimal: return "constant_optimal";
    case SgdBaseline::StateOptimal: return "state_optimal";
    case SgdBaseline::PerParameter: return "per_parameter";
    case SgdBaseline::QWeighted: return "q_weighted";
  }
  return "?";
}

const char* ppo_variant_name(PpoVariant v) {
  switch (v) {
    case PpoVariant::Vanilla: return "vanilla";
    case PpoVariant::Optimal: return "optimal";
    case PpoVariant::PerParameter: return "per_parameter";
    case PpoVariant::ExtraBaseline: return "extra_baseline";
  }
  return "?";
}

const char* fixed_policy_estimator_name(FixedPolicyEstimator e) {
  switch (e) {
    case FixedPolicyEstimator::Reinforce: return "reinforce";
    case FixedPolicyEstimator::ReinforceValue: return "reinforce_value";
    case FixedPolicyEstimator::ReinforceOptimal: return "reinforce_optimal";
    case FixedPolicyEstimator::Gae: return "gae";
    case FixedPolicyEstimator::GaeOptimal: return "gae_optimal";
    case FixedPolicyEstimator::GaePerParameter: return "gae_per_parameter";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// SGD
// ---------------------------------------------------------------------------

namespace {

struct SgdModels {
  ValueBaseline value;      // subtracted baseline (MonteCarlo mode)
  ValueBaseline vhat;       // bootstrap table (Gae mode)
  OptimalBaseline optimal;
  PerParamBaseline per_param;
};

}  // namespace

TrainingTrace sgd_train(const TabularMdp& mdp, SoftmaxPolicy policy, const SgdEstimatorSpec& est,
                        const SgdConfig& cfg, Rng& rng) {
  if (cfg.learning_rate < 0.0) throw std::invalid_argument("sgd_train: negative learning rate");
  if (cfg.iterations <= 0) throw std::invalid_argument("sgd_train: iterations must be positive");
  if (est.baseline == SgdBaseline::QWeighted && !est.exact_oracle)
    throw std::invalid_argument("sgd_train: q_weighted baseline requires the exact oracle");
  if (est.returns == ReturnKind::Gae && est.baseline == SgdBaseline::Value)
    throw std::invalid_argument(
        "sgd_train: value baseline is already part of the GAE advantage; pick none or an "
        "optimal baseline");

  const ContextKind opt_context = est.baseline == SgdBaseline::StateOptimal
                                      ? ContextKind::State
                                      : ContextKind::Constant;
  SgdModels models{
      ValueBaseline(mdp.num_states(), est.baseline_learning_rate, est.fit),
      ValueBaseline(mdp.num_states(), est.baseline_learning_rate, est.fit),
      OptimalBaseline(opt_context, mdp.num_states(), est.baseline_learning_rate, est.fit),
      PerParamBaseline(policy.dim(), est.baseline_learning_rate, est.fit)};

  const bool enumerable = enumeration_feasible(mdp, cfg.enumeration_bound);
  const double direction = objective_direction(cfg.objective);

  auto returns_spec = [&]() -> ReturnsSpec {
    switch (est.returns) {
      case ReturnKind::MonteCarlo: return ReturnsSpec::monte_carlo();
      case ReturnKind::Discounted: return ReturnsSpec::discounted(est.gae.gamma);
      case ReturnKind::Gae: return ReturnsSpec::gae_spec(est.gae, models.vhat.table());
    }
    throw std::logic_error("sgd_train: bad return kind");
  };

  auto baseline_spec = [&]() -> BaselineSpec {
    switch (est.baseline) {
      case SgdBaseline::None:
        return BaselineSpec::none();
      case SgdBaseline::Value:
        return models.value.to_spec();
      case SgdBaseline::ConstantOptimal:
      case SgdBaseline::StateOptimal:
        if (est.exact_oracle)
          return optimal_baseline_exact(mdp, policy, returns_spec(), opt_context,
                                        cfg.enumeration_bound)
              .to_spec();
        return models.optimal.to_spec();
      case SgdBaseline::PerParameter:
        if (est.exact_oracle)
          return per_param_baseline_exact(mdp, policy, returns_spec(), ContextKind::Constant,
                                          cfg.enumeration_bound)
              .to_spec();
        return models.per_param.to_spec();
      case SgdBaseline::QWeighted:
        return BaselineSpec::per_state(q_weighted_baseline_exact(mdp, policy));
    }
    throw std::logic_error("sgd_train: bad baseline kind");
  };

  TrainingTrace trace;
  auto probe_variance = [&](int iteration) -> std::optional<VarianceReport> {
    if (cfg.variance_log_every <= 0 || iteration % cfg.variance_log_every != 0)
      return std::nullopt;
    const ReturnsSpec rs = returns_spec();
    const BaselineSpec bs = baseline_spec();
    if (enumerable) return exact_variance(mdp, policy, rs, bs, cfg.enumeration_bound);
    Rng probe(derive_seed(cfg.seed ^ 0x5eedfeedULL, static_cast<std::uint64_t>(iteration)));
    std::vector<Vec> samples;
    samples.reserve(cfg.variance_samples);
    for (std::size_t k = 0; k < cfg.variance_samples; ++k)
      samples.push_back(episode_gradient(sample_trajectory(mdp, policy, probe), policy, rs, bs));
    return empirical_variance_of(samples);
  };

  auto record = [&](int iteration) {
    TraceRecord rec;
    rec.iteration = iteration;
    rec.expected_reward = exact_expected_reward(mdp, policy);
    rec.theta = policy.theta();
    rec.variance = probe_variance(iteration);
    trace.records.push_back(std::move(rec));
  };

  record(0);
  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    const Trajectory traj = sample_trajectory(mdp, policy, rng);
    const ReturnsSpec rs = returns_spec();
    const auto fs = rs.compute(traj, mdp.num_states());
    const BaselineSpec bs = baseline_spec();

    std::vector<ScoreVector> scores(traj.transitions.size());
    Vec g_sf(policy.dim(), 0.0);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      scores[i] = policy.score(traj.transitions[i].state, traj.transitions[i].action);
      axpy(fs[i].f, scores[i], g_sf);
    }

    std::vector<BatchItem> batch(traj.transitions.size());
    std::vector<Vec> betas(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      batch[i].transition = traj.transitions[i];
      batch[i].ret = fs[i];
      if (bs.per_parameter) {
        betas[i] = bs.per_parameter(traj, i);
        batch[i].baseline_vec = &betas[i];
      } else if (bs.scalar) {
        batch[i].baseline = bs.scalar(traj, i);
      }
    }
    const GradientEstimate g = assemble(batch, policy);
    policy.step_theta(g.g, direction * cfg.learning_rate);

    // Baseline fitting, by default from the same episode the policy stepped
    // on; optionally from an independently sampled one.
    const Trajectory* fit_traj = &traj;
    Trajectory extra_traj;
    std::vector<ScoreVector> fit_scores;
    const std::vector<ScoreVector>* fit_scores_ptr = &scores;
    Vec fit_g_sf = g_sf;
    std::vector<ReturnEstimate> fit_fs = fs;
    if (cfg.independent_baseline_batch) {
      extra_traj = sample_trajectory(mdp, policy, rng);
      fit_traj = &extra_traj;
      fit_fs = rs.compute(extra_traj, mdp.num_states());
      fit_scores.resize(extra_traj.transitions.size());
      fit_g_sf.assign(policy.dim(), 0.0);
      for (std::size_t i = 0; i < fit_scores.size(); ++i) {
        fit_scores[i] = policy.score(extra_traj.transitions[i].state,
                                     extra_traj.transitions[i].action);
        axpy(fit_fs[i].f, fit_scores[i], fit_g_sf);
      }
      fit_scores_ptr = &fit_scores;
    }

    if (est.returns == ReturnKind::Gae) {
      std::vector<std::pair<int, double>> targets;
      targets.reserve(fit_traj->transitions.size());
      for (std::size_t i = 0; i < fit_traj->transitions.size(); ++i)
        targets.emplace_back(fit_traj->transitions[i].state, fit_fs[i].r_used);
      models.vhat.update(targets);
    }
    if (!est.exact_oracle) {
      switch (est.baseline) {
        case SgdBaseline::Value: {
          std::vector<std::pair<int, double>> targets;
          targets.reserve(fit_traj->transitions.size());
          for (std::size_t i = 0; i < fit_traj->transitions.size(); ++i)
            targets.emplace_back(fit_traj->transitions[i].state, fit_fs[i].r_used);
          models.value.update(targets);
          break;
        }
        case SgdBaseline::ConstantOptimal:
        case SgdBaseline::StateOptimal:
          models.optimal.update(*fit_traj, *fit_scores_ptr, fit_g_sf);
          break;
        case SgdBaseline::PerParameter:
          models.per_param.update_minibatch(*fit_scores_ptr, {}, fit_g_sf);
          break;
        default:
          break;
      }
    }

    if (max_abs(policy.theta()) > cfg.divergence_cap) {
      trace.aborted = true;
      trace.abort_iteration = iter;
      trace.abort_reason = "theta magnitude exceeded " + std::to_string(cfg.divergence_cap);
      record(iter);
      return trace;
    }
    record(iter);
  }
  return trace;
}

SoftmaxPolicy exact_gradient_descent(const TabularMdp& mdp, SoftmaxPolicy policy,
                                     double learning_rate, int iterations, double gamma) {
  const double direction = objective_direction(mdp.objective());
  for (int i = 0; i < iterations; ++i) {
    const Vec g = exact_policy_gradient(mdp, policy, gamma);
    if (max_abs(g) < 1e-14) break;
    policy.step_theta(g, direction * learning_rate);
  }
  return policy;
}

// ---------------------------------------------------------------------------
// PPO
// ---------------------------------------------------------------------------

void PpoConfig::validate() const {
  if (nsteps <= 0 || nepochs <= 0 || niterations <= 0 || minibatch_size <= 0)
    throw std::invalid_argument("PpoConfig: counts must be positive");
  if (minibatch_size > nsteps)
    throw std::invalid_argument("PpoConfig: minibatch_size must not exceed nsteps");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("PpoConfig: epsilon must be in (0, 1)");
  if (alpha_theta < 0.0 || alpha_psi < 0.0 || alpha_phi < 0.0)
    throw std::invalid_argument("PpoConfig: learning rates must be nonnegative");
}

PpoState make_ppo_state(const TabularMdp& mdp, SoftmaxPolicy policy, const PpoConfig& cfg) {
  const int dim = policy.dim();
  const double psi_lr = cfg.alpha_psi > 0.0 ? cfg.alpha_psi : 1e-3;
  const double phi_lr = cfg.alpha_phi > 0.0 ? cfg.alpha_phi : 1e-3;
  return PpoState{std::move(policy),
                  ValueBaseline(mdp.num_states(), psi_lr, FitMode::ConstantRate),
                  OptimalBaseline(ContextKind::State, mdp.num_states(), phi_lr,
                                  FitMode::ConstantRate),
                  PerParamBaseline(dim, phi_lr, FitMode::ConstantRate),
                  ValueBaseline(mdp.num_states(), phi_lr, FitMode::ConstantRate)};
}

namespace {

struct RolloutStep {
  int state = 0;
  int action = 0;
  double reward = 0.0;
  double logp_old = 0.0;
  int next_state = kTerminal;
  bool done = false;
};

// GAE over the episode segments of a rollout buffer. Segments cut by the
// buffer end (not terminated) bootstrap their tail with vhat(next_state).
void compute_gae_over_buffer(const std::vector<RolloutStep>& buf, const ValueTable& vhat,
                             const GaeParams& params, Vec& f_out, Vec& ret_out) {
  const std::size_t n = buf.size();
  f_out.assign(n, 0.0);
  ret_out.assign(n, 0.0);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start;
    while (end < n && !buf[end].done) ++end;
    const bool terminated = end < n;
    if (terminated) ++end;  // include the terminal transition
    Trajectory seg;
    seg.transitions.reserve(end - start);
    for (std::size_t i = start; i < end; ++i)
      seg.transitions.push_back({buf[i].state, buf[i].action, buf[i].reward, buf[i].logp_old,
                                 static_cast<int>(i - start + 1)});
    const double tail =
        terminated ? 0.0
                   : (buf[end - 1].next_state == kTerminal ? 0.0 : vhat[buf[end - 1].next_state]);
    const auto fs = gae_advantages(seg, vhat, params, tail);
    for (std::size_t i = start; i < end; ++i) {
      f_out[i] = fs[i - start].f;
      ret_out[i] = fs[i - start].r_used;
    }
    start = end;
  }
}

BaselineSpec ppo_baseline_spec(const PpoState& state, const PpoConfig& cfg) {
  switch (cfg.variant) {
    case PpoVariant::Vanilla:
      return BaselineSpec::none();
    case PpoVariant::Optimal: {
      if (cfg.force_zero_optimal) return BaselineSpec::none();
      return state.optimal.to_spec();
    }
    case PpoVariant::PerParameter:
      return state.per_param.to_spec();
    case PpoVariant::ExtraBaseline:
      return BaselineSpec::per_state(state.extra.table());
  }
  throw std::logic_error("ppo_baseline_spec: bad variant");
}

}  // namespace

PpoResult ppo_train(const TabularMdp& mdp, PpoState state, const PpoConfig& cfg, Rng& rng) {
  cfg.validate();
  const double direction = objective_direction(cfg.objective);
  const bool enumerable = enumeration_feasible(mdp, cfg.enumeration_bound);

  TrainingTrace trace;
  auto probe_variance = [&](int iteration) -> std::optional<VarianceReport> {
    if (cfg.variance_log_every <= 0 || iteration % cfg.variance_log_every != 0)
      return std::nullopt;
    const ReturnsSpec rs = ReturnsSpec::gae_spec(cfg.gae, state.value.table());
    const BaselineSpec bs = ppo_baseline_spec(state, cfg);
    if (enumerable)
      return exact_variance(mdp, state.policy, rs, bs, cfg.enumeration_bound);
    Rng probe(derive_seed(cfg.seed ^ 0x9907feedULL, static_cast<std::uint64_t>(iteration)));
    std::vector<Vec> samples;
    samples.reserve(cfg.variance_samples);
    for (std::size_t k = 0; k < cfg.variance_samples; ++k)
      samples.push_back(
          episode_gradient(sample_trajectory(mdp, state.policy, probe), state.policy, rs, bs));
    return empirical_variance_of(samples);
  };
  auto record = [&](int iteration) {
    TraceRecord rec;
    rec.iteration = iteration;
    rec.expected_reward = exact_expected_reward(mdp, state.policy);
    rec.theta = state.policy.theta();
    rec.variance = probe_variance(iteration);
    trace.records.push_back(std::move(rec));
  };

  std::vector<RolloutStep> buf(cfg.nsteps);
  Vec f_all, ret_all;
  std::vector<std::size_t> order(cfg.nsteps);

  record(0);
  for (int iteration = 1; iteration <= cfg.niterations; ++iteration) {
    // Rollout, keeping pi_old in memory.
    int state_id = static_cast<int>(rng.categorical(mdp.initial_dist()));
    int steps_in_episode = 0;
    for (int i = 0; i < cfg.nsteps; ++i) {
      const Vec probs = state.policy.action_probs(state_id);
      const int action = static_cast<int>(rng.categorical(probs));
      const auto& outs = mdp.outcomes(state_id, action);
      Vec oprobs(outs.size());
      for (std::size_t k = 0; k < outs.size(); ++k) oprobs[k] = outs[k].prob;
      const Outcome& o = outs[rng.categorical(oprobs)];
      ++steps_in_episode;
      const bool done = o.next == kTerminal || steps_in_episode >= mdp.horizon_cap();
      buf[i] = {state_id, action, o.reward, std::log(probs[action]), o.next, done};
      if (done) {
        state_id = static_cast<int>(rng.categorical(mdp.initial_dist()));
        steps_in_episode = 0;
      } else {
        state_id = o.next;
      }
    }

    for (int epoch = 0; epoch < cfg.nepochs; ++epoch) {
      // Epoch-start tables: advantages, return targets and baseline values
      // all come from the parameters as they stand here.
      const ValueTable vhat = state.value.table();
      compute_gae_over_buffer(buf, vhat, cfg.gae, f_all, ret_all);
      Vec beta_by_state;
      if (cfg.variant == PpoVariant::Optimal) {
        beta_by_state.assign(mdp.num_states(), 0.0);
        if (!cfg.force_zero_optimal)
          for (int s = 0; s < mdp.num_states(); ++s)
            beta_by_state[s] = state.optimal.value_for({static_cast<double>(s)});
      }
      Vec extra_by_state;
      if (cfg.variant == PpoVariant::ExtraBaseline) extra_by_state = state.extra.table();
      Vec beta_pp;
      if (cfg.variant == PpoVariant::PerParameter) beta_pp = state.per_param.value();

      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      rng.shuffle(order);

      for (int mb_start = 0; mb_start < cfg.nsteps; mb_start += cfg.minibatch_size) {
        const int mb_end = std::min(mb_start + cfg.minibatch_size, cfg.nsteps);
        const int m = mb_end - mb_start;

        std::vector<double> is(m), clip(m), f(m);
        std::vector<ScoreVector> scores(m);
        std::vector<int> states_mb(m);
        for (int j = 0; j < m; ++j) {
          const RolloutStep& step = buf[order[mb_start + j]];
          f[j] = f_all[order[mb_start + j]];
          states_mb[j] = step.state;
          const double logp_now = state.policy.log_prob(step.state, step.action);
          is[j] = importance_weight(logp_now, step.logp_old, cfg.is_cap);
          clip[j] = ppo_clip_indicator(f[j], is[j], cfg.epsilon);
          scores[j] = state.policy.score(step.state, step.action);
        }

        // Policy update.
        Vec g(state.policy.dim(), 0.0);
        for (int j = 0; j < m; ++j) {
          const double w = is[j] * clip[j];
          if (cfg.variant == PpoVariant::PerParameter) {
            for (std::size_t k = 0; k < g.size(); ++k)
              g[k] += (f[j] - beta_pp[k]) * w * scores[j][k];
          } else {
            double beta = 0.0;
            if (cfg.variant == PpoVariant::Optimal && !cfg.force_zero_optimal)
              beta = beta_by_state[states_mb[j]];
            else if (cfg.variant == PpoVariant::ExtraBaseline)
              beta = extra_by_state[states_mb[j]];
            axpy((f[j] - beta) * w, scores[j], g);
          }
        }
        if (!cfg.fixed_policy) state.policy.step_theta(g, direction * cfg.alpha_theta);

        // Value update toward the epoch-start return targets.
        if (cfg.train_value) {
          std::vector<std::pair<int, double>> targets(m);
          for (int j = 0; j < m; ++j)
            targets[j] = {states_mb[j], ret_all[order[mb_start + j]]};
          state.value.update(targets);
        }

        // Baseline updates use the pre-step scores and ratios.
        if (cfg.variant == PpoVariant::Optimal) {
          Vec g_sf(state.policy.dim(), 0.0);
          for (int j = 0; j < m; ++j) axpy(f[j] * is[j] * clip[j], scores[j], g_sf);
          std::vector<std::tuple<ContextKey, double, double>> samples;
          samples.reserve(m);
          for (int j = 0; j < m; ++j) {
            const double top = is[j] * dot(g_sf, scores[j]);
            const double bot = is[j] * is[j] * norm_sq(scores[j]);
            samples.emplace_back(ContextKey{static_cast<double>(states_mb[j])}, top, bot);
          }
          state.optimal.update_minibatch(samples);
        } else if (cfg.variant == PpoVariant::PerParameter) {
          Vec g_sf(state.policy.dim(), 0.0);
          for (int j = 0; j < m; ++j) axpy(f[j] * is[j] * clip[j], scores[j], g_sf);
          state.per_param.update_minibatch(scores, is, g_sf);
        } else if (cfg.variant == PpoVariant::ExtraBaseline) {
          std::vector<std::pair<int, double>> targets(m);
          for (int j = 0; j < m; ++j) targets[j] = {states_mb[j], f[j]};
          state.extra.update(targets);
        }
      }
    }

    if (max_abs(state.policy.theta()) > cfg.divergence_cap) {
      trace.aborted = true;
      trace.abort_iteration = iteration;
      trace.abort_reason = "theta magnitude exceeded " + std::to_string(cfg.divergence_cap);
      record(iteration);
      return {std::move(trace), std::move(state)};
    }
    record(iteration);
  }
  return {std::move(trace), std::move(state)};
}

// ---------------------------------------------------------------------------
// Fixed-policy experiment
// ---------------------------------------------------------------------------

namespace {

struct EstimatorSetup {
  PpoVariant variant;
  bool train_value;
  double kappa;
};

EstimatorSetup fixed_policy_setup(FixedPolicyEstimator est, const GaeParams& gae) {
  switch (est) {
    case FixedPolicyEstimator::Reinforce: return {PpoVariant::Vanilla, false, 1.0};
    case FixedPolicyEstimator::ReinforceValue: return {PpoVariant::Vanilla, true, 1.0};
    case FixedPolicyEstimator::ReinforceOptimal: return {PpoVariant::Optimal, false, 1.0};
    case FixedPolicyEstimator::Gae: return {PpoVariant::Vanilla, true, gae.kappa};
    case FixedPolicyEstimator::GaeOptimal: return {PpoVariant::Optimal, true, gae.kappa};
    case FixedPolicyEstimator::GaePerParameter: return {PpoVariant::PerParameter, true, gae.kappa};
  }
  throw std::logic_error("fixed_policy_setup: bad estimator");
}

}  // namespace

std::vector<FixedPolicyRecord> fixed_policy_variance_experiment(
    const TabularMdp& mdp, const std::vector<SoftmaxPolicy>& policies,
    const FixedPolicyConfig& cfg) {
  if (policies.empty())
    throw std::invalid_argument("fixed_policy_variance_experiment: no policies given");
  const std::size_t cells = policies.size() * cfg.estimators.size() *
                            static_cast<std::size_t>(cfg.replications);
  std::vector<FixedPolicyRecord> records(cells);

  parallel_for(cells, cfg.threads, [&](std::size_t cell) {
    const std::size_t per_policy = cfg.estimators.size() * cfg.replications;
    const int policy_index = static_cast<int>(cell / per_policy);
    const std::size_t within = cell % per_policy;
    const int est_index = static_cast<int>(within / cfg.replications);
    const int replication = static_cast<int>(within % cfg.replications);
    const FixedPolicyEstimator est = cfg.estimators[est_index];
    const EstimatorSetup setup = fixed_policy_setup(est, cfg.gae);

    Rng rng(derive_seed(cfg.seed, cell));

    PpoConfig pc = cfg.ppo;
    pc.fixed_policy = true;
    pc.variant = setup.variant;
    pc.train_value = setup.train_value;
    pc.gae = GaeParams(cfg.gae.gamma, setup.kappa);
    pc.variance_log_every = 0;
    pc.objective = mdp.objective();
    pc.niterations = std::max<int>(
        1, static_cast<int>((cfg.train_transitions + pc.nsteps - 1) / pc.nsteps));

    PpoState state = make_ppo_state(mdp, policies[policy_index], pc);
    const bool anything_to_train = setup.train_value || setup.variant != PpoVariant::Vanilla;
    if (anything_to_train) {
      PpoResult result = ppo_train(mdp, std::move(state), pc, rng);
      state = std::move(result.state);
    }

    // Measurement phase: frozen nets, fresh on-policy episodes.
    const ReturnsSpec rs = ReturnsSpec::gae_spec(pc.gae, state.value.table());
    const BaselineSpec bs = ppo_baseline_spec(state, pc);
    std::vector<Vec> samples;
    std::size_t transitions_seen = 0;
    while (transitions_seen < cfg.eval_transitions || samples.size() < 2) {
      const Trajectory traj = sample_trajectory(mdp, state.policy, rng);
      transitions_seen += traj.transitions.size();
      samples.push_back(episode_gradient(traj, state.policy, rs, bs));
    }
    records[cell] = {policy_index, est, replication, empirical_variance_of(samples)};
  });
  return records;
}

}  // namespace gradvar
