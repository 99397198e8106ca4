#pragma once

#include <optional>

#include "gradvar/baselines.hpp"
#include "gradvar/estimator.hpp"
#include "gradvar/mdp.hpp"
#include "gradvar/policy.hpp"
#include "gradvar/returns.hpp"

namespace gradvar {

// ---------------------------------------------------------------------------
// Plain SGD on small problems
// ---------------------------------------------------------------------------

enum class SgdBaseline { None, Value, ConstantOptimal, StateOptimal, PerParameter, QWeighted };

const char* sgd_baseline_name(SgdBaseline b);

/// What multiplies each score function and what gets subtracted from it.
struct SgdEstimatorSpec {
  ReturnKind returns = ReturnKind::MonteCarlo;
  GaeParams gae{0.9, 0.2};  // used when returns == Gae
  SgdBaseline baseline = SgdBaseline::None;
  /// Recompute the baseline from the enumeration oracle at the current theta
  /// each iteration, instead of fitting it from samples. Required for
  /// QWeighted (no learned Q model exists here).
  bool exact_oracle = false;
  FitMode fit = FitMode::RunningAverage;
  double baseline_learning_rate = 0.01;
};

struct SgdConfig {
  double learning_rate = 0.01;
  int iterations = 2000;
  int replications = 20;  // metadata; sgd_train runs a single replication
  std::uint64_t seed = 0;
  ObjectiveSign objective = ObjectiveSign::Maximize;
  int variance_log_every = 10;         // 0 disables variance probes
  std::size_t variance_samples = 200;  // draws for the empirical fallback
  bool independent_baseline_batch = false;
  double divergence_cap = 1e6;
  std::size_t enumeration_bound = kDefaultEnumerationBound;
};

struct TraceRecord {
  int iteration = 0;
  double expected_reward = 0.0;
  Vec theta;
  std::optional<VarianceReport> variance;
};

struct TrainingTrace {
  std::vector<TraceRecord> records;
  bool aborted = false;
  int abort_iteration = -1;
  std::string abort_reason;
};

/// One SGD replication: per iteration sample an episode, assemble the
/// gradient with the configured baseline, step theta along it (sign per
/// objective), then update the baseline from the same episode.
TrainingTrace sgd_train(const TabularMdp& mdp, SoftmaxPolicy policy, const SgdEstimatorSpec& est,
                        const SgdConfig& cfg, Rng& rng);

/// Follow the exact expected gradient (no sampling). Returns the policy at
/// the last iterate; used for basin-of-attraction analysis.
SoftmaxPolicy exact_gradient_descent(const TabularMdp& mdp, SoftmaxPolicy policy,
                                     double learning_rate, int iterations, double gamma = 1.0);

// ---------------------------------------------------------------------------
// PPO
// ---------------------------------------------------------------------------

enum class PpoVariant { Vanilla, Optimal, PerParameter, ExtraBaseline };

const char* ppo_variant_name(PpoVariant v);

struct PpoConfig {
  int nsteps = 256;
  int nepochs = 4;
  int niterations = 150;
  int minibatch_size = 64;
  double epsilon = 0.2;
  GaeParams gae{0.99, 0.95};
  double alpha_theta = 0.01;
  double alpha_psi = 0.003;
  double alpha_phi = 0.003;
  PpoVariant variant = PpoVariant::Vanilla;
  /// Remove the policy update from every mini-batch (baseline fitting runs).
  bool fixed_policy = false;
  /// Disable the value-function update (keeps vhat identically zero when the
  /// estimator is meant to run without bootstrapping or value subtraction).
  bool train_value = true;
  /// Force the optimal-baseline output to exactly zero while keeping its
  /// regression running; with equal seeds this must reproduce the vanilla
  /// theta trajectory bit for bit.
  bool force_zero_optimal = false;
  std::uint64_t seed = 0;
  ObjectiveSign objective = ObjectiveSign::Maximize;
  int variance_log_every = 10;  // iterations; 0 disables
  std::size_t variance_samples = 200;
  std::size_t enumeration_bound = kDefaultEnumerationBound;
  double divergence_cap = 1e6;
  double is_cap = 1e6;

  void validate() const;
};

struct PpoState {
  SoftmaxPolicy policy;
  ValueBaseline value;
  OptimalBaseline optimal;
  PerParamBaseline per_param;
  ValueBaseline extra;
};

PpoState make_ppo_state(const TabularMdp& mdp, SoftmaxPolicy policy, const PpoConfig& cfg);

struct PpoResult {
  TrainingTrace trace;
  PpoState state;
};

/// The clipped-surrogate training loop, with the gradient taken directly as
/// sum_i (F_i - beta_i) * IS_i * CLIP_i * score_i. Per iteration: roll out
/// nsteps transitions keeping pi_old in memory, then per epoch recompute the
/// GAE advantages and return targets and sweep shuffled mini-batches with
/// policy / value / baseline updates.
PpoResult ppo_train(const TabularMdp& mdp, PpoState state, const PpoConfig& cfg, Rng& rng);

// ---------------------------------------------------------------------------
// Fixed-policy baseline fitting + variance measurement
// ---------------------------------------------------------------------------

enum class FixedPolicyEstimator {
  Reinforce,         // discounted returns, no value function
  ReinforceValue,    // discounted returns minus a learned value baseline
  ReinforceOptimal,  // discounted returns minus a learned optimal baseline
  Gae,               // bootstrapped advantages
  GaeOptimal,        // GAE plus a learned optimal baseline
  GaePerParameter,   // GAE plus a learned per-parameter baseline
};

const char* fixed_policy_estimator_name(FixedPolicyEstimator e);

struct FixedPolicyConfig {
  std::size_t train_transitions = 100000;
  std::size_t eval_transitions = 100000;
  int replications = 10;
  GaeParams gae{0.992, 0.5};
  std::uint64_t seed = 0;
  PpoConfig ppo;  // learning rates / batch shape for the fitting phase
  int threads = 0;  // 0: decide from GRADVAR_THREADS / hardware
  std::vector<FixedPolicyEstimator> estimators{
      FixedPolicyEstimator::Reinforce,      FixedPolicyEstimator::ReinforceValue,
      FixedPolicyEstimator::ReinforceOptimal, FixedPolicyEstimator::Gae,
      FixedPolicyEstimator::GaeOptimal,     FixedPolicyEstimator::GaePerParameter};
};

struct FixedPolicyRecord {
  int policy_index;
  FixedPolicyEstimator estimator;
  int replication;
  VarianceReport report;
};

/// For each saved policy x estimator: fit the baselines on N1 transitions
/// with the policy held fixed, then measure the empirical variance of the
/// per-episode gradient estimator on N2 fresh transitions. Replicated with
/// independent streams.
std::vector<FixedPolicyRecord> fixed_policy_variance_experiment(
    const TabularMdp& mdp, const std::vector<SoftmaxPolicy>& policies,
    const FixedPolicyConfig& cfg);

}  // namespace gradvar
