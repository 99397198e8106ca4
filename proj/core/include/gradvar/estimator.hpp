#pragma once

#include <functional>
#include <span>

#include "gradvar/common.hpp"
#include "gradvar/mdp.hpp"
#include "gradvar/policy.hpp"
#include "gradvar/returns.hpp"

namespace gradvar {

struct EstimateComponent {
  double f;
  double baseline;
  double weight;
  ScoreVector score;
};

struct GradientEstimate {
  Vec g;
  int n = 0;  // mini-batch size
  std::vector<EstimateComponent> components;  // retained only on request
};

/// Second-moment decomposition of a gradient estimator: the variance of a
/// vector is the sum of its per-component variances,
/// variance = E||g||^2 - ||E g||^2.
struct VarianceReport {
  double second_moment = 0.0;
  double mean_norm_sq = 0.0;
  double variance = 0.0;
  bool exact = false;             // exact enumeration vs empirical
  std::size_t sample_count = 0;   // 0 when exact
};

/// A baseline viewed purely as something evaluable along a trajectory.
/// Exactly one of `scalar` / `per_parameter` is set; neither means zero.
struct BaselineSpec {
  std::function<double(const Trajectory&, std::size_t)> scalar;
  std::function<Vec(const Trajectory&, std::size_t)> per_parameter;

  static BaselineSpec none() { return {}; }
  static BaselineSpec constant(double value) {
    BaselineSpec b;
    b.scalar = [value](const Trajectory&, std::size_t) { return value; };
    return b;
  }
  static BaselineSpec per_state(Vec table) {
    BaselineSpec b;
    b.scalar = [table = std::move(table)](const Trajectory& traj, std::size_t i) {
      const int s = traj.transitions[i].state;
      if (s < 0 || static_cast<std::size_t>(s) >= table.size())
        throw std::invalid_argument("BaselineSpec::per_state: no entry for state " +
                                    std::to_string(s));
      return table[s];
    };
    return b;
  }
  static BaselineSpec per_parameter_constant(Vec values) {
    BaselineSpec b;
    b.per_parameter = [values = std::move(values)](const Trajectory&, std::size_t) {
      return values;
    };
    return b;
  }
};

struct BatchItem {
  Transition transition;
  ReturnEstimate ret;
  double baseline = 0.0;
  const Vec* baseline_vec = nullptr;  // per-parameter; overrides `baseline`
};

/// Importance-sampling / clipping configuration for assemble(). With
/// everything off the weights are exactly 1 (on-policy).
struct IsConfig {
  bool importance_sampling = false;
  bool clip = false;
  double epsilon = 0.2;
  double is_cap = 1e6;
};

/// exp(logprob_now - logprob_old), capped at `cap`. `capped`, when given,
/// reports that the cap fired.
double importance_weight(double logprob_now, double logprob_old, double cap = 1e6,
                         bool* capped = nullptr);

/// The clipping indicator: 0 iff (f > 0 and is > 1+eps) or (f < 0 and
/// is < 1-eps), else 1. Inequalities are strict.
double ppo_clip_indicator(double f, double is_ratio, double epsilon);

/// g = sum_i (F_i - beta_i) * w_i * score_i, with w_i = IS_i * CLIP_i in
/// PPO mode and 1 otherwise.
GradientEstimate assemble(std::span<const BatchItem> batch, const SoftmaxPolicy& policy,
                          const IsConfig& is_config = {}, bool keep_components = false);

/// On-policy full-episode estimate g = sum_i (F_i - beta_i) * score_i for one
/// trajectory; the unit every toy-problem estimator is built from.
Vec episode_gradient(const Trajectory& traj, const SoftmaxPolicy& policy,
                     const ReturnsSpec& returns, const BaselineSpec& baseline);

struct GradientMoments {
  Vec mean;
  double second_moment = 0.0;
};

/// Exact E[g] and E||g||^2 over full-episode estimates, by enumeration.
/// One episode per estimate; weights are on-policy.
GradientMoments exact_gradient_moments(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                       const ReturnsSpec& returns, const BaselineSpec& baseline,
                                       std::size_t max_paths = kDefaultEnumerationBound);

/// Same moments evaluated over a pre-enumerated path list.
GradientMoments exact_gradient_moments(std::span<const EnumeratedPath> paths,
                                       const SoftmaxPolicy& policy, const ReturnsSpec& returns,
                                       const BaselineSpec& baseline);

VarianceReport exact_variance(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                              const ReturnsSpec& returns, const BaselineSpec& baseline,
                              std::size_t max_paths = kDefaultEnumerationBound);

/// Plug-in estimate of the variance from m >= 2 draws of `sampler`.
VarianceReport empirical_variance(const std::function<Vec()>& sampler, std::size_t m);

/// The same plug-in computation over already-collected estimates.
VarianceReport empirical_variance_of(std::span<const Vec> samples);

}  // namespace gradvar
