#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <tuple>

#include "gradvar/estimator.hpp"
#include "gradvar/mdp.hpp"
#include "gradvar/policy.hpp"
#include "gradvar/returns.hpp"

namespace gradvar {

/// What the baseline function is allowed to look at for step i:
///   Constant - nothing,
///   State    - the current state s_i,
///   Prefix   - everything observed so far: s_1, a_1, r_1, ..., s_i.
/// The prefix never includes a_i or anything later.
enum class ContextKind { Constant, State, Prefix };

/// Exact context value, encoded so equal contexts compare equal bit for bit.
using ContextKey = std::vector<double>;

ContextKey context_key(ContextKind kind, const Trajectory& traj, std::size_t i);

const char* context_name(ContextKind kind);
ContextKind context_from_name(const std::string& name);

/// How iterative fits move their accumulators:
///   RunningAverage - exact sample mean (the 1/t step-size schedule); the
///                    default for finite context spaces, no tuning needed.
///   ConstantRate   - plain SGD with a fixed learning rate.
enum class FitMode { RunningAverage, ConstantRate };

// ---------------------------------------------------------------------------
// Learned models
// ---------------------------------------------------------------------------

/// Per-state regression beta(s) -> E[R | s], the classic value baseline.
class ValueBaseline {
 public:
  explicit ValueBaseline(int num_states, double learning_rate = 0.01,
                         FitMode mode = FitMode::ConstantRate);

  double value(int state) const;
  const Vec& table() const { return phi_; }
  double learning_rate() const { return learning_rate_; }

  /// One least-squares gradient step on the batch: phi(s) moves by
  /// 2*lr*sum_i (R_i - phi(s)) over the batch members visiting s (or, in
  /// RunningAverage mode, folds each sample into the per-state mean).
  void update(std::span<const std::pair<int, double>> batch);
  void update_one(int state, double target);

  BaselineSpec to_spec() const { return BaselineSpec::per_state(phi_); }

  void save(const std::string& path) const;
  static ValueBaseline load(const std::string& path);

 private:
  Vec phi_;
  std::vector<long long> counts_;
  double learning_rate_;
  FitMode mode_;
};

/// Two-accumulator model of the variance-minimizing baseline: beta_top
/// estimates E[<g_sf, score_i> | xi], beta_bot estimates E[||score_i||^2 | xi],
/// and the baseline output is their ratio (0 when the denominator sits below
/// the floor, since a vanishing score norm makes the baseline irrelevant).
class OptimalBaseline {
 public:
  OptimalBaseline(ContextKind context, int num_states, double learning_rate = 0.01,
                  FitMode mode = FitMode::RunningAverage, double bot_floor = 1e-12);

  ContextKind context() const { return context_; }
  double bot_floor() const { return bot_floor_; }

  double value_for(const ContextKey& key) const;
  double value_at(const Trajectory& traj, std::size_t i) const;

  /// Full-episode update: for every step i, regress beta_top(xi_i) toward
  /// <g_sf, score_i> and beta_bot(xi_i) toward <score_i, score_i>.
  /// `scores` and `g_sf` must come from the same mini-batch.
  void update(const Trajectory& traj, std::span<const ScoreVector> scores, const Vec& g_sf);

  /// Transition-level update with caller-supplied regression targets (the
  /// importance-weighted PPO path).
  void update_sample(const ContextKey& key, double top_target, double bot_target);

  /// One gradient step on a whole mini-batch of (key, top target, bot
  /// target) samples; keys repeated within the batch contribute jointly.
  void update_minibatch(std::span<const std::tuple<ContextKey, double, double>> samples);

  double top_for(const ContextKey& key) const;
  double bot_for(const ContextKey& key) const;

  BaselineSpec to_spec() const;

  void save(const std::string& path) const;
  static OptimalBaseline load(const std::string& path);

 private:
  struct Acc {
    double top = 0.0;
    double bot = 0.0;
    long long count = 0;
  };
  Acc& slot(const ContextKey& key);
  const Acc* find(const ContextKey& key) const;
  void fit(Acc& acc, double top_target, double bot_target);

  ContextKind context_;
  int num_states_;
  double learning_rate_;
  FitMode mode_;
  double bot_floor_;
  std::vector<Acc> dense_;           // Constant (1 slot) or State (per state)
  std::map<ContextKey, Acc> sparse_;  // Prefix
};

/// One baseline value per policy parameter, constant over states. Applied
/// elementwise: g = sum_i (F_i * 1 - beta) .* score_i.
class PerParamBaseline {
 public:
  explicit PerParamBaseline(int dim, double learning_rate = 0.01,
                            FitMode mode = FitMode::RunningAverage, double bot_floor = 1e-12);

  int dim() const { return static_cast<int>(phi_top_.size()); }
  Vec value() const;

  /// One transition: component k regresses phi_top toward (g_sf)_k*score_k
  /// and phi_bot toward score_k^2.
  void update(const ScoreVector& score, const Vec& g_sf);

  /// Mini-batch gradient step with importance weights w_i applied to the
  /// scores, matching the clipped-surrogate training loop.
  void update_minibatch(std::span<const ScoreVector> scores, std::span<const double> is_weights,
                        const Vec& g_sf);

  const Vec& phi_top() const { return phi_top_; }
  const Vec& phi_bot() const { return phi_bot_; }

  BaselineSpec to_spec() const { return BaselineSpec::per_parameter_constant(value()); }

  void save(const std::string& path) const;
  static PerParamBaseline load(const std::string& path);

 private:
  Vec phi_top_;
  Vec phi_bot_;
  long long count_ = 0;
  double learning_rate_;
  FitMode mode_;
  double bot_floor_;
};

// ---------------------------------------------------------------------------
// Exact oracles (enumeration based)
// ---------------------------------------------------------------------------

/// Exact optimal baseline values per reachable context.
struct ContextBaselineMap {
  ContextKind kind = ContextKind::Constant;
  std::map<ContextKey, double> values;

  double at(const Trajectory& traj, std::size_t i) const;
  BaselineSpec to_spec() const;
};

/// Exact per-parameter optimal baseline values per reachable context.
struct PerParamBaselineMap {
  ContextKind kind = ContextKind::Constant;
  std::map<ContextKey, Vec> values;

  const Vec& at(const Trajectory& traj, std::size_t i) const;
  BaselineSpec to_spec() const;
};

/// The variance-minimizing baseline for the full-episode estimator, computed
/// exactly: per context, E[<g_sf, score_i>] / E[||score_i||^2] with both
/// expectations taken over enumerated paths (pooled over steps that share
/// the context). Unreachable contexts are absent from the map.
ContextBaselineMap optimal_baseline_exact(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                          const ReturnsSpec& returns, ContextKind context,
                                          std::size_t max_paths = kDefaultEnumerationBound);

PerParamBaselineMap per_param_baseline_exact(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                             const ReturnsSpec& returns, ContextKind context,
                                             std::size_t max_paths = kDefaultEnumerationBound);

/// The Q-weighted state baseline beta(s) = E[Q ||score||^2] / E[||score||^2]
/// with the expectation over a ~ pi(.|s). Exact for single-step problems,
/// an approximation otherwise.
Vec q_weighted_baseline_exact(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                              double gamma = 1.0);

}  // namespace gradvar
