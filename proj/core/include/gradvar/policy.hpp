#pragma once

#include <span>

#include "gradvar/common.hpp"

namespace gradvar {

/// How logits map onto (state, action) slots.
///  PerState      - one logit per (state, action), theta laid out row-major.
///  StateAgnostic - one logit per action, shared by every state.
enum class PolicyLayout { PerState, StateAgnostic };

using ScoreVector = Vec;

/// Softmax policy over a finite action set. Immutable value object except
/// for explicit parameter mutation by a trainer that owns it.
class SoftmaxPolicy {
 public:
  SoftmaxPolicy(int num_states, int num_actions, PolicyLayout layout, Vec theta = {});

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  PolicyLayout layout() const { return layout_; }
  int dim() const { return static_cast<int>(theta_.size()); }

  const Vec& theta() const { return theta_; }
  void set_theta(Vec theta);
  /// In-place gradient step used by trainers.
  void step_theta(std::span<const double> direction, double step);

  /// Probabilities of all actions in `state`; positive, sums to 1.
  Vec action_probs(int state) const;
  double prob(int state, int action) const;
  double log_prob(int state, int action) const;

  /// d log pi(action|state) / d theta as a dense vector of length dim().
  ScoreVector score(int state, int action) const;

  /// <score, score> without materializing the dense vector.
  double squared_score_norm(int state, int action) const;

 private:
  int block_offset(int state) const {
    return layout_ == PolicyLayout::PerState ? state * num_actions_ : 0;
  }
  void check_state(int state) const;

  int num_states_;
  int num_actions_;
  PolicyLayout layout_;
  Vec theta_;
};

}  // namespace gradvar
