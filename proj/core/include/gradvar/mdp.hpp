#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gradvar/common.hpp"
#include "gradvar/policy.hpp"

namespace gradvar {

/// Sentinel next-state for episode termination.
inline constexpr int kTerminal = -1;

/// One stochastic outcome of applying an action: probability of receiving
/// `reward` and moving to `next` (kTerminal ends the episode).
struct Outcome {
  double prob;
  double reward;
  int next;
};

inline constexpr std::size_t kDefaultEnumerationBound = 10'000'000;

/// Finite MDP with explicit termination. Probabilities are validated at
/// construction and the object is immutable afterwards, so it can be shared
/// freely across worker threads.
class TabularMdp {
 public:
  /// kernel[s][a] lists the outcomes of action a in state s.
  TabularMdp(int num_states, int num_actions,
             std::vector<std::vector<std::vector<Outcome>>> kernel,
             Vec initial_dist, int horizon_cap, ObjectiveSign objective);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int horizon_cap() const { return horizon_cap_; }
  ObjectiveSign objective() const { return objective_; }
  const Vec& initial_dist() const { return initial_dist_; }
  const std::vector<Outcome>& outcomes(int state, int action) const;

  /// Largest |reward| in the kernel; used to scale random test baselines.
  double max_abs_reward() const;

  static TabularMdp load(const std::string& path);
  void save(const std::string& path) const;

 private:
  int num_states_;
  int num_actions_;
  std::vector<std::vector<std::vector<Outcome>>> kernel_;
  Vec initial_dist_;
  int horizon_cap_;
  ObjectiveSign objective_;
};

/// One sampled step. `logprob_at_sample` records the behavior policy's
/// log-probability at the time the action was drawn (importance sampling
/// needs it later, after the policy has moved).
struct Transition {
  int state;
  int action;
  double reward;
  double logprob_at_sample;
  int step_index;  // 1-based
};

struct Trajectory {
  std::vector<Transition> transitions;
  double total_reward = 0.0;
  /// True when the horizon cap ended the episode rather than the kernel.
  bool forced_termination = false;

  std::size_t length() const { return transitions.size(); }
};

struct EnumeratedPath {
  Trajectory trajectory;
  double path_probability;
};

Trajectory sample_trajectory(const TabularMdp& mdp, const SoftmaxPolicy& policy, Rng& rng);

/// Exhaustively lists every distinct nonzero-probability trajectory.
/// Throws when more than `max_paths` paths would be produced.
std::vector<EnumeratedPath> enumerate_paths(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                            std::size_t max_paths = kDefaultEnumerationBound);

/// True when enumerate_paths would stay within `max_paths`.
bool enumeration_feasible(const TabularMdp& mdp, std::size_t max_paths = kDefaultEnumerationBound);

struct ValueFunctions {
  Vec v;                    // v[s]
  std::vector<Vec> q;       // q[s][a]
};

/// Exact V and Q under `policy` from the stationary linear system
/// (terminal value 0). Episodic problems must either reach the terminal
/// state or discount strictly for the system to be solvable.
ValueFunctions exact_value_functions(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                     double gamma = 1.0);

/// Expected (discounted) episodic reward under `policy`, exact.
double exact_expected_reward(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                             double gamma = 1.0);

/// Discounted state visit counts d(s) = sum_t gamma^{t-1} P(s_t = s).
Vec state_occupancy(const TabularMdp& mdp, const SoftmaxPolicy& policy, double gamma = 1.0);

/// Exact gradient of the expected reward with respect to theta, via the
/// occupancy-weighted score identity. Independent of path enumeration.
Vec exact_policy_gradient(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                          double gamma = 1.0);

// ---- built-in environments ----

/// Two coin flips with payoffs scale*(1, 2, 4) for TT, HH and mixed.
/// The payoff is attributed to the final transition. Action 0 = tails,
/// action 1 = heads; pair with a StateAgnostic two-logit policy.
TabularMdp coin_flip_mdp(double payoff_scale = 1.0);

/// Three-armed bandit with deterministic arm rewards (default 0, 0.7, 1).
TabularMdp bandit_mdp(Vec arm_rewards = {0.0, 0.7, 1.0});

/// Two-state minimization MDP: action 0 moves to state 0, action 1 moves to
/// state 1, each step terminates with `termination_prob`. Rewards for the
/// four (state, action) pairs are required; pair with a StateAgnostic
/// two-logit policy.
TabularMdp two_state_mdp(double reward_ll, double reward_lr, double reward_rl, double reward_rr,
                         double termination_prob = 0.2, Vec initial_dist = {0.6, 0.4},
                         int horizon_cap = 100);

}  // namespace gradvar
