#pragma once

#include "gradvar/common.hpp"
#include "gradvar/mdp.hpp"

namespace gradvar {

enum class ReturnKind { MonteCarlo, Discounted, Gae };

/// The scalar multiplying the i-th score function. `f` is what enters the
/// estimator; `r_used` is the return part before any value subtraction, so
/// for GAE f = r_used - vhat(s_i).
struct ReturnEstimate {
  double f;
  double r_used;
  ReturnKind kind;
};

struct GaeParams {
  double gamma = 1.0;  // discount, in (0, 1]
  double kappa = 1.0;  // bootstrap interpolation, in [0, 1]

  GaeParams() = default;
  GaeParams(double g, double k) : gamma(g), kappa(k) {
    if (!(gamma > 0.0 && gamma <= 1.0))
      throw std::invalid_argument("GaeParams: gamma must be in (0, 1]");
    if (!(kappa >= 0.0 && kappa <= 1.0))
      throw std::invalid_argument("GaeParams: kappa must be in [0, 1]");
  }
};

using ValueTable = Vec;  // one entry per state

/// Undiscounted suffix sums F_i = sum_{t >= i} r_t.
std::vector<ReturnEstimate> monte_carlo_returns(const Trajectory& traj);

/// Discounted suffix sums F_i = sum_{t >= i} gamma^{t-i} r_t.
std::vector<ReturnEstimate> discounted_returns(const Trajectory& traj, double gamma);

/// GAE advantages via the O(T) backward recursion
///   f_i = delta_i + gamma*kappa*f_{i+1},
///   delta_i = r_i + gamma*vhat(s_{i+1}) - vhat(s_i),
/// with the value of the state after the final transition taken as
/// `tail_value` (0 for a terminal state; a bootstrap value for a rollout
/// cut mid-episode).
std::vector<ReturnEstimate> gae_advantages(const Trajectory& traj, const ValueTable& vhat,
                                           const GaeParams& params, double tail_value = 0.0);

/// Bundles the F_i definition used by estimator assembly and exact oracles.
struct ReturnsSpec {
  ReturnKind kind = ReturnKind::MonteCarlo;
  double gamma = 1.0;   // Discounted
  GaeParams gae{};      // Gae
  ValueTable vhat;      // Gae; empty means identically zero

  std::vector<ReturnEstimate> compute(const Trajectory& traj, int num_states) const;

  static ReturnsSpec monte_carlo() { return {}; }
  static ReturnsSpec discounted(double gamma) {
    ReturnsSpec s;
    s.kind = ReturnKind::Discounted;
    s.gamma = gamma;
    return s;
  }
  static ReturnsSpec gae_spec(GaeParams params, ValueTable vhat) {
    ReturnsSpec s;
    s.kind = ReturnKind::Gae;
    s.gae = params;
    s.vhat = std::move(vhat);
    return s;
  }
};

}  // namespace gradvar
