#include "gradvar/returns.hpp"

namespace gradvar {

std::vector<ReturnEstimate> monte_carlo_returns(const Trajectory& traj) {
  if (traj.transitions.empty())
    throw std::invalid_argument("monte_carlo_returns: empty trajectory");
  const std::size_t n = traj.transitions.size();
  std::vector<ReturnEstimate> out(n);
  double suffix = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    suffix += traj.transitions[i].reward;
    out[i] = {suffix, suffix, ReturnKind::MonteCarlo};
  }
  return out;
}

std::vector<ReturnEstimate> discounted_returns(const Trajectory& traj, double gamma) {
  if (traj.transitions.empty())
    throw std::invalid_argument("discounted_returns: empty trajectory");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("discounted_returns: gamma must be in (0, 1]");
  const std::size_t n = traj.transitions.size();
  std::vector<ReturnEstimate> out(n);
  double suffix = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    suffix = traj.transitions[i].reward + gamma * suffix;
    out[i] = {suffix, suffix, ReturnKind::Discounted};
  }
  return out;
}

std::vector<ReturnEstimate> gae_advantages(const Trajectory& traj, const ValueTable& vhat,
                                           const GaeParams& params, double tail_value) {
  if (traj.transitions.empty())
    throw std::invalid_argument("gae_advantages: empty trajectory");
  const std::size_t n = traj.transitions.size();
  auto value_of = [&](int state) {
    if (state < 0 || static_cast<std::size_t>(state) >= vhat.size())
      throw std::invalid_argument("gae_advantages: no value estimate for state " +
                                  std::to_string(state));
    return vhat[state];
  };
  std::vector<ReturnEstimate> out(n);
  double f_next = 0.0;
  double v_next = tail_value;
  for (std::size_t i = n; i-- > 0;) {
    const double v_here = value_of(traj.transitions[i].state);
    const double delta = traj.transitions[i].reward + params.gamma * v_next - v_here;
    const double f = delta + params.gamma * params.kappa * f_next;
    out[i] = {f, f + v_here, ReturnKind::Gae};
    f_next = f;
    v_next = v_here;
  }
  return out;
}

std::vector<ReturnEstimate> ReturnsSpec::compute(const Trajectory& traj, int num_states) const {
  switch (kind) {
    case ReturnKind::MonteCarlo:
      return monte_carlo_returns(traj);
    case ReturnKind::Discounted:
      return discounted_returns(traj, gamma);
    case ReturnKind::Gae: {
      if (vhat.empty()) return gae_advantages(traj, ValueTable(num_states, 0.0), gae);
      return gae_advantages(traj, vhat, gae);
    }
  }
  throw std::logic_error("ReturnsSpec::compute: bad kind");
}

}  // namespace gradvar
