// Test-side oracles, kept independent of the library paths they check.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "gradvar/common.hpp"
#include "gradvar/mdp.hpp"

namespace oracles {

using gradvar::Vec;

// Central finite differences of a scalar function of theta.
inline Vec finite_difference_gradient(const std::function<double(const Vec&)>& f, Vec theta,
                                      double step = 1e-5) {
  Vec g(theta.size(), 0.0);
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double saved = theta[k];
    theta[k] = saved + step;
    const double hi = f(theta);
    theta[k] = saved - step;
    const double lo = f(theta);
    theta[k] = saved;
    g[k] = (hi - lo) / (2.0 * step);
  }
  return g;
}

// The O(T^2) advantage double sum
//   F_i = sum_{t=i}^T (gk)^{t-i} r_t
//       + sum_{t=i}^{T-1} (gk)^{t-i} (1-kappa) gamma vhat(s_{t+1})
//       - vhat(s_i)
// written exactly as stated, term by term.
inline std::vector<double> gae_double_sum(const gradvar::Trajectory& traj, const Vec& vhat,
                                          double gamma, double kappa) {
  const auto& ts = traj.transitions;
  const std::size_t n = ts.size();
  std::vector<double> f(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t t = i; t < n; ++t)
      acc += std::pow(gamma * kappa, static_cast<double>(t - i)) * ts[t].reward;
    for (std::size_t t = i; t + 1 < n; ++t)
      acc += std::pow(gamma * kappa, static_cast<double>(t - i)) * (1.0 - kappa) * gamma *
             vhat[ts[t + 1].state];
    f[i] = acc - vhat[ts[i].state];
  }
  return f;
}

// Expected total reward by path enumeration, as a function of theta, for
// finite-difference gradient checks.
inline double enumerated_expected_reward(const gradvar::TabularMdp& mdp,
                                         const gradvar::SoftmaxPolicy& shape, const Vec& theta) {
  gradvar::SoftmaxPolicy policy(shape.num_states(), shape.num_actions(), shape.layout(), theta);
  double j = 0.0;
  for (const auto& p : gradvar::enumerate_paths(mdp, policy))
    j += p.path_probability * p.trajectory.total_reward;
  return j;
}

}  // namespace oracles
