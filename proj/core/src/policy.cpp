#include "gradvar/policy.hpp"

#include <algorithm>
#include <cmath>

namespace gradvar {

SoftmaxPolicy::SoftmaxPolicy(int num_states, int num_actions, PolicyLayout layout, Vec theta)
    : num_states_(num_states), num_actions_(num_actions), layout_(layout), theta_(std::move(theta)) {
  if (num_states_ <= 0 || num_actions_ <= 0)
    throw std::invalid_argument("SoftmaxPolicy: num_states and num_actions must be positive");
  const std::size_t want = layout_ == PolicyLayout::PerState
                               ? static_cast<std::size_t>(num_states_) * num_actions_
                               : static_cast<std::size_t>(num_actions_);
  if (theta_.empty()) theta_.assign(want, 0.0);
  if (theta_.size() != want)
    throw std::invalid_argument("SoftmaxPolicy: theta has " + std::to_string(theta_.size()) +
                                " entries, expected " + std::to_string(want));
  for (double t : theta_)
    if (!std::isfinite(t)) throw std::invalid_argument("SoftmaxPolicy: non-finite logit");
}

void SoftmaxPolicy::set_theta(Vec theta) {
  if (theta.size() != theta_.size())
    throw std::invalid_argument("SoftmaxPolicy::set_theta: dimension mismatch");
  theta_ = std::move(theta);
}

void SoftmaxPolicy::step_theta(std::span<const double> direction, double step) {
  if (direction.size() != theta_.size())
    throw std::invalid_argument("SoftmaxPolicy::step_theta: dimension mismatch");
  for (std::size_t i = 0; i < theta_.size(); ++i) theta_[i] += step * direction[i];
}

void SoftmaxPolicy::check_state(int state) const {
  if (state < 0 || state >= num_states_)
    throw std::out_of_range("SoftmaxPolicy: state " + std::to_string(state) + " out of range");
}

Vec SoftmaxPolicy::action_probs(int state) const {
  check_state(state);
  const int off = block_offset(state);
  double m = theta_[off];
  for (int a = 1; a < num_actions_; ++a) m = std::max(m, theta_[off + a]);
  Vec p(num_actions_);
  double z = 0.0;
  for (int a = 0; a < num_actions_; ++a) {
    p[a] = std::exp(theta_[off + a] - m);
    z += p[a];
  }
  for (int a = 0; a < num_actions_; ++a) p[a] /= z;
  return p;
}

double SoftmaxPolicy::prob(int state, int action) const {
  return action_probs(state)[action];
}

double SoftmaxPolicy::log_prob(int state, int action) const {
  check_state(state);
  if (action < 0 || action >= num_actions_)
    throw std::out_of_range("SoftmaxPolicy: action out of range");
  const int off = block_offset(state);
  double m = theta_[off];
  for (int a = 1; a < num_actions_; ++a) m = std::max(m, theta_[off + a]);
  double z = 0.0;
  for (int a = 0; a < num_actions_; ++a) z += std::exp(theta_[off + a] - m);
  return theta_[off + action] - m - std::log(z);
}

ScoreVector SoftmaxPolicy::score(int state, int action) const {
  const Vec p = action_probs(state);
  if (action < 0 || action >= num_actions_)
    throw std::out_of_range("SoftmaxPolicy: action out of range");
  ScoreVector g(theta_.size(), 0.0);
  const int off = block_offset(state);
  for (int a = 0; a < num_actions_; ++a) g[off + a] = -p[a];
  g[off + action] += 1.0;
  return g;
}

double SoftmaxPolicy::squared_score_norm(int state, int action) const {
  const Vec p = action_probs(state);
  if (action < 0 || action >= num_actions_)
    throw std::out_of_range("SoftmaxPolicy: action out of range");
  // (1 - p_a)^2 + sum_{b != a} p_b^2  ==  1 - 2 p_a + sum_b p_b^2
  double sum_sq = 0.0;
  for (double v : p) sum_sq += v * v;
  return 1.0 - 2.0 * p[action] + sum_sq;
}

}  // namespace gradvar
