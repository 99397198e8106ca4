#include "gradvar/estimator.hpp"

#include <cmath>

namespace gradvar {

double importance_weight(double logprob_now, double logprob_old, double cap, bool* capped) {
  if (!std::isfinite(logprob_now) || !std::isfinite(logprob_old))
    throw std::invalid_argument("importance_weight: non-finite log-probability");
  if (capped) *capped = false;
  const double w = std::exp(logprob_now - logprob_old);
  if (w > cap) {
    if (capped) *capped = true;
    return cap;
  }
  return w;
}

double ppo_clip_indicator(double f, double is_ratio, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("ppo_clip_indicator: epsilon must be > 0");
  const bool clipped = (f > 0.0 && is_ratio > 1.0 + epsilon) ||
                       (f < 0.0 && is_ratio < 1.0 - epsilon);
  return clipped ? 0.0 : 1.0;
}

GradientEstimate assemble(std::span<const BatchItem> batch, const SoftmaxPolicy& policy,
                          const IsConfig& is_config, bool keep_components) {
  GradientEstimate est;
  est.g.assign(policy.dim(), 0.0);
  est.n = static_cast<int>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const BatchItem& item = batch[i];
    if (!std::isfinite(item.ret.f))
      throw std::invalid_argument("assemble: non-finite F at index " + std::to_string(i));
    double weight = 1.0;
    if (is_config.importance_sampling) {
      const double logp_now =
          policy.log_prob(item.transition.state, item.transition.action);
      weight = importance_weight(logp_now, item.transition.logprob_at_sample, is_config.is_cap);
      if (is_config.clip) weight *= ppo_clip_indicator(item.ret.f, weight, is_config.epsilon);
    }
    const ScoreVector score = policy.score(item.transition.state, item.transition.action);
    if (item.baseline_vec) {
      const Vec& beta = *item.baseline_vec;
      if (beta.size() != score.size())
        throw std::invalid_argument("assemble: per-parameter baseline dimension mismatch at index " +
                                    std::to_string(i));
      for (std::size_t k = 0; k < score.size(); ++k) {
        if (!std::isfinite(beta[k]))
          throw std::invalid_argument("assemble: non-finite baseline at index " +
                                      std::to_string(i));
        est.g[k] += (item.ret.f - beta[k]) * weight * score[k];
      }
      if (keep_components) est.components.push_back({item.ret.f, 0.0, weight, score});
    } else {
      if (!std::isfinite(item.baseline))
        throw std::invalid_argument("assemble: non-finite baseline at index " + std::to_string(i));
      axpy((item.ret.f - item.baseline) * weight, score, est.g);
      if (keep_components)
        est.components.push_back({item.ret.f, item.baseline, weight, score});
    }
  }
  return est;
}

Vec episode_gradient(const Trajectory& traj, const SoftmaxPolicy& policy,
                     const ReturnsSpec& returns, const BaselineSpec& baseline) {
  const auto fs = returns.compute(traj, policy.num_states());
  Vec g(policy.dim(), 0.0);
  for (std::size_t i = 0; i < traj.transitions.size(); ++i) {
    const ScoreVector score =
        policy.score(traj.transitions[i].state, traj.transitions[i].action);
    if (baseline.per_parameter) {
      const Vec beta = baseline.per_parameter(traj, i);
      if (beta.size() != score.size())
        throw std::invalid_argument("episode_gradient: per-parameter baseline dimension mismatch");
      for (std::size_t k = 0; k < score.size(); ++k)
        g[k] += (fs[i].f - beta[k]) * score[k];
    } else {
      const double beta = baseline.scalar ? baseline.scalar(traj, i) : 0.0;
      if (!std::isfinite(beta) || !std::isfinite(fs[i].f))
        throw std::invalid_argument("episode_gradient: non-finite term at step " +
                                    std::to_string(i));
      axpy(fs[i].f - beta, score, g);
    }
  }
  return g;
}

GradientMoments exact_gradient_moments(std::span<const EnumeratedPath> paths,
                                       const SoftmaxPolicy& policy, const ReturnsSpec& returns,
                                       const BaselineSpec& baseline) {
  GradientMoments m;
  m.mean.assign(policy.dim(), 0.0);
  for (const EnumeratedPath& p : paths) {
    const Vec g = episode_gradient(p.trajectory, policy, returns, baseline);
    axpy(p.path_probability, g, m.mean);
    m.second_moment += p.path_probability * norm_sq(g);
  }
  return m;
}

GradientMoments exact_gradient_moments(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                       const ReturnsSpec& returns, const BaselineSpec& baseline,
                                       std::size_t max_paths) {
  const auto paths = enumerate_paths(mdp, policy, max_paths);
  return exact_gradient_moments(paths, policy, returns, baseline);
}

VarianceReport exact_variance(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                              const ReturnsSpec& returns, const BaselineSpec& baseline,
                              std::size_t max_paths) {
  const GradientMoments m = exact_gradient_moments(mdp, policy, returns, baseline, max_paths);
  VarianceReport r;
  r.second_moment = m.second_moment;
  r.mean_norm_sq = norm_sq(m.mean);
  r.variance = r.second_moment - r.mean_norm_sq;
  r.exact = true;
  return r;
}

VarianceReport empirical_variance_of(std::span<const Vec> samples) {
  if (samples.size() < 2)
    throw std::invalid_argument("empirical_variance: need at least 2 samples, got " +
                                std::to_string(samples.size()));
  const double inv_m = 1.0 / static_cast<double>(samples.size());
  Vec mean(samples[0].size(), 0.0);
  double second = 0.0;
  for (const Vec& g : samples) {
    axpy(inv_m, g, mean);
    second += inv_m * norm_sq(g);
  }
  VarianceReport r;
  r.second_moment = second;
  r.mean_norm_sq = norm_sq(mean);
  r.variance = r.second_moment - r.mean_norm_sq;
  r.exact = false;
  r.sample_count = samples.size();
  return r;
}

VarianceReport empirical_variance(const std::function<Vec()>& sampler, std::size_t m) {
  if (m < 2)
    throw std::invalid_argument("empirical_variance: need at least 2 samples, got " +
                                std::to_string(m));
  std::vector<Vec> samples;
  samples.reserve(m);
  for (std::size_t i = 0; i < m; ++i) samples.push_back(sampler());
  return empirical_variance_of(samples);
}

}  // namespace gradvar
