#include "gradvar/baselines.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace gradvar {

ContextKey context_key(ContextKind kind, const Trajectory& traj, std::size_t i) {
  if (i >= traj.transitions.size())
    throw std::out_of_range("context_key: step index out of range");
  switch (kind) {
    case ContextKind::Constant:
      return {};
    case ContextKind::State:
      return {static_cast<double>(traj.transitions[i].state)};
    case ContextKind::Prefix: {
      ContextKey key;
      key.reserve(3 * i + 1);
      for (std::size_t t = 0; t < i; ++t) {
        key.push_back(static_cast<double>(traj.transitions[t].state));
        key.push_back(static_cast<double>(traj.transitions[t].action));
        key.push_back(traj.transitions[t].reward);
      }
      key.push_back(static_cast<double>(traj.transitions[i].state));
      return key;
    }
  }
  throw std::logic_error("context_key: bad kind");
}

const char* context_name(ContextKind kind) {
  switch (kind) {
    case ContextKind::Constant: return "constant";
    case ContextKind::State: return "state";
    case ContextKind::Prefix: return "prefix";
  }
  return "?";
}

ContextKind context_from_name(const std::string& name) {
  if (name == "constant") return ContextKind::Constant;
  if (name == "state") return ContextKind::State;
  if (name == "prefix") return ContextKind::Prefix;
  throw std::invalid_argument("unknown context '" + name + "'");
}

// ---------------------------------------------------------------------------
// ValueBaseline
// ---------------------------------------------------------------------------

ValueBaseline::ValueBaseline(int num_states, double learning_rate, FitMode mode)
    : phi_(num_states, 0.0), counts_(num_states, 0), learning_rate_(learning_rate), mode_(mode) {
  if (num_states <= 0) throw std::invalid_argument("ValueBaseline: num_states must be positive");
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("ValueBaseline: learning_rate must be positive");
}

double ValueBaseline::value(int state) const {
  if (state < 0 || static_cast<std::size_t>(state) >= phi_.size())
    throw std::out_of_range("ValueBaseline: state out of range");
  return phi_[state];
}

void ValueBaseline::update_one(int state, double target) {
  if (!std::isfinite(target)) throw std::invalid_argument("ValueBaseline: non-finite target");
  if (state < 0 || static_cast<std::size_t>(state) >= phi_.size())
    throw std::out_of_range("ValueBaseline: state out of range");
  if (mode_ == FitMode::RunningAverage) {
    ++counts_[state];
    phi_[state] += (target - phi_[state]) / static_cast<double>(counts_[state]);
  } else {
    phi_[state] += 2.0 * learning_rate_ * (target - phi_[state]);
  }
}

void ValueBaseline::update(std::span<const std::pair<int, double>> batch) {
  if (mode_ == FitMode::RunningAverage) {
    for (const auto& [state, target] : batch) update_one(state, target);
    return;
  }
  // Single gradient step on the batch objective, evaluated at the batch-start
  // parameters.
  std::map<int, std::pair<double, long long>> sums;  // state -> (sum target, count)
  for (const auto& [state, target] : batch) {
    if (!std::isfinite(target)) throw std::invalid_argument("ValueBaseline: non-finite target");
    if (state < 0 || static_cast<std::size_t>(state) >= phi_.size())
      throw std::out_of_range("ValueBaseline: state out of range");
    auto& [sum, cnt] = sums[state];
    sum += target;
    ++cnt;
  }
  for (const auto& [state, sc] : sums)
    phi_[state] += 2.0 * learning_rate_ * (sc.first - static_cast<double>(sc.second) * phi_[state]);
}

void ValueBaseline::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("ValueBaseline::save: cannot open " + path);
  f.precision(17);
  f << "kind value\n";
  f << "states " << phi_.size() << "\n";
  f << "learning_rate " << learning_rate_ << "\n";
  f << "mode " << (mode_ == FitMode::RunningAverage ? "running_average" : "constant_rate") << "\n";
  for (std::size_t s = 0; s < phi_.size(); ++s)
    f << "phi " << s << " " << phi_[s] << " " << counts_[s] << "\n";
}

ValueBaseline ValueBaseline::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("ValueBaseline::load: cannot open " + path);
  std::string line, key;
  int states = 0;
  double lr = 0.01;
  FitMode mode = FitMode::ConstantRate;
  std::vector<std::pair<std::size_t, std::pair<double, long long>>> entries;
  while (std::getline(f, line)) {
    std::istringstream ss(line);
    if (!(ss >> key)) continue;
    if (key == "kind") {
      std::string k;
      ss >> k;
      if (k != "value") throw std::runtime_error("ValueBaseline::load: wrong kind '" + k + "'");
    } else if (key == "states") {
      ss >> states;
    } else if (key == "learning_rate") {
      ss >> lr;
    } else if (key == "mode") {
      std::string m;
      ss >> m;
      mode = (m == "running_average") ? FitMode::RunningAverage : FitMode::ConstantRate;
    } else if (key == "phi") {
      std::size_t s;
      double v;
      long long c;
      if (!(ss >> s >> v >> c)) throw std::runtime_error("ValueBaseline::load: bad phi row");
      entries.push_back({s, {v, c}});
    }
  }
  ValueBaseline b(states, lr, mode);
  for (const auto& [s, vc] : entries) {
    if (s >= b.phi_.size()) throw std::runtime_error("ValueBaseline::load: state out of range");
    b.phi_[s] = vc.first;
    b.counts_[s] = vc.second;
  }
  return b;
}

// ---------------------------------------------------------------------------
// OptimalBaseline
// ---------------------------------------------------------------------------

OptimalBaseline::OptimalBaseline(ContextKind context, int num_states, double learning_rate,
                                 FitMode mode, double bot_floor)
    : context_(context),
      num_states_(num_states),
      learning_rate_(learning_rate),
      mode_(mode),
      bot_floor_(bot_floor) {
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("OptimalBaseline: learning_rate must be positive");
  if (!(bot_floor > 0.0)) throw std::invalid_argument("OptimalBaseline: bot_floor must be positive");
  if (context_ == ContextKind::Constant) dense_.resize(1);
  if (context_ == ContextKind::State) {
    if (num_states <= 0)
      throw std::invalid_argument("OptimalBaseline: num_states must be positive for state context");
    dense_.resize(num_states);
  }
}

OptimalBaseline::Acc& OptimalBaseline::slot(const ContextKey& key) {
  switch (context_) {
    case ContextKind::Constant:
      return dense_[0];
    case ContextKind::State: {
      const int s = static_cast<int>(key.at(0));
      if (s < 0 || s >= num_states_)
        throw std::out_of_range("OptimalBaseline: state key out of range");
      return dense_[s];
    }
    case ContextKind::Prefix:
      return sparse_[key];
  }
  throw std::logic_error("OptimalBaseline: bad context");
}

const OptimalBaseline::Acc* OptimalBaseline::find(const ContextKey& key) const {
  switch (context_) {
    case ContextKind::Constant:
      return &dense_[0];
    case ContextKind::State: {
      const int s = static_cast<int>(key.at(0));
      if (s < 0 || s >= num_states_) return nullptr;
      return &dense_[s];
    }
    case ContextKind::Prefix: {
      auto it = sparse_.find(key);
      return it == sparse_.end() ? nullptr : &it->second;
    }
  }
  return nullptr;
}

void OptimalBaseline::fit(Acc& acc, double top_target, double bot_target) {
  if (!std::isfinite(top_target) || !std::isfinite(bot_target))
    throw std::invalid_argument("OptimalBaseline: non-finite regression target");
  if (mode_ == FitMode::RunningAverage) {
    ++acc.count;
    const double inv = 1.0 / static_cast<double>(acc.count);
    acc.top += (top_target - acc.top) * inv;
    acc.bot += (bot_target - acc.bot) * inv;
  } else {
    acc.top += 2.0 * learning_rate_ * (top_target - acc.top);
    acc.bot += 2.0 * learning_rate_ * (bot_target - acc.bot);
  }
}

void OptimalBaseline::update_sample(const ContextKey& key, double top_target, double bot_target) {
  fit(slot(key), top_target, bot_target);
}

void OptimalBaseline::update_minibatch(
    std::span<const std::tuple<ContextKey, double, double>> samples) {
  if (mode_ == FitMode::RunningAverage) {
    for (const auto& [key, top, bot] : samples) fit(slot(key), top, bot);
    return;
  }
  std::map<ContextKey, std::tuple<double, double, long long>> sums;
  for (const auto& [key, top, bot] : samples) {
    if (!std::isfinite(top) || !std::isfinite(bot))
      throw std::invalid_argument("OptimalBaseline: non-finite regression target");
    auto& [ts, bs, cnt] = sums[key];
    ts += top;
    bs += bot;
    ++cnt;
  }
  for (const auto& [key, tbc] : sums) {
    Acc& acc = slot(key);
    const auto& [ts, bs, cnt] = tbc;
    const double m = static_cast<double>(cnt);
    acc.top += 2.0 * learning_rate_ * (ts - m * acc.top);
    acc.bot += 2.0 * learning_rate_ * (bs - m * acc.bot);
  }
}

void OptimalBaseline::update(const Trajectory& traj, std::span<const ScoreVector> scores,
                             const Vec& g_sf) {
  if (scores.size() != traj.transitions.size())
    throw std::invalid_argument("OptimalBaseline::update: one score per transition required");
  std::vector<std::tuple<ContextKey, double, double>> samples;
  samples.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].size() != g_sf.size())
      throw std::invalid_argument("OptimalBaseline::update: score/gradient dimension mismatch");
    samples.emplace_back(context_key(context_, traj, i), dot(g_sf, scores[i]),
                         norm_sq(scores[i]));
  }
  update_minibatch(samples);
}

double OptimalBaseline::value_for(const ContextKey& key) const {
  const Acc* acc = find(key);
  if (!acc) return 0.0;
  if (acc->bot < bot_floor_) return 0.0;
  return acc->top / acc->bot;
}

double OptimalBaseline::value_at(const Trajectory& traj, std::size_t i) const {
  return value_for(context_key(context_, traj, i));
}

double OptimalBaseline::top_for(const ContextKey& key) const {
  const Acc* acc = find(key);
  return acc ? acc->top : 0.0;
}

double OptimalBaseline::bot_for(const ContextKey& key) const {
  const Acc* acc = find(key);
  return acc ? acc->bot : 0.0;
}

BaselineSpec OptimalBaseline::to_spec() const {
  // Snapshot: evaluating the spec later must not see subsequent updates.
  auto copy = std::make_shared<OptimalBaseline>(*this);
  BaselineSpec spec;
  spec.scalar = [copy](const Trajectory& traj, std::size_t i) { return copy->value_at(traj, i); };
  return spec;
}

void OptimalBaseline::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("OptimalBaseline::save: cannot open " + path);
  f.precision(17);
  f << "kind optimal\n";
  f << "context " << context_name(context_) << "\n";
  f << "states " << num_states_ << "\n";
  f << "learning_rate " << learning_rate_ << "\n";
  f << "mode " << (mode_ == FitMode::RunningAverage ? "running_average" : "constant_rate") << "\n";
  f << "bot_floor " << bot_floor_ << "\n";
  auto emit = [&](const ContextKey& key, const Acc& acc) {
    f << "acc " << key.size();
    for (double k : key) f << " " << k;
    f << " " << acc.top << " " << acc.bot << " " << acc.count << "\n";
  };
  if (context_ == ContextKind::Prefix) {
    for (const auto& [key, acc] : sparse_) emit(key, acc);
  } else {
    for (std::size_t s = 0; s < dense_.size(); ++s)
      emit(context_ == ContextKind::Constant ? ContextKey{} : ContextKey{static_cast<double>(s)},
           dense_[s]);
  }
}

OptimalBaseline OptimalBaseline::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("OptimalBaseline::load: cannot open " + path);
  std::string line, key;
  ContextKind context = ContextKind::Constant;
  int states = 1;
  double lr = 0.01, floor = 1e-12;
  FitMode mode = FitMode::RunningAverage;
  struct Row {
    ContextKey key;
    Acc acc;
  };
  std::vector<Row> rows;
  while (std::getline(f, line)) {
    std::istringstream ss(line);
    if (!(ss >> key)) continue;
    if (key == "kind") {
      std::string k;
      ss >> k;
      if (k != "optimal") throw std::runtime_error("OptimalBaseline::load: wrong kind");
    } else if (key == "context") {
      std::string c;
      ss >> c;
      context = context_from_name(c);
    } else if (key == "states") {
      ss >> states;
    } else if (key == "learning_rate") {
      ss >> lr;
    } else if (key == "bot_floor") {
      ss >> floor;
    } else if (key == "mode") {
      std::string m;
      ss >> m;
      mode = (m == "running_average") ? FitMode::RunningAverage : FitMode::ConstantRate;
    } else if (key == "acc") {
      std::size_t klen;
      if (!(ss >> klen)) throw std::runtime_error("OptimalBaseline::load: bad acc row");
      Row r;
      r.key.resize(klen);
      for (std::size_t i = 0; i < klen; ++i) ss >> r.key[i];
      if (!(ss >> r.acc.top >> r.acc.bot >> r.acc.count))
        throw std::runtime_error("OptimalBaseline::load: bad acc row");
      rows.push_back(std::move(r));
    }
  }
  OptimalBaseline b(context, states, lr, mode, floor);
  for (Row& r : rows) b.slot(r.key) = r.acc;
  return b;
}

// ---------------------------------------------------------------------------
// PerParamBaseline
// ---------------------------------------------------------------------------

PerParamBaseline::PerParamBaseline(int dim, double learning_rate, FitMode mode, double bot_floor)
    : phi_top_(dim, 0.0),
      phi_bot_(dim, 0.0),
      learning_rate_(learning_rate),
      mode_(mode),
      bot_floor_(bot_floor) {
  if (dim <= 0) throw std::invalid_argument("PerParamBaseline: dim must be positive");
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("PerParamBaseline: learning_rate must be positive");
}

Vec PerParamBaseline::value() const {
  Vec beta(phi_top_.size(), 0.0);
  for (std::size_t k = 0; k < beta.size(); ++k)
    beta[k] = phi_bot_[k] < bot_floor_ ? 0.0 : phi_top_[k] / phi_bot_[k];
  return beta;
}

void PerParamBaseline::update(const ScoreVector& score, const Vec& g_sf) {
  if (score.size() != phi_top_.size() || g_sf.size() != phi_top_.size())
    throw std::invalid_argument("PerParamBaseline::update: dimension mismatch");
  ++count_;
  const double inv = 1.0 / static_cast<double>(count_);
  for (std::size_t k = 0; k < phi_top_.size(); ++k) {
    const double top_target = g_sf[k] * score[k];
    const double bot_target = score[k] * score[k];
    if (mode_ == FitMode::RunningAverage) {
      phi_top_[k] += (top_target - phi_top_[k]) * inv;
      phi_bot_[k] += (bot_target - phi_bot_[k]) * inv;
    } else {
      phi_top_[k] += 2.0 * learning_rate_ * (top_target - phi_top_[k]);
      phi_bot_[k] += 2.0 * learning_rate_ * (bot_target - phi_bot_[k]);
    }
  }
}

void PerParamBaseline::update_minibatch(std::span<const ScoreVector> scores,
                                        std::span<const double> is_weights, const Vec& g_sf) {
  if (!is_weights.empty() && is_weights.size() != scores.size())
    throw std::invalid_argument("PerParamBaseline::update_minibatch: weight count mismatch");
  if (mode_ == FitMode::RunningAverage) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      ScoreVector weighted = scores[i];
      if (!is_weights.empty())
        for (double& v : weighted) v *= is_weights[i];
      update(weighted, g_sf);
    }
    return;
  }
  Vec top_sum(phi_top_.size(), 0.0);
  Vec bot_sum(phi_top_.size(), 0.0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].size() != phi_top_.size() || g_sf.size() != phi_top_.size())
      throw std::invalid_argument("PerParamBaseline::update_minibatch: dimension mismatch");
    const double w = is_weights.empty() ? 1.0 : is_weights[i];
    for (std::size_t k = 0; k < phi_top_.size(); ++k) {
      const double sk = w * scores[i][k];
      top_sum[k] += g_sf[k] * sk;
      bot_sum[k] += sk * sk;
    }
  }
  const double m = static_cast<double>(scores.size());
  for (std::size_t k = 0; k < phi_top_.size(); ++k) {
    phi_top_[k] += 2.0 * learning_rate_ * (top_sum[k] - m * phi_top_[k]);
    phi_bot_[k] += 2.0 * learning_rate_ * (bot_sum[k] - m * phi_bot_[k]);
  }
  count_ += static_cast<long long>(scores.size());
}

void PerParamBaseline::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("PerParamBaseline::save: cannot open " + path);
  f.precision(17);
  f << "kind per_parameter\n";
  f << "dim " << phi_top_.size() << "\n";
  f << "learning_rate " << learning_rate_ << "\n";
  f << "mode " << (mode_ == FitMode::RunningAverage ? "running_average" : "constant_rate") << "\n";
  f << "bot_floor " << bot_floor_ << "\n";
  f << "count " << count_ << "\n";
  for (std::size_t k = 0; k < phi_top_.size(); ++k)
    f << "phi " << k << " " << phi_top_[k] << " " << phi_bot_[k] << "\n";
}

PerParamBaseline PerParamBaseline::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("PerParamBaseline::load: cannot open " + path);
  std::string line, key;
  int dim = 0;
  double lr = 0.01, floor = 1e-12;
  FitMode mode = FitMode::RunningAverage;
  long long count = 0;
  std::vector<std::tuple<std::size_t, double, double>> rows;
  while (std::getline(f, line)) {
    std::istringstream ss(line);
    if (!(ss >> key)) continue;
    if (key == "kind") {
      std::string k;
      ss >> k;
      if (k != "per_parameter") throw std::runtime_error("PerParamBaseline::load: wrong kind");
    } else if (key == "dim") {
      ss >> dim;
    } else if (key == "learning_rate") {
      ss >> lr;
    } else if (key == "bot_floor") {
      ss >> floor;
    } else if (key == "count") {
      ss >> count;
    } else if (key == "mode") {
      std::string m;
      ss >> m;
      mode = (m == "running_average") ? FitMode::RunningAverage : FitMode::ConstantRate;
    } else if (key == "phi") {
      std::size_t k;
      double top, bot;
      if (!(ss >> k >> top >> bot)) throw std::runtime_error("PerParamBaseline::load: bad phi row");
      rows.emplace_back(k, top, bot);
    }
  }
  PerParamBaseline b(dim, lr, mode, floor);
  b.count_ = count;
  for (const auto& [k, top, bot] : rows) {
    if (k >= b.phi_top_.size()) throw std::runtime_error("PerParamBaseline::load: index out of range");
    b.phi_top_[k] = top;
    b.phi_bot_[k] = bot;
  }
  return b;
}

// ---------------------------------------------------------------------------
// Exact oracles
// ---------------------------------------------------------------------------

double ContextBaselineMap::at(const Trajectory& traj, std::size_t i) const {
  const ContextKey key = context_key(kind, traj, i);
  auto it = values.find(key);
  if (it == values.end())
    throw std::invalid_argument("ContextBaselineMap: unseen context at step " + std::to_string(i));
  return it->second;
}

BaselineSpec ContextBaselineMap::to_spec() const {
  auto copy = std::make_shared<ContextBaselineMap>(*this);
  BaselineSpec spec;
  spec.scalar = [copy](const Trajectory& traj, std::size_t i) { return copy->at(traj, i); };
  return spec;
}

const Vec& PerParamBaselineMap::at(const Trajectory& traj, std::size_t i) const {
  const ContextKey key = context_key(kind, traj, i);
  auto it = values.find(key);
  if (it == values.end())
    throw std::invalid_argument("PerParamBaselineMap: unseen context at step " +
                                std::to_string(i));
  return it->second;
}

BaselineSpec PerParamBaselineMap::to_spec() const {
  auto copy = std::make_shared<PerParamBaselineMap>(*this);
  BaselineSpec spec;
  spec.per_parameter = [copy](const Trajectory& traj, std::size_t i) { return copy->at(traj, i); };
  return spec;
}

namespace {

// Shared walk over enumerated paths: hand (path, step, g_sf, score_i) to a sink.
template <typename Sink>
void for_each_step(const TabularMdp& mdp, const SoftmaxPolicy& policy, const ReturnsSpec& returns,
                   std::size_t max_paths, Sink&& sink) {
  const auto paths = enumerate_paths(mdp, policy, max_paths);
  for (const EnumeratedPath& p : paths) {
    const auto fs = returns.compute(p.trajectory, mdp.num_states());
    std::vector<ScoreVector> scores(p.trajectory.transitions.size());
    Vec g_sf(policy.dim(), 0.0);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      scores[i] = policy.score(p.trajectory.transitions[i].state,
                               p.trajectory.transitions[i].action);
      axpy(fs[i].f, scores[i], g_sf);
    }
    for (std::size_t i = 0; i < scores.size(); ++i)
      sink(p.trajectory, p.path_probability, i, g_sf, scores[i]);
  }
}

}  // namespace

ContextBaselineMap optimal_baseline_exact(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                          const ReturnsSpec& returns, ContextKind context,
                                          std::size_t max_paths) {
  std::map<ContextKey, std::pair<double, double>> acc;  // key -> (numerator, denominator)
  for_each_step(mdp, policy, returns, max_paths,
                [&](const Trajectory& traj, double prob, std::size_t i, const Vec& g_sf,
                    const ScoreVector& score) {
                  auto& [num, den] = acc[context_key(context, traj, i)];
                  num += prob * dot(g_sf, score);
                  den += prob * norm_sq(score);
                });
  ContextBaselineMap out;
  out.kind = context;
  for (const auto& [key, nd] : acc) {
    if (!(nd.second > 0.0))
      throw std::runtime_error("optimal_baseline_exact: zero score-norm denominator");
    out.values[key] = nd.first / nd.second;
  }
  return out;
}

PerParamBaselineMap per_param_baseline_exact(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                             const ReturnsSpec& returns, ContextKind context,
                                             std::size_t max_paths) {
  constexpr double kFloor = 1e-12;
  std::map<ContextKey, std::pair<Vec, Vec>> acc;
  for_each_step(mdp, policy, returns, max_paths,
                [&](const Trajectory& traj, double prob, std::size_t i, const Vec& g_sf,
                    const ScoreVector& score) {
                  auto& [num, den] = acc[context_key(context, traj, i)];
                  if (num.empty()) {
                    num.assign(score.size(), 0.0);
                    den.assign(score.size(), 0.0);
                  }
                  for (std::size_t k = 0; k < score.size(); ++k) {
                    num[k] += prob * g_sf[k] * score[k];
                    den[k] += prob * score[k] * score[k];
                  }
                });
  PerParamBaselineMap out;
  out.kind = context;
  for (const auto& [key, nd] : acc) {
    Vec beta(nd.first.size(), 0.0);
    for (std::size_t k = 0; k < beta.size(); ++k)
      beta[k] = nd.second[k] < kFloor ? 0.0 : nd.first[k] / nd.second[k];
    out.values[key] = std::move(beta);
  }
  return out;
}

Vec q_weighted_baseline_exact(const TabularMdp& mdp, const SoftmaxPolicy& policy, double gamma) {
  const ValueFunctions vf = exact_value_functions(mdp, policy, gamma);
  Vec beta(mdp.num_states(), 0.0);
  for (int s = 0; s < mdp.num_states(); ++s) {
    const Vec probs = policy.action_probs(s);
    double num = 0.0, den = 0.0;
    for (int a = 0; a < mdp.num_actions(); ++a) {
      const double w = probs[a] * policy.squared_score_norm(s, a);
      num += w * vf.q[s][a];
      den += w;
    }
    beta[s] = num / den;
  }
  return beta;
}

}  // namespace gradvar
