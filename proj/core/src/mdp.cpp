#include "gradvar/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace gradvar {

namespace {

constexpr double kProbTol = 1e-12;

// Dense linear solve with partial pivoting. State counts here are tiny, so
// this is exact to machine precision and dependency-free.
Vec solve_linear(std::vector<Vec> a, Vec b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-14)
      throw std::runtime_error("solve_linear: singular system (is the MDP episodic?)");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  Vec x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace

TabularMdp::TabularMdp(int num_states, int num_actions,
                       std::vector<std::vector<std::vector<Outcome>>> kernel, Vec initial_dist,
                       int horizon_cap, ObjectiveSign objective)
    : num_states_(num_states),
      num_actions_(num_actions),
      kernel_(std::move(kernel)),
      initial_dist_(std::move(initial_dist)),
      horizon_cap_(horizon_cap),
      objective_(objective) {
  if (num_states_ <= 0 || num_actions_ <= 0)
    throw std::invalid_argument("TabularMdp: num_states and num_actions must be positive");
  if (horizon_cap_ <= 0) throw std::invalid_argument("TabularMdp: horizon_cap must be positive");
  if (kernel_.size() != static_cast<std::size_t>(num_states_))
    throw std::invalid_argument("TabularMdp: kernel must have one row per state");
  if (initial_dist_.size() != static_cast<std::size_t>(num_states_))
    throw std::invalid_argument("TabularMdp: initial_dist size mismatch");

  double init_sum = 0.0;
  for (double p : initial_dist_) {
    if (!(p >= 0.0)) throw std::invalid_argument("TabularMdp: negative initial probability");
    init_sum += p;
  }
  if (std::abs(init_sum - 1.0) > kProbTol)
    throw std::invalid_argument("TabularMdp: initial_dist sums to " + std::to_string(init_sum));

  for (int s = 0; s < num_states_; ++s) {
    if (kernel_[s].size() != static_cast<std::size_t>(num_actions_))
      throw std::invalid_argument("TabularMdp: state " + std::to_string(s) +
                                  " must define every action");
    for (int a = 0; a < num_actions_; ++a) {
      auto& outs = kernel_[s][a];
      if (outs.empty())
        throw std::invalid_argument("TabularMdp: no outcomes for state " + std::to_string(s) +
                                    " action " + std::to_string(a));
      double sum = 0.0;
      for (const Outcome& o : outs) {
        if (!(o.prob >= 0.0))
          throw std::invalid_argument("TabularMdp: negative outcome probability");
        if (!std::isfinite(o.reward))
          throw std::invalid_argument("TabularMdp: non-finite reward");
        if (o.next != kTerminal && (o.next < 0 || o.next >= num_states_))
          throw std::invalid_argument("TabularMdp: next state out of range");
        sum += o.prob;
      }
      if (std::abs(sum - 1.0) > kProbTol)
        throw std::invalid_argument("TabularMdp: outcome probabilities for state " +
                                    std::to_string(s) + " action " + std::to_string(a) +
                                    " sum to " + std::to_string(sum));
      // Merge duplicate (reward, next) outcomes and drop zero-probability
      // ones, so enumeration lists each distinct path exactly once.
      std::vector<Outcome> merged;
      for (const Outcome& o : outs) {
        if (o.prob == 0.0) continue;
        bool found = false;
        for (Outcome& m : merged) {
          if (m.next == o.next && m.reward == o.reward) {
            m.prob += o.prob;
            found = true;
            break;
          }
        }
        if (!found) merged.push_back(o);
      }
      outs = std::move(merged);
    }
  }
}

const std::vector<Outcome>& TabularMdp::outcomes(int state, int action) const {
  if (state < 0 || state >= num_states_) throw std::out_of_range("TabularMdp: state out of range");
  if (action < 0 || action >= num_actions_)
    throw std::out_of_range("TabularMdp: action out of range");
  return kernel_[state][action];
}

double TabularMdp::max_abs_reward() const {
  double m = 0.0;
  for (const auto& row : kernel_)
    for (const auto& outs : row)
      for (const Outcome& o : outs) m = std::max(m, std::abs(o.reward));
  return m;
}

Trajectory sample_trajectory(const TabularMdp& mdp, const SoftmaxPolicy& policy, Rng& rng) {
  if (policy.num_actions() != mdp.num_actions())
    throw std::invalid_argument("sample_trajectory: policy/mdp action dimension mismatch");
  if (policy.layout() == PolicyLayout::PerState && policy.num_states() != mdp.num_states())
    throw std::invalid_argument("sample_trajectory: policy/mdp state dimension mismatch");

  Trajectory traj;
  int state = static_cast<int>(rng.categorical(mdp.initial_dist()));
  for (int step = 1; step <= mdp.horizon_cap(); ++step) {
    const Vec probs = policy.action_probs(state);
    const int action = static_cast<int>(rng.categorical(probs));
    const auto& outs = mdp.outcomes(state, action);
    Vec oprobs(outs.size());
    for (std::size_t i = 0; i < outs.size(); ++i) oprobs[i] = outs[i].prob;
    const Outcome& o = outs[rng.categorical(oprobs)];
    traj.transitions.push_back(
        {state, action, o.reward, std::log(probs[action]), step});
    traj.total_reward += o.reward;
    if (o.next == kTerminal) return traj;
    if (step == mdp.horizon_cap()) {
      traj.forced_termination = true;
      return traj;
    }
    state = o.next;
  }
  return traj;  // unreachable
}

namespace {

struct PathWalker {
  const TabularMdp& mdp;
  const SoftmaxPolicy& policy;
  std::size_t max_paths;
  std::vector<EnumeratedPath>* out;  // nullptr: count only

  std::size_t count = 0;
  std::vector<Transition> stack;
  std::vector<Vec> prob_cache;

  PathWalker(const TabularMdp& m, const SoftmaxPolicy& p, std::size_t bound,
             std::vector<EnumeratedPath>* o)
      : mdp(m), policy(p), max_paths(bound), out(o) {
    prob_cache.reserve(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s) prob_cache.push_back(policy.action_probs(s));
  }

  void leaf(double prob, bool forced) {
    if (++count > max_paths)
      throw std::runtime_error("enumerate_paths: path count exceeds bound of " +
                               std::to_string(max_paths));
    if (!out) return;
    Trajectory traj;
    traj.transitions = stack;
    for (const Transition& t : traj.transitions) traj.total_reward += t.reward;
    traj.forced_termination = forced;
    out->push_back({std::move(traj), prob});
  }

  void walk(int state, int step, double prob) {
    const Vec& probs = prob_cache[state];
    for (int a = 0; a < mdp.num_actions(); ++a) {
      const double pa = probs[a];
      if (pa == 0.0) continue;
      const double logpa = std::log(pa);
      const auto& outs = mdp.outcomes(state, a);
      if (step == mdp.horizon_cap()) {
        // The episode ends here no matter what the kernel says, so outcomes
        // that differ only in next-state collapse into one path per reward.
        std::vector<Outcome> grouped;
        std::vector<bool> any_continue;
        for (const Outcome& o : outs) {
          bool found = false;
          for (std::size_t g = 0; g < grouped.size(); ++g) {
            if (grouped[g].reward == o.reward) {
              grouped[g].prob += o.prob;
              if (o.next != kTerminal) any_continue[g] = true;
              found = true;
              break;
            }
          }
          if (!found) {
            grouped.push_back(o);
            any_continue.push_back(o.next != kTerminal);
          }
        }
        for (std::size_t g = 0; g < grouped.size(); ++g) {
          stack.push_back({state, a, grouped[g].reward, logpa, step});
          leaf(prob * pa * grouped[g].prob, any_continue[g]);
          stack.pop_back();
        }
      } else {
        for (const Outcome& o : outs) {
          stack.push_back({state, a, o.reward, logpa, step});
          if (o.next == kTerminal) {
            leaf(prob * pa * o.prob, false);
          } else {
            walk(o.next, step + 1, prob * pa * o.prob);
          }
          stack.pop_back();
        }
      }
    }
  }

  void run() {
    const Vec& d0 = mdp.initial_dist();
    for (int s = 0; s < mdp.num_states(); ++s) {
      if (d0[s] == 0.0) continue;
      walk(s, 1, d0[s]);
    }
  }
};

}  // namespace

std::vector<EnumeratedPath> enumerate_paths(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                            std::size_t max_paths) {
  std::vector<EnumeratedPath> paths;
  PathWalker walker(mdp, policy, max_paths, &paths);
  walker.run();
  return paths;
}

bool enumeration_feasible(const TabularMdp& mdp, std::size_t max_paths) {
  // Action probabilities do not change the path count, so any valid policy
  // works; a uniform one avoids constructing softmax edge cases.
  SoftmaxPolicy uniform(mdp.num_states(), mdp.num_actions(), PolicyLayout::StateAgnostic);
  PathWalker walker(mdp, uniform, max_paths, nullptr);
  try {
    walker.run();
  } catch (const std::runtime_error&) {
    return false;
  }
  return true;
}

ValueFunctions exact_value_functions(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                     double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("exact_value_functions: gamma must be in (0, 1]");
  const int n = mdp.num_states();
  std::vector<Vec> a(n, Vec(n, 0.0));
  Vec r_pi(n, 0.0);
  for (int s = 0; s < n; ++s) {
    a[s][s] = 1.0;
    const Vec probs = policy.action_probs(s);
    for (int act = 0; act < mdp.num_actions(); ++act) {
      for (const Outcome& o : mdp.outcomes(s, act)) {
        r_pi[s] += probs[act] * o.prob * o.reward;
        if (o.next != kTerminal) a[s][o.next] -= gamma * probs[act] * o.prob;
      }
    }
  }
  ValueFunctions vf;
  vf.v = solve_linear(std::move(a), std::move(r_pi));
  vf.q.assign(n, Vec(mdp.num_actions(), 0.0));
  for (int s = 0; s < n; ++s) {
    for (int act = 0; act < mdp.num_actions(); ++act) {
      double q = 0.0;
      for (const Outcome& o : mdp.outcomes(s, act))
        q += o.prob * (o.reward + (o.next != kTerminal ? gamma * vf.v[o.next] : 0.0));
      vf.q[s][act] = q;
    }
  }
  return vf;
}

double exact_expected_reward(const TabularMdp& mdp, const SoftmaxPolicy& policy, double gamma) {
  const ValueFunctions vf = exact_value_functions(mdp, policy, gamma);
  return dot(mdp.initial_dist(), vf.v);
}

Vec state_occupancy(const TabularMdp& mdp, const SoftmaxPolicy& policy, double gamma) {
  const int n = mdp.num_states();
  // (I - gamma * P_pi^T) d = d0
  std::vector<Vec> a(n, Vec(n, 0.0));
  for (int s = 0; s < n; ++s) a[s][s] = 1.0;
  for (int s = 0; s < n; ++s) {
    const Vec probs = policy.action_probs(s);
    for (int act = 0; act < mdp.num_actions(); ++act)
      for (const Outcome& o : mdp.outcomes(s, act))
        if (o.next != kTerminal) a[o.next][s] -= gamma * probs[act] * o.prob;
  }
  return solve_linear(std::move(a), mdp.initial_dist());
}

Vec exact_policy_gradient(const TabularMdp& mdp, const SoftmaxPolicy& policy, double gamma) {
  const ValueFunctions vf = exact_value_functions(mdp, policy, gamma);
  const Vec occ = state_occupancy(mdp, policy, gamma);
  Vec grad(policy.dim(), 0.0);
  for (int s = 0; s < mdp.num_states(); ++s) {
    if (occ[s] == 0.0) continue;
    const Vec probs = policy.action_probs(s);
    for (int a = 0; a < mdp.num_actions(); ++a) {
      const double w = occ[s] * probs[a] * vf.q[s][a];
      if (w == 0.0) continue;
      axpy(w, policy.score(s, a), grad);
    }
  }
  return grad;
}

TabularMdp coin_flip_mdp(double payoff_scale) {
  // States: 0 = start, 1 = after heads, 2 = after tails.
  // Payoffs land on the second flip: TT pays 1, HH pays 2, mixed pays 4.
  const double s1 = 1.0 * payoff_scale;
  const double s2 = 2.0 * payoff_scale;
  const double s4 = 4.0 * payoff_scale;
  std::vector<std::vector<std::vector<Outcome>>> kernel(3);
  kernel[0] = {{{1.0, 0.0, 2}},          // tails
               {{1.0, 0.0, 1}}};         // heads
  kernel[1] = {{{1.0, s4, kTerminal}},   // heads then tails
               {{1.0, s2, kTerminal}}};  // heads then heads
  kernel[2] = {{{1.0, s1, kTerminal}},   // tails then tails
               {{1.0, s4, kTerminal}}};  // tails then heads
  return TabularMdp(3, 2, std::move(kernel), {1.0, 0.0, 0.0}, 4, ObjectiveSign::Maximize);
}

TabularMdp bandit_mdp(Vec arm_rewards) {
  const int arms = static_cast<int>(arm_rewards.size());
  if (arms < 2) throw std::invalid_argument("bandit_mdp: need at least two arms");
  std::vector<std::vector<std::vector<Outcome>>> kernel(1);
  for (int a = 0; a < arms; ++a) kernel[0].push_back({{1.0, arm_rewards[a], kTerminal}});
  return TabularMdp(1, arms, std::move(kernel), {1.0}, 2, ObjectiveSign::Maximize);
}

TabularMdp two_state_mdp(double reward_ll, double reward_lr, double reward_rl, double reward_rr,
                         double termination_prob, Vec initial_dist, int horizon_cap) {
  if (!(termination_prob > 0.0 && termination_prob <= 1.0))
    throw std::invalid_argument("two_state_mdp: termination_prob must be in (0, 1]");
  const double cont = 1.0 - termination_prob;
  auto pair = [&](double reward, int next) {
    std::vector<Outcome> outs;
    if (cont > 0.0) outs.push_back({cont, reward, next});
    outs.push_back({termination_prob, reward, kTerminal});
    return outs;
  };
  std::vector<std::vector<std::vector<Outcome>>> kernel(2);
  kernel[0] = {pair(reward_ll, 0), pair(reward_lr, 1)};
  kernel[1] = {pair(reward_rl, 0), pair(reward_rr, 1)};
  return TabularMdp(2, 2, std::move(kernel), std::move(initial_dist), horizon_cap,
                    ObjectiveSign::Minimize);
}

void TabularMdp::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("TabularMdp::save: cannot open " + path);
  f << "states " << num_states_ << "\n";
  f << "actions " << num_actions_ << "\n";
  f << "horizon_cap " << horizon_cap_ << "\n";
  f << "objective " << (objective_ == ObjectiveSign::Maximize ? "maximize" : "minimize") << "\n";
  f.precision(17);
  for (int s = 0; s < num_states_; ++s)
    if (initial_dist_[s] != 0.0) f << "initial " << s << " " << initial_dist_[s] << "\n";
  for (int s = 0; s < num_states_; ++s)
    for (int a = 0; a < num_actions_; ++a)
      for (const Outcome& o : kernel_[s][a]) {
        f << "transition " << s << " " << a << " " << o.prob << " " << o.reward << " ";
        if (o.next == kTerminal)
          f << "T\n";
        else
          f << o.next << "\n";
      }
}

TabularMdp TabularMdp::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("TabularMdp::load: cannot open " + path);
  int states = -1, actions = -1, cap = -1;
  ObjectiveSign objective = ObjectiveSign::Maximize;
  struct Row {
    int s, a;
    Outcome o;
  };
  std::vector<Row> rows;
  std::vector<std::pair<int, double>> initial;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    auto fail = [&](const std::string& what) {
      throw std::runtime_error("TabularMdp::load: " + path + ":" + std::to_string(lineno) + ": " +
                               what);
    };
    if (key == "states") {
      if (!(ss >> states)) fail("expected state count");
    } else if (key == "actions") {
      if (!(ss >> actions)) fail("expected action count");
    } else if (key == "horizon_cap") {
      if (!(ss >> cap)) fail("expected horizon cap");
    } else if (key == "objective") {
      std::string v;
      if (!(ss >> v)) fail("expected maximize|minimize");
      if (v == "maximize")
        objective = ObjectiveSign::Maximize;
      else if (v == "minimize")
        objective = ObjectiveSign::Minimize;
      else
        fail("unknown objective '" + v + "'");
    } else if (key == "initial") {
      int s;
      double p;
      if (!(ss >> s >> p)) fail("expected 'initial <state> <prob>'");
      initial.emplace_back(s, p);
    } else if (key == "transition") {
      Row r;
      std::string next;
      if (!(ss >> r.s >> r.a >> r.o.prob >> r.o.reward >> next))
        fail("expected 'transition <state> <action> <prob> <reward> <next|T>'");
      r.o.next = (next == "T") ? kTerminal : std::stoi(next);
      rows.push_back(r);
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (states <= 0 || actions <= 0 || cap <= 0)
    throw std::runtime_error("TabularMdp::load: " + path +
                             ": states, actions and horizon_cap are required");
  std::vector<std::vector<std::vector<Outcome>>> kernel(
      states, std::vector<std::vector<Outcome>>(actions));
  for (const Row& r : rows) {
    if (r.s < 0 || r.s >= states || r.a < 0 || r.a >= actions)
      throw std::runtime_error("TabularMdp::load: transition indices out of range");
    kernel[r.s][r.a].push_back(r.o);
  }
  Vec d0(states, 0.0);
  for (auto [s, p] : initial) {
    if (s < 0 || s >= states) throw std::runtime_error("TabularMdp::load: initial state out of range");
    d0[s] += p;
  }
  return TabularMdp(states, actions, std::move(kernel), std::move(d0), cap, objective);
}

}  // namespace gradvar
