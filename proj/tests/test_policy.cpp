#include <doctest.h>

#include <cmath>

#include "gradvar/policy.hpp"
#include "oracles.hpp"

using namespace gradvar;

TEST_CASE("action_probs matches closed forms") {
  SoftmaxPolicy even(1, 2, PolicyLayout::PerState, {1.0, 1.0});
  CHECK(even.action_probs(0)[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(even.action_probs(0)[1] == doctest::Approx(0.5).epsilon(1e-14));

  SoftmaxPolicy skew(1, 2, PolicyLayout::PerState, {1.0, 1.0 + std::log(4.0)});
  CHECK(skew.action_probs(0)[0] == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(skew.action_probs(0)[1] == doctest::Approx(0.8).epsilon(1e-13));

  // direct long-double summation oracle
  SoftmaxPolicy three(1, 3, PolicyLayout::PerState, {3.0, 2.0, 1.0});
  long double z = 0.0L;
  for (double t : {3.0, 2.0, 1.0}) z += expl((long double)t);
  const Vec p = three.action_probs(0);
  for (int a = 0; a < 3; ++a)
    CHECK(p[a] == doctest::Approx((double)(expl((long double)(3 - a)) / z)).epsilon(1e-14));
}

TEST_CASE("probabilities sum to 1 and shift invariance holds") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int states = 1 + static_cast<int>(rng.uniform_index(3));
    const int actions = 2 + static_cast<int>(rng.uniform_index(4));
    Vec theta(static_cast<std::size_t>(states) * actions);
    for (double& t : theta) t = rng.uniform(-5.0, 5.0);
    SoftmaxPolicy policy(states, actions, PolicyLayout::PerState, theta);
    for (int s = 0; s < states; ++s) {
      const Vec p = policy.action_probs(s);
      double sum = 0.0;
      for (double v : p) {
        CHECK(v > 0.0);
        sum += v;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
    // add a constant to one state's logits
    const int shifted = static_cast<int>(rng.uniform_index(states));
    const double c = rng.uniform(-3.0, 3.0);
    Vec theta2 = theta;
    for (int a = 0; a < actions; ++a) theta2[shifted * actions + a] += c;
    SoftmaxPolicy policy2(states, actions, PolicyLayout::PerState, theta2);
    for (int s = 0; s < states; ++s) {
      const Vec p1 = policy.action_probs(s);
      const Vec p2 = policy2.action_probs(s);
      for (int a = 0; a < actions; ++a) CHECK(std::abs(p1[a] - p2[a]) <= 1e-12);
    }
  }
}

TEST_CASE("score has the softmax closed form") {
  SoftmaxPolicy even(1, 2, PolicyLayout::PerState, {0.3, 0.3});
  const Vec s = even.score(0, 0);
  CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s[1] == doctest::Approx(-0.5).epsilon(1e-14));

  SoftmaxPolicy three(1, 3, PolicyLayout::PerState, {0.4, -0.2, 1.1});
  const Vec p = three.action_probs(0);
  const Vec s2 = three.score(0, 1);
  CHECK(s2[0] == doctest::Approx(-p[0]).epsilon(1e-14));
  CHECK(s2[1] == doctest::Approx(1.0 - p[1]).epsilon(1e-14));
  CHECK(s2[2] == doctest::Approx(-p[2]).epsilon(1e-14));
}

TEST_CASE("score matches central finite differences of log prob") {
  Rng rng(23);
  for (auto layout : {PolicyLayout::PerState, PolicyLayout::StateAgnostic}) {
    const int states = 3, actions = 3;
    const int dim = layout == PolicyLayout::PerState ? states * actions : actions;
    Vec theta(dim);
    for (double& t : theta) t = rng.uniform(-2.0, 2.0);
    SoftmaxPolicy policy(states, actions, layout, theta);
    for (int s = 0; s < states; ++s) {
      for (int a = 0; a < actions; ++a) {
        const Vec analytic = policy.score(s, a);
        const Vec fd = oracles::finite_difference_gradient(
            [&](const Vec& th) {
              return SoftmaxPolicy(states, actions, layout, th).log_prob(s, a);
            },
            theta, 1e-5);
        for (int k = 0; k < dim; ++k) CHECK(std::abs(analytic[k] - fd[k]) <= 1e-6);
      }
    }
  }
}

TEST_CASE("squared score norm") {
  SoftmaxPolicy even(1, 2, PolicyLayout::PerState, {0.0, 0.0});
  CHECK(even.squared_score_norm(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(even.squared_score_norm(0, 1) == doctest::Approx(0.5).epsilon(1e-14));

  SoftmaxPolicy skew(1, 2, PolicyLayout::PerState, {1.0, 1.0 + std::log(4.0)});  // p = (0.2, 0.8)
  CHECK(skew.squared_score_norm(0, 0) == doctest::Approx(1.28).epsilon(1e-12));
  CHECK(skew.squared_score_norm(0, 1) == doctest::Approx(0.08).epsilon(1e-12));

  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    Vec theta(4);
    for (double& t : theta) t = rng.uniform(-6.0, 6.0);
    SoftmaxPolicy policy(1, 4, PolicyLayout::PerState, theta);
    for (int a = 0; a < 4; ++a) {
      const double direct = norm_sq(policy.score(0, a));
      const double fast = policy.squared_score_norm(0, a);
      CHECK(fast == doctest::Approx(direct).epsilon(1e-12));
      CHECK(fast > 0.0);
    }
  }
}

TEST_CASE("score expectation is exactly zero and inactive blocks are zero") {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const int states = 3, actions = 4;
    Vec theta(static_cast<std::size_t>(states) * actions);
    for (double& t : theta) t = rng.uniform(-4.0, 4.0);
    SoftmaxPolicy policy(states, actions, PolicyLayout::PerState, theta);
    for (int s = 0; s < states; ++s) {
      const Vec p = policy.action_probs(s);
      Vec mean(policy.dim(), 0.0);
      for (int a = 0; a < actions; ++a) axpy(p[a], policy.score(s, a), mean);
      for (double v : mean) CHECK(std::abs(v) <= 1e-12);
      // inactive blocks exactly zero
      const Vec sc = policy.score(s, 0);
      for (int other = 0; other < states; ++other) {
        if (other == s) continue;
        for (int a = 0; a < actions; ++a) CHECK(sc[other * actions + a] == 0.0);
      }
    }
  }
}

TEST_CASE("state-agnostic layout shares logits across states") {
  SoftmaxPolicy policy(3, 2, PolicyLayout::StateAgnostic, {0.5, -0.5});
  CHECK(policy.dim() == 2);
  for (int s = 0; s < 3; ++s) {
    CHECK(policy.action_probs(s) == policy.action_probs(0));
    CHECK(policy.score(s, 1) == policy.score(0, 1));
  }
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(SoftmaxPolicy(2, 2, PolicyLayout::PerState, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SoftmaxPolicy(1, 2, PolicyLayout::PerState, {1.0, std::nan("")}),
                  std::invalid_argument);
  SoftmaxPolicy p(1, 2, PolicyLayout::PerState, {0.0, 0.0});
  CHECK_THROWS_AS(p.action_probs(5), std::out_of_range);
  CHECK_THROWS_AS(p.score(0, 7), std::out_of_range);
}
