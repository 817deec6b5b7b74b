#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "predrl/critic.hpp"

namespace predrl {
namespace {

RobotState random_state(std::mt19937_64& rng, double scale = 3.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng), u(rng), u(rng)};
}

Action random_action(std::mt19937_64& rng, double scale = 3.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng)};
}

StackMatrix random_symmetric(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  StackMatrix a;
  for (int i = 0; i < kStackDim; ++i)
    for (int j = 0; j < kStackDim; ++j) a(i, j) = n(rng);
  return (a + a.transpose()) / 2;
}

WeightVector random_weights(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  WeightVector w;
  for (int i = 0; i < kFeatureDim; ++i) w[i] = u(rng);
  return w;
}

TEST(Critic, ZeroStackGivesZeroFeatures) {
  const auto phi = features({}, {});
  EXPECT_EQ(phi.size(), 28);
  EXPECT_TRUE(phi.isZero(0.0));
}

TEST(Critic, FeatureOrderingFirstEntryIsXSquared) {
  WeightVector e1 = WeightVector::Zero();
  e1[0] = 1.0;
  EXPECT_DOUBLE_EQ(q_hat(e1, {3, 7, 0.2, 1, 1}, {5, 6}), 9.0);
  // Second entry is the doubled x*y monomial.
  WeightVector e2 = WeightVector::Zero();
  e2[1] = 1.0;
  EXPECT_DOUBLE_EQ(q_hat(e2, {3, 7, 0.2, 1, 1}, {5, 6}), 42.0);
  // Last entry is M^2.
  WeightVector elast = WeightVector::Zero();
  elast[27] = 1.0;
  EXPECT_DOUBLE_EQ(q_hat(elast, {3, 7, 0.2, 1, 1}, {5, 6}), 36.0);
}

TEST(Critic, MatchesDenseQuadraticForm) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const StackMatrix s = random_symmetric(rng);
    const auto x = random_state(rng);
    const auto a = random_action(rng);
    const StackVector z = stack(x, a);
    const double dense = z.dot(s * z);
    const double q = q_hat(pack_symmetric(s), x, a);
    EXPECT_NEAR(q, dense, 1e-12 * std::max(1.0, std::abs(dense)));
  }
}

TEST(Critic, PackRoundTrip) {
  std::mt19937_64 rng(1);
  const StackMatrix s = random_symmetric(rng);
  EXPECT_TRUE(unpack_symmetric(pack_symmetric(s)).isApprox(s, 0.0));
}

TEST(Critic, StackWrapsHeading) {
  const auto z = stack({1, 2, 3 * std::numbers::pi / 2, 4, 5}, {6, 7});
  EXPECT_NEAR(z[2], -std::numbers::pi / 2, 1e-15);
}

TEST(Critic, LinearInWeights) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto t1 = random_weights(rng);
    const auto t2 = random_weights(rng);
    const double a = 1.7, b = -0.4;
    const auto x = random_state(rng);
    const auto u = random_action(rng);
    EXPECT_NEAR(q_hat(WeightVector(a * t1 + b * t2), x, u),
                a * q_hat(t1, x, u) + b * q_hat(t2, x, u), 1e-11);
  }
}

TEST(Critic, SpanOverloadChecksLength) {
  std::vector<double> ok(28, 0.0);
  ok[0] = 2.0;
  EXPECT_DOUBLE_EQ(q_hat(std::span<const double>(ok), {3, 0, 0, 0, 0}, {}), 18.0);
  std::vector<double> bad(27, 0.0);
  EXPECT_THROW(q_hat(std::span<const double>(bad), {}, {}), std::length_error);
}

TEST(Critic, TdErrorZeroCase) {
  const Transition t{{}, {}, {}, {}, 0.0};
  EXPECT_EQ(td_error(WeightVector::Zero(), WeightVector::Zero(), t, 0.9), 0.0);
}

// Build transitions whose costs make theta_star an exact TD fixed point.
std::vector<Transition> consistent_transitions(const WeightVector& theta_star, double gamma,
                                               int count, std::mt19937_64& rng) {
  std::vector<Transition> out;
  for (int i = 0; i < count; ++i) {
    Transition t{random_state(rng), random_action(rng), random_state(rng), random_action(rng), 0};
    t.prev_stage_cost = q_hat(theta_star, t.prev_state, t.prev_action) -
                        gamma * q_hat(theta_star, t.state, t.action);
    out.push_back(t);
  }
  return out;
}

TEST(Critic, TdErrorVanishesOnConsistentData) {
  std::mt19937_64 rng(4);
  const auto star = random_weights(rng);
  for (const auto& t : consistent_transitions(star, 0.95, 50, rng))
    EXPECT_NEAR(td_error(star, star, t, 0.95), 0.0, 1e-9);
}

TEST(Critic, TdErrorSlopeIsPrevFeatures) {
  std::mt19937_64 rng(6);
  const Transition t{random_state(rng), random_action(rng), random_state(rng), random_action(rng),
                     1.3};
  const auto theta = random_weights(rng);
  const auto minus = random_weights(rng);
  const auto phi = features(t.prev_state, t.prev_action);
  const double h = 1e-6;
  for (int k = 0; k < kFeatureDim; ++k) {
    WeightVector tp = theta, tm = theta;
    tp[k] += h;
    tm[k] -= h;
    const double slope = (td_error(tp, minus, t, 0.9) - td_error(tm, minus, t, 0.9)) / (2 * h);
    EXPECT_NEAR(slope, phi[k], 1e-6 * std::max(1.0, std::abs(phi[k])));
  }
}

TEST(Critic, LossOfSingleErrorOfTwoIsTwo) {
  ReplayBuffer buf(5);
  buf.push({{}, {}, {}, {}, -2.0});
  EXPECT_DOUBLE_EQ(*critic_loss(WeightVector::Zero(), buf, WeightVector::Zero(), 1.0), 2.0);
  EXPECT_FALSE(critic_loss(WeightVector::Zero(), ReplayBuffer(3), WeightVector::Zero(), 1.0));
}

TEST(Critic, LossIsNonNegative) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    ReplayBuffer buf(20);
    for (const auto& t : consistent_transitions(random_weights(rng), 0.9, 10, rng)) buf.push(t);
    EXPECT_GE(*critic_loss(random_weights(rng), buf, random_weights(rng), 0.9), 0.0);
  }
}

TEST(Critic, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(10);
  ReplayBuffer buf(20);
  for (const auto& t : consistent_transitions(random_weights(rng), 0.9, 15, rng)) buf.push(t);
  const auto theta = random_weights(rng);
  const auto minus = random_weights(rng);
  const auto g = critic_loss_gradient(theta, buf, minus, 0.9);
  const double h = 1e-5;
  for (int k = 0; k < kFeatureDim; ++k) {
    WeightVector tp = theta, tm = theta;
    tp[k] += h;
    tm[k] -= h;
    const double fd = (*critic_loss(tp, buf, minus, 0.9) - *critic_loss(tm, buf, minus, 0.9)) / (2 * h);
    EXPECT_NEAR(g[k], fd, 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

TEST(Critic, RecoversPlantedWeights) {
  std::mt19937_64 rng(12);
  const auto star = random_weights(rng);
  const auto minus = random_weights(rng);
  ReplayBuffer buf(40);
  for (int i = 0; i < 40; ++i) {
    Transition t{random_state(rng), random_action(rng), random_state(rng), random_action(rng), 0};
    t.prev_stage_cost = q_hat(star, t.prev_state, t.prev_action) -
                        0.9 * q_hat(minus, t.state, t.action);
    buf.push(t);
  }
  const auto up = update_critic(buf, minus, 0.9, WeightBounds::symmetric(1e3));
  EXPECT_TRUE(up.updated);
  EXPECT_LT((up.theta - star).norm(), 1e-6);
  EXPECT_LT(up.loss_after, 1e-12);
}

TEST(Critic, AllZeroDataGivesZeroWeights) {
  ReplayBuffer buf(20);
  for (int i = 0; i < 20; ++i) buf.push({});
  const auto up = update_critic(buf, WeightVector::Zero(), 1.0, WeightBounds::symmetric(1e3));
  EXPECT_TRUE(up.theta.isZero(0.0));
}

TEST(Critic, EmptyBufferKeepsWeights) {
  std::mt19937_64 rng(13);
  const auto minus = random_weights(rng);
  const auto up = update_critic(ReplayBuffer(5), minus, 1.0, WeightBounds::symmetric(1e3));
  EXPECT_FALSE(up.updated);
  EXPECT_EQ(up.theta, minus);
}

TEST(Critic, RespectsBoundsAndNeverIncreasesLoss) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const auto star = random_weights(rng, 5.0);
    ReplayBuffer buf(20);
    std::uniform_int_distribution<int> count(1, 30);
    for (const auto& t : consistent_transitions(star, 0.9, count(rng), rng)) buf.push(t);
    const auto bounds = WeightBounds::symmetric(1.0);
    const auto minus = random_weights(rng, 1.0);
    for (const bool psd : {false, true}) {
      const auto up = update_critic(buf, minus, 0.9, bounds, 1e-8, psd);
      EXPECT_TRUE(bounds.contains(up.theta));
      EXPECT_LE(up.loss_after, up.loss_before * (1 + 1e-12) + 1e-12);
      EXPECT_NEAR(up.loss_after, *critic_loss(up.theta, buf, minus, 0.9),
                  1e-9 * std::max(1.0, up.loss_after));
    }
  }
}

TEST(Critic, PsdProjection) {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 50; ++i) {
    const auto theta = pack_symmetric(random_symmetric(rng));
    const auto p = project_psd(theta);
    Eigen::SelfAdjointEigenSolver<StackMatrix> eig(unpack_symmetric(p));
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12);
    EXPECT_LT((project_psd(p) - p).norm(), 1e-10);
  }
}

TEST(Critic, WeightBoundsProjection) {
  const auto b = WeightBounds::symmetric(2.0);
  WeightVector w = WeightVector::Constant(5.0);
  w[3] = -7.0;
  w[4] = 0.5;
  const auto p = b.project(w);
  EXPECT_EQ(p[0], 2.0);
  EXPECT_EQ(p[3], -2.0);
  EXPECT_EQ(p[4], 0.5);
  EXPECT_TRUE(b.contains(p));
  EXPECT_FALSE(b.contains(w));
}

TEST(Critic, ReplayBufferIsFifo) {
  ReplayBuffer buf(3);
  for (int i = 0; i < 7; ++i) {
    buf.push({{}, {}, {}, {}, static_cast<double>(i)});
    EXPECT_LE(buf.size(), 3u);
  }
  ASSERT_EQ(buf.size(), 3u);
  EXPECT_EQ(buf[0].prev_stage_cost, 4.0);
  EXPECT_EQ(buf[2].prev_stage_cost, 6.0);
  buf.clear();
  EXPECT_TRUE(buf.empty());
}

}  // namespace
}  // namespace predrl
