#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "predrl/dynamics.hpp"

namespace predrl {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Dynamics, RestStaysAtRest) {
  const auto d = rhs({}, {}, RobotParams{});
  EXPECT_EQ(d, (RobotState{0, 0, 0, 0, 0}));
}

TEST(Dynamics, HandEvaluatedRhs) {
  const auto d = rhs({0, 0, 0, 1, 0}, {10, 1}, RobotParams{10, 1});
  EXPECT_EQ(d, (RobotState{1, 0, 0, 1, 1}));
}

TEST(Dynamics, HeadingNorth) {
  const auto d = rhs({0, 0, kPi / 2, 2, 0}, {0, 0}, RobotParams{});
  EXPECT_NEAR(d.x, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(d.y, 2.0);
  EXPECT_EQ(d.alpha, 0.0);
  EXPECT_EQ(d.v, 0.0);
  EXPECT_EQ(d.omega, 0.0);
}

TEST(Dynamics, RhsRejectsNonFinite) {
  EXPECT_THROW(rhs({NAN, 0, 0, 0, 0}, {}, RobotParams{}), DomainError);
  EXPECT_THROW(rhs({}, {INFINITY, 0}, RobotParams{}), DomainError);
}

TEST(Dynamics, RhsMatchesHandCodedDuplicate) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 100; ++i) {
    const RobotState s{u(rng), u(rng), u(rng), u(rng), u(rng)};
    const Action a{u(rng) * 30, u(rng) * 10};
    const RobotParams p{1.0 + std::abs(u(rng)), 0.1 + std::abs(u(rng))};
    const auto d = rhs(s, a, p);
    EXPECT_EQ(d.x, s.v * std::cos(s.alpha));
    EXPECT_EQ(d.y, s.v * std::sin(s.alpha));
    EXPECT_EQ(d.alpha, s.omega);
    EXPECT_EQ(d.v, a.force / p.mass);
    EXPECT_EQ(d.omega, a.torque / p.inertia);
  }
}

TEST(Dynamics, EulerStepExample) {
  const auto s = euler_step(0.1, {0, 0, 0, 1, 0}, {10, 1}, RobotParams{});
  EXPECT_DOUBLE_EQ(s.x, 0.1);
  EXPECT_EQ(s.y, 0.0);
  EXPECT_EQ(s.alpha, 0.0);
  EXPECT_DOUBLE_EQ(s.v, 1.1);
  EXPECT_DOUBLE_EQ(s.omega, 0.1);
  EXPECT_EQ(euler_step(0.1, {}, {}, RobotParams{}), RobotState{});
}

TEST(Dynamics, StepRejectsNonPositiveH) {
  EXPECT_THROW(euler_step(0.0, {}, {}, RobotParams{}), std::invalid_argument);
  EXPECT_THROW(rk4_step(-0.1, {}, {}, RobotParams{}), std::invalid_argument);
}

TEST(Dynamics, Rk4TrivialCases) {
  const RobotState rest{1, 2, 0.3, 0, 0};
  EXPECT_EQ(rk4_step(0.5, rest, {}, RobotParams{}), rest);
  const auto s = rk4_step(1.0, {0, 0, 0, 1, 0}, {}, RobotParams{});
  EXPECT_EQ(s.x, 1.0);
  EXPECT_EQ(s.y, 0.0);
}

TEST(Dynamics, ParamsValidation) {
  EXPECT_THROW((RobotParams{0.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((RobotParams{1.0, -1.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW(RobotParams{}.validate());
}

TEST(Dynamics, ConservationLaws) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 50; ++i) {
    const RobotState s{u(rng), u(rng), u(rng), u(rng), u(rng)};
    // Pure rotation: no force, speed unchanged.
    EXPECT_EQ(rk4_step(0.1, s, {0, u(rng) * 10}, RobotParams{}).v, s.v);
    // Pure thrust without turn rate: heading unchanged.
    RobotState straight = s;
    straight.omega = 0.0;
    EXPECT_EQ(rk4_step(0.1, straight, {u(rng) * 50, 0}, RobotParams{}).alpha, straight.alpha);
    EXPECT_EQ(euler_step(0.1, straight, {u(rng) * 50, 0}, RobotParams{}).alpha, straight.alpha);
  }
}

// Global error over a fixed time against a fine RK4 reference; the observed
// order is log2 of the error ratio when the step is halved.
template <typename Step>
double observed_order(Step step, double h, const RobotState& s, const Action& a) {
  const RobotParams p;
  auto run = [&](auto stepper, double dt) {
    RobotState x = s;
    const int n = static_cast<int>(std::lround(1.0 / dt));
    for (int i = 0; i < n; ++i) x = stepper(dt, x, a, p);
    return x;
  };
  const RobotState ref = run(rk4_step, h / 64);
  auto err = [&](const RobotState& x) {
    return std::max({std::abs(x.x - ref.x), std::abs(x.y - ref.y), std::abs(x.alpha - ref.alpha),
                     std::abs(x.v - ref.v), std::abs(x.omega - ref.omega)});
  };
  return std::log2(err(run(step, h)) / err(run(step, h / 2)));
}

TEST(Dynamics, EulerIsFirstOrderAndRk4FourthOrder) {
  const RobotState s{1.0, -2.0, 0.7, 1.5, -0.8};
  const Action a{12.0, 1.5};
  EXPECT_NEAR(observed_order(euler_step, 0.01, s, a), 1.0, 0.2);
  EXPECT_NEAR(observed_order(rk4_step, 0.1, s, a), 4.0, 0.5);
}

TEST(Dynamics, EulerAgreesWithRk4ToSecondOrderPerStep) {
  const RobotState s{0.3, 0.2, -1.1, 0.9, 0.4};
  const Action a{5.0, -2.0};
  auto gap = [&](double h) {
    const auto e = euler_step(h, s, a, RobotParams{});
    const auto r = rk4_step(h, s, a, RobotParams{});
    return std::hypot(e.x - r.x, e.y - r.y, e.alpha - r.alpha);
  };
  EXPECT_NEAR(std::log2(gap(1e-2) / gap(5e-3)), 2.0, 0.2);
}

TEST(Dynamics, WrapAngle) {
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-15);
  EXPECT_NEAR(wrap_angle(0.3 + 4 * kPi), 0.3, 1e-14);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 1000; ++i) {
    const double w = wrap_angle(u(rng));
    EXPECT_GT(w, -kPi);
    EXPECT_LE(w, kPi);
  }
}

TEST(Dynamics, ActionBoundsClamp) {
  const ActionBounds b{300, 100};
  EXPECT_EQ(b.clamp({500, -200}), (Action{300, -100}));
  EXPECT_TRUE(b.contains({300, -100}));
  EXPECT_FALSE(b.contains({300.1, 0}));
}

}  // namespace
}  // namespace predrl
