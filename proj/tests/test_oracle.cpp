#include <gtest/gtest.h>

#include "predrl/oracle.hpp"

namespace predrl::oracle {
namespace {

// x0 -a(0)-> A -(5)-> T(absorbing), x0 -b(5.1)-> B(absorbing). Every state has
// two actions; in A, B and T both actions do the same thing.
FiniteMdp greedy_trap() {
  FiniteMdp m;
  m.n_states = 4;
  m.n_actions = 2;
  m.next = {{1, 2}, {3, 3}, {2, 2}, {3, 3}};
  m.cost = {{0.0, 5.1}, {5.0, 5.0}, {0.0, 0.0}, {0.0, 0.0}};
  return m;
}

TEST(ExactQ, TwoStateChain) {
  FiniteMdp m{2, 1, {{1}, {1}}, {{1.0}, {0.0}}};
  const auto q = exact_q(m, 1.0);
  EXPECT_DOUBLE_EQ(q[0][0], 1.0);
  EXPECT_DOUBLE_EQ(q[1][0], 0.0);
  EXPECT_LT(bellman_residual(m, q, 1.0), 1e-12);
}

TEST(ExactQ, DiscountedSelfLoop) {
  FiniteMdp m{1, 1, {{0}}, {{1.0}}};
  const auto q = exact_q(m, 0.5);
  EXPECT_NEAR(q[0][0], 2.0, 1e-10);
}

TEST(ExactQ, RefusesUndiscountedWithoutAbsorbingState) {
  FiniteMdp m{1, 1, {{0}}, {{1.0}}};
  EXPECT_FALSE(m.has_zero_cost_absorbing_state());
  EXPECT_THROW(exact_q(m, 1.0), std::domain_error);
}

TEST(ExactQ, ValidationCatchesBadTables) {
  FiniteMdp m{2, 1, {{5}, {0}}, {{1.0}, {0.0}}};
  EXPECT_THROW(m.validate(), std::invalid_argument);
  FiniteMdp neg{1, 1, {{0}}, {{-1.0}}};
  EXPECT_THROW(neg.validate(), std::invalid_argument);
}

TEST(ExactQ, RandomInstancesSatisfyBellman) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto m = random_mdp(s, 5, 3);
    const auto q = exact_q(m, 0.9);
    EXPECT_LT(bellman_residual(m, q, 0.9), 1e-8);
  }
}

TEST(StackedQ, HorizonOneMatchesGreedy) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto m = random_mdp(s, 5, 3);
    const auto q = exact_q(m, 0.9);
    const auto c = stacking_check(m, q, 0, 1);
    EXPECT_TRUE(c.holds);
    EXPECT_NEAR(c.stacked_min, c.greedy_sum, 1e-12);
  }
}

TEST(StackedQ, DynamicProgrammingAgreesWithEnumeration) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto m = random_mdp(s, 5, 3);
    const auto q = exact_q(m, 0.9);
    for (int n = 1; n <= 4; ++n) {
      const auto brute = stacked_min(m, q, 0, n);
      EXPECT_NEAR(brute.value, stacked_min_dp(m, q, 0, n), 1e-9);
      EXPECT_NEAR(brute.value, stacked_value(m, q, 0, brute.sequence), 1e-12);
    }
  }
}

TEST(StackedQ, MinimumNeverExceedsGreedySum) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    const auto m = random_mdp(s, 5, 3);
    for (const double gamma : {0.5, 0.9}) {
      const auto q = exact_q(m, gamma);
      for (int n = 1; n <= 4; ++n) EXPECT_TRUE(stacking_check(m, q, 0, n).upper_bound);
    }
  }
}

TEST(StackedQ, GreedyTrajectoryCanLoseToStackedMinimum) {
  const auto m = greedy_trap();
  const auto q = exact_q(m, 1.0);
  EXPECT_DOUBLE_EQ(q[0][0], 5.0);
  EXPECT_DOUBLE_EQ(q[0][1], 5.1);
  const auto c = stacking_check(m, q, 0, 2);
  EXPECT_DOUBLE_EQ(c.greedy_sum, 10.0);
  EXPECT_DOUBLE_EQ(c.stacked_min, 5.1);
  EXPECT_FALSE(c.holds);
  EXPECT_TRUE(c.upper_bound);
  EXPECT_EQ(c.greedy_sequence, (std::vector<int>{0, 0}));
  EXPECT_EQ(c.stacked_sequence[0], 1);
  EXPECT_FALSE(describe(m, q, 0, 2, c).empty());
}

TEST(Campaign, ReportsAndIsReproducible) {
  CampaignOptions opts;
  opts.instances = 100;
  const auto a = run_stacking_campaign(opts);
  const auto b = run_stacking_campaign(opts);
  EXPECT_EQ(a.instances, 100);
  EXPECT_EQ(a.bound_failures, 0);
  EXPECT_EQ(a.dp_mismatches, 0);
  EXPECT_EQ(a.equality_failures, b.equality_failures);
  EXPECT_EQ(a.first_counterexample, b.first_counterexample);
  EXPECT_EQ(a.equality_failures > 0, !a.first_counterexample.empty());
}

}  // namespace
}  // namespace predrl::oracle
