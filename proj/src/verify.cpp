#include "predrl/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "predrl/critic.hpp"
#include "predrl/dynamics.hpp"
#include "predrl/seeding.hpp"

namespace predrl::verify {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_interval(rng());
}

double state_distance(const RobotState& a, const RobotState& b) {
  const auto pa = a.as_array(), pb = b.as_array();
  double d = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) d = std::max(d, std::abs(pa[i] - pb[i]));
  return d;
}

template <typename Step>
RobotState march(Step step, double horizon, double h, RobotState s, const Action& u,
                 const RobotParams& p) {
  const int n = static_cast<int>(std::lround(horizon / h));
  for (int i = 0; i < n; ++i) s = step(h, s, u, p);
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <typename Fn>
CheckResult timed(const std::string& name, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r = fn();
  r.name = name;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

IntegratorOrders measure_integrator_orders(std::uint64_t seed, int samples) {
  std::mt19937_64 rng(seed);
  const RobotParams p;
  constexpr double horizon = 1.0;
  std::vector<double> euler_orders, rk4_orders;
  for (int k = 0; k < samples; ++k) {
    const RobotState s{uniform(rng, -5, 5), uniform(rng, -5, 5),
                       uniform(rng, -std::numbers::pi, std::numbers::pi), uniform(rng, -2, 2),
                       uniform(rng, -2, 2)};
    const Action u{uniform(rng, -30, 30), uniform(rng, -3, 3)};

    auto order_of = [&](auto step, double h) {
      const RobotState ref = march(rk4_step, horizon, h / 64.0, s, u, p);
      const double e1 = state_distance(march(step, horizon, h, s, u, p), ref);
      const double e2 = state_distance(march(step, horizon, h / 2.0, s, u, p), ref);
      return std::log2(e1 / e2);
    };
    euler_orders.push_back(order_of(euler_step, 0.01));
    rk4_orders.push_back(order_of(rk4_step, 0.1));
  }
  return {median(euler_orders), median(rk4_orders), samples};
}

CriticRecovery critic_recovery(std::uint64_t seed, int transitions) {
  std::mt19937_64 rng(seed);
  StackMatrix a;
  for (int i = 0; i < kStackDim; ++i)
    for (int j = 0; j < kStackDim; ++j) a(i, j) = uniform(rng, -1, 1);
  const WeightVector truth = pack_symmetric(a * a.transpose() / kStackDim +
                                            0.5 * StackMatrix::Identity());
  const WeightVector theta_minus = WeightVector::Zero();
  constexpr double gamma = 0.9;

  auto random_pair = [&] {
    RobotState s{uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -3, 3),
                 uniform(rng, -2, 2), uniform(rng, -2, 2)};
    Action u{uniform(rng, -2, 2), uniform(rng, -2, 2)};
    return std::pair{s, u};
  };

  ReplayBuffer buffer(static_cast<std::size_t>(transitions));
  for (int i = 0; i < transitions; ++i) {
    const auto [s0, u0] = random_pair();
    const auto [s1, u1] = random_pair();
    Transition t{s0, u0, s1, u1, 0.0};
    // Consistent with truth: e(truth) == 0 for this transition.
    t.prev_stage_cost = truth.dot(features(s0, u0)) - gamma * theta_minus.dot(features(s1, u1));
    buffer.push(t);
  }

  CriticRecovery out;
  out.transitions = transitions;
  const CriticUpdate upd = update_critic(buffer, theta_minus, gamma, WeightBounds::symmetric(1e3));
  out.max_weight_error = (upd.theta - truth).cwiseAbs().maxCoeff();

  WeightVector probe;
  for (int j = 0; j < kFeatureDim; ++j) probe(j) = uniform(rng, -1, 1);
  const WeightVector analytic = critic_loss_gradient(probe, buffer, theta_minus, gamma);
  for (int j = 0; j < kFeatureDim; ++j) {
    const double h = 1e-4 * std::max(1.0, std::abs(probe(j)));
    WeightVector up = probe, down = probe;
    up(j) += h;
    down(j) -= h;
    const double fd = (*critic_loss(up, buffer, theta_minus, gamma) -
                       *critic_loss(down, buffer, theta_minus, gamma)) /
                      (2.0 * h);
    const double rel = std::abs(fd - analytic(j)) / std::max(1.0, std::abs(analytic(j)));
    out.max_gradient_rel_error = std::max(out.max_gradient_rel_error, rel);
  }
  return out;
}

CheckResult check_stacking_campaign(const oracle::CampaignOptions& opts) {
  return timed("stacked-q-equality", [&] {
    const auto rep = oracle::run_stacking_campaign(opts);
    CheckResult r;
    r.passed = rep.equality_failures == 0 && rep.bound_failures == 0 && rep.dp_mismatches == 0;
    r.detail = fmt::format(
        "{} instances: equality failures {}, bound (min <= greedy sum) failures {}, "
        "DP/enumeration mismatches {}, max gap {:.6g}",
        rep.instances, rep.equality_failures, rep.bound_failures, rep.dp_mismatches, rep.max_gap);
    if (!rep.first_counterexample.empty()) r.detail += "\nfirst counterexample: " + rep.first_counterexample;
    return r;
  });
}

CheckResult check_integrator_orders(std::uint64_t seed) {
  return timed("integrator-orders", [&] {
    const auto o = measure_integrator_orders(seed);
    CheckResult r;
    r.passed = std::abs(o.euler - 1.0) <= 0.2 && std::abs(o.rk4 - 4.0) <= 0.5;
    r.detail = fmt::format("euler order {:.3f} (1.0 +/- 0.2), rk4 order {:.3f} (4.0 +/- 0.5)",
                           o.euler, o.rk4);
    return r;
  });
}

CheckResult check_critic_recovery(std::uint64_t seed) {
  return timed("critic-recovery", [&] {
    const auto c = critic_recovery(seed);
    CheckResult r;
    r.passed = c.max_weight_error < 1e-6 && c.max_gradient_rel_error < 1e-6;
    r.detail = fmt::format(
        "{} transitions: max |theta - theta*| = {:.3g} (< 1e-6), gradient rel. error {:.3g} (< 1e-6)",
        c.transitions, c.max_weight_error, c.max_gradient_rel_error);
    return r;
  });
}

std::vector<CheckResult> run_all() {
  return {check_stacking_campaign(), check_integrator_orders(), check_critic_recovery()};
}

}  // namespace predrl::verify
