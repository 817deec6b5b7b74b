#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "predrl/oracle.hpp"

namespace predrl::verify {

struct CheckResult {
  std::string name;
  bool passed{false};
  std::string detail;
  double seconds{0.0};
};

struct IntegratorOrders {
  double euler{0.0};
  double rk4{0.0};
  int samples{0};
};

/// Median log2 error ratio between step h and h/2 over random states and
/// actions, against an RK4 reference at h/64.
IntegratorOrders measure_integrator_orders(std::uint64_t seed, int samples = 20);

struct CriticRecovery {
  double max_weight_error{0.0};
  double max_gradient_rel_error{0.0};
  int transitions{0};
};

/// Fits the critic on synthetic transitions consistent with a known interior
/// theta* and compares the analytic loss gradient with central differences.
CriticRecovery critic_recovery(std::uint64_t seed, int transitions = 40);

CheckResult check_stacking_campaign(const oracle::CampaignOptions& opts = {});
CheckResult check_integrator_orders(std::uint64_t seed = 7);
CheckResult check_critic_recovery(std::uint64_t seed = 11);

std::vector<CheckResult> run_all();

}  // namespace predrl::verify
