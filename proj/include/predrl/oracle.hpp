#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace predrl::oracle {

/// Deterministic finite MDP small enough for exhaustive sequence search.
struct FiniteMdp {
  int n_states{0};
  int n_actions{0};
  std::vector<std::vector<int>> next;     // next[x][u]
  std::vector<std::vector<double>> cost;  // cost[x][u] >= 0

  void validate() const;
  bool has_zero_cost_absorbing_state() const;
};

using QTable = std::vector<std::vector<double>>;

/// Optimal Q = cost + gamma * V(next). Value iteration to a fixed point for
/// gamma < 1; for gamma == 1 a zero-cost absorbing state must be reachable.
QTable exact_q(const FiniteMdp& mdp, double gamma);

/// max |Q - (cost + gamma min_u Q(next, u))|.
double bellman_residual(const FiniteMdp& mdp, const QTable& q, double gamma);

struct StackedMin {
  double value{0.0};
  std::vector<int> sequence;
};

/// Exhaustive minimum of sum_i Q(x_i, u_i) over all n_actions^N sequences.
StackedMin stacked_min(const FiniteMdp& mdp, const QTable& q, int x0, int horizon);
/// Same minimum by backward dynamic programming over the horizon.
double stacked_min_dp(const FiniteMdp& mdp, const QTable& q, int x0, int horizon);

/// Stacked sum along a given sequence.
double stacked_value(const FiniteMdp& mdp, const QTable& q, int x0, const std::vector<int>& seq);

/// Greedy trajectory u_i = argmin_u Q(x_i, u) (lowest index on ties).
std::vector<int> greedy_sequence(const FiniteMdp& mdp, const QTable& q, int x0, int horizon);

struct StackingCheck {
  bool holds{false};        // |stacked_min - greedy_sum| <= tol
  bool upper_bound{false};  // stacked_min <= greedy_sum + tol
  double stacked_min{0.0};
  double greedy_sum{0.0};
  std::vector<int> stacked_sequence;
  std::vector<int> greedy_sequence;
};

/// Compares the exhaustive stacked-Q minimum with the sum of per-step minima
/// along the greedy trajectory.
StackingCheck stacking_check(const FiniteMdp& mdp, const QTable& q, int x0, int horizon,
                        double tol = 1e-9);

struct CampaignOptions {
  int instances{500};
  int max_states{5};
  int max_actions{3};
  int max_horizon{4};
  double gamma{0.9};
  std::uint64_t seed{1};
  double tol{1e-9};
};

struct CampaignReport {
  int instances{0};
  int equality_failures{0};
  int bound_failures{0};
  int dp_mismatches{0};
  double max_gap{0.0};
  std::string first_counterexample;  // empty if none
};

FiniteMdp random_mdp(std::uint64_t seed, int max_states, int max_actions);

/// Randomized campaign over small deterministic MDPs.
CampaignReport run_stacking_campaign(const CampaignOptions& opts);

std::string describe(const FiniteMdp& mdp, const QTable& q, int x0, int horizon,
                     const StackingCheck& check);

}  // namespace predrl::oracle
