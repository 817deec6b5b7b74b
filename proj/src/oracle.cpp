#include "predrl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "predrl/seeding.hpp"
#include "predrl/stacked.hpp"

namespace predrl::oracle {

void FiniteMdp::validate() const {
  if (n_states < 1 || n_actions < 1) throw std::invalid_argument("MDP needs states and actions");
  if (static_cast<int>(next.size()) != n_states || static_cast<int>(cost.size()) != n_states) {
    throw std::invalid_argument("MDP tables do not match n_states");
  }
  for (int x = 0; x < n_states; ++x) {
    if (static_cast<int>(next[x].size()) != n_actions ||
        static_cast<int>(cost[x].size()) != n_actions) {
      throw std::invalid_argument("MDP tables do not match n_actions");
    }
    for (int u = 0; u < n_actions; ++u) {
      if (next[x][u] < 0 || next[x][u] >= n_states) {
        throw std::invalid_argument("MDP transition target out of range");
      }
      if (!(cost[x][u] >= 0.0) || !std::isfinite(cost[x][u])) {
        throw std::invalid_argument("MDP costs must be finite and non-negative");
      }
    }
  }
}

bool FiniteMdp::has_zero_cost_absorbing_state() const {
  for (int x = 0; x < n_states; ++x)
    for (int u = 0; u < n_actions; ++u)
      if (next[x][u] == x && cost[x][u] == 0.0) return true;
  return false;
}

namespace {

std::vector<double> values_of(const QTable& q) {
  std::vector<double> v(q.size());
  for (std::size_t x = 0; x < q.size(); ++x) v[x] = *std::min_element(q[x].begin(), q[x].end());
  return v;
}

QTable backup(const FiniteMdp& mdp, const std::vector<double>& v, double gamma) {
  QTable q(static_cast<std::size_t>(mdp.n_states), std::vector<double>(static_cast<std::size_t>(mdp.n_actions)));
  for (int x = 0; x < mdp.n_states; ++x)
    for (int u = 0; u < mdp.n_actions; ++u) q[x][u] = mdp.cost[x][u] + gamma * v[mdp.next[x][u]];
  return q;
}

int argmin(const std::vector<double>& row) {
  return static_cast<int>(std::min_element(row.begin(), row.end()) - row.begin());
}

}  // namespace

QTable exact_q(const FiniteMdp& mdp, double gamma) {
  mdp.validate();
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  std::vector<double> v(static_cast<std::size_t>(mdp.n_states), 0.0);

  if (gamma == 1.0) {
    if (!mdp.has_zero_cost_absorbing_state()) {
      throw std::domain_error("undiscounted Q diverges without a zero-cost absorbing state");
    }
    // Non-negative costs: shortest paths settle within n_states sweeps.
    for (int it = 0; it <= mdp.n_states; ++it) v = values_of(backup(mdp, v, 1.0));
    const auto again = values_of(backup(mdp, v, 1.0));
    for (std::size_t x = 0; x < v.size(); ++x) {
      if (again[x] != v[x]) {
        throw std::domain_error("undiscounted Q diverges: a state cannot reach a zero-cost cycle");
      }
    }
    return backup(mdp, v, 1.0);
  }

  for (int it = 0; it < 1'000'000; ++it) {
    const auto nv = values_of(backup(mdp, v, gamma));
    double change = 0.0;
    for (std::size_t x = 0; x < v.size(); ++x) change = std::max(change, std::abs(nv[x] - v[x]));
    v = nv;
    if (change <= 1e-15 * (1.0 + *std::max_element(v.begin(), v.end()))) break;
  }
  return backup(mdp, v, gamma);
}

double bellman_residual(const FiniteMdp& mdp, const QTable& q, double gamma) {
  const auto target = backup(mdp, values_of(q), gamma);
  double r = 0.0;
  for (int x = 0; x < mdp.n_states; ++x)
    for (int u = 0; u < mdp.n_actions; ++u) r = std::max(r, std::abs(q[x][u] - target[x][u]));
  return r;
}

double stacked_value(const FiniteMdp& mdp, const QTable& q, int x0, const std::vector<int>& seq) {
  std::vector<int> states;
  states.reserve(seq.size());
  int x = x0;
  for (int u : seq) {
    states.push_back(x);
    x = mdp.next[x][u];
  }
  return stacked_q_sum(states, seq, [&](int s, int u) { return q[s][u]; });
}

StackedMin stacked_min(const FiniteMdp& mdp, const QTable& q, int x0, int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  StackedMin best{std::numeric_limits<double>::infinity(), {}};
  std::vector<int> seq(static_cast<std::size_t>(horizon), 0);
  while (true) {
    const double v = stacked_value(mdp, q, x0, seq);
    if (v < best.value) best = {v, seq};
    // Odometer increment over n_actions^horizon sequences.
    int pos = horizon - 1;
    while (pos >= 0 && ++seq[static_cast<std::size_t>(pos)] == mdp.n_actions) {
      seq[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return best;
}

double stacked_min_dp(const FiniteMdp& mdp, const QTable& q, int x0, int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  // togo[x] = min over the remaining slots of the stacked sum starting at x.
  std::vector<double> togo(static_cast<std::size_t>(mdp.n_states), 0.0);
  for (int slot = 0; slot < horizon; ++slot) {
    std::vector<double> prev(togo.size());
    for (int x = 0; x < mdp.n_states; ++x) {
      double m = std::numeric_limits<double>::infinity();
      for (int u = 0; u < mdp.n_actions; ++u) m = std::min(m, q[x][u] + togo[mdp.next[x][u]]);
      prev[x] = m;
    }
    togo = std::move(prev);
  }
  return togo[x0];
}

std::vector<int> greedy_sequence(const FiniteMdp& mdp, const QTable& q, int x0, int horizon) {
  std::vector<int> seq;
  int x = x0;
  for (int i = 0; i < horizon; ++i) {
    const int u = argmin(q[x]);
    seq.push_back(u);
    x = mdp.next[x][u];
  }
  return seq;
}

StackingCheck stacking_check(const FiniteMdp& mdp, const QTable& q, int x0, int horizon, double tol) {
  StackingCheck c;
  const StackedMin sm = stacked_min(mdp, q, x0, horizon);
  c.stacked_min = sm.value;
  c.stacked_sequence = sm.sequence;
  c.greedy_sequence = greedy_sequence(mdp, q, x0, horizon);
  // Each greedy term is min_u Q(x_i, u) = V(x_i).
  int x = x0;
  for (int u : c.greedy_sequence) {
    c.greedy_sum += *std::min_element(q[x].begin(), q[x].end());
    x = mdp.next[x][u];
  }
  c.holds = std::abs(c.stacked_min - c.greedy_sum) <= tol;
  c.upper_bound = c.stacked_min <= c.greedy_sum + tol;
  return c;
}

FiniteMdp random_mdp(std::uint64_t seed, int max_states, int max_actions) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int n) { return static_cast<int>(unit_interval(rng()) * n); };
  FiniteMdp m;
  m.n_states = 1 + pick(max_states);
  m.n_actions = 1 + pick(max_actions);
  m.next.assign(static_cast<std::size_t>(m.n_states), std::vector<int>(static_cast<std::size_t>(m.n_actions)));
  m.cost.assign(static_cast<std::size_t>(m.n_states), std::vector<double>(static_cast<std::size_t>(m.n_actions)));
  for (int x = 0; x < m.n_states; ++x)
    for (int u = 0; u < m.n_actions; ++u) {
      m.next[x][u] = pick(m.n_states);
      m.cost[x][u] = unit_interval(rng());
    }
  return m;
}

std::string describe(const FiniteMdp& mdp, const QTable& q, int x0, int horizon,
                     const StackingCheck& check) {
  std::ostringstream os;
  os.precision(17);
  os << "states=" << mdp.n_states << " actions=" << mdp.n_actions << " x0=" << x0
     << " N=" << horizon << "\n";
  for (int x = 0; x < mdp.n_states; ++x) {
    os << "  x" << x << ":";
    for (int u = 0; u < mdp.n_actions; ++u) {
      os << " [u" << u << " -> x" << mdp.next[x][u] << " cost " << mdp.cost[x][u] << " Q "
         << q[x][u] << "]";
    }
    os << "\n";
  }
  auto seq_str = [](const std::vector<int>& s) {
    std::string r;
    for (int u : s) r += std::to_string(u);
    return r;
  };
  os << "  stacked min " << check.stacked_min << " via " << seq_str(check.stacked_sequence)
     << ", greedy sum " << check.greedy_sum << " via " << seq_str(check.greedy_sequence) << "\n";
  return os.str();
}

CampaignReport run_stacking_campaign(const CampaignOptions& opts) {
  CampaignReport rep;
  for (int i = 0; i < opts.instances; ++i) {
    const std::uint64_t s = derive_seed({opts.seed, static_cast<std::uint64_t>(i)});
    const FiniteMdp mdp = random_mdp(s, opts.max_states, opts.max_actions);
    std::mt19937_64 rng(splitmix64(s));
    const int horizon = 1 + static_cast<int>(unit_interval(rng()) * opts.max_horizon);
    const int x0 = static_cast<int>(unit_interval(rng()) * mdp.n_states);
    const QTable q = exact_q(mdp, opts.gamma);

    const StackingCheck c = stacking_check(mdp, q, x0, horizon, opts.tol);
    ++rep.instances;
    rep.max_gap = std::max(rep.max_gap, std::abs(c.greedy_sum - c.stacked_min));
    if (std::abs(stacked_min_dp(mdp, q, x0, horizon) - c.stacked_min) > opts.tol) {
      ++rep.dp_mismatches;
    }
    if (!c.upper_bound) ++rep.bound_failures;
    if (!c.holds) {
      ++rep.equality_failures;
      if (rep.first_counterexample.empty()) {
        rep.first_counterexample = "instance " + std::to_string(i) + ": " + describe(mdp, q, x0, horizon, c);
      }
    }
  }
  return rep;
}

}  // namespace predrl::oracle
