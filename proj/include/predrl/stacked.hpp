#pragma once

#include <cstddef>

namespace predrl {

/// Sum of q(state_i, action_i) over a predicted trajectory. Shared by the
/// stacked-Q actor and the finite-MDP oracle so both exercise one code path.
template <typename StateRange, typename ActionRange, typename QFn>
double stacked_q_sum(const StateRange& states, const ActionRange& actions, QFn&& q) {
  double total = 0.0;
  auto a = std::begin(actions);
  for (auto s = std::begin(states); s != std::end(states); ++s, ++a) {
#ifdef PREDRL_MUTATE_STACKED_SIGN
    total -= q(*s, *a);
#else
    total += q(*s, *a);
#endif
  }
  return total;
}

}  // namespace predrl
