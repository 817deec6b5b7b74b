#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "predrl/agents.hpp"
#include "predrl/dynamics.hpp"

namespace predrl {

enum class SuccessMode {
  Latched,  // parked once the region is entered at any sampling instant
  Final,    // parked only if the last sampled state is inside the region
};

struct EpisodeConfig {
  double duration{600.0};  // s
  double delta{0.1};       // s
  int substeps{10};        // RK4 steps per sampling interval
  double success_radius{0.5};
  double success_angle{0.0872664625997164788};  // 5 deg
  double target_alpha{0.0};
  double start_radius{5.0};
  std::uint64_t seed{0};
  SuccessMode success_mode{SuccessMode::Latched};
  bool record_trajectory{true};

  /// Number of sampling instants; throws unless duration / delta is integral.
  long steps() const;
  void validate() const;
};

struct TrajectorySample {
  double t;
  RobotState state;
  Action action;
  double stage_cost;
};

struct EpisodeResult {
  double accumulated_cost{0.0};
  bool parked{false};
  std::optional<double> first_park_time;
  bool diverged{false};
  std::vector<TrajectorySample> trajectory;
  double wall_clock{0.0};  // s, not part of any deterministic output
};

/// Point on the start circle facing radially outward, at rest.
RobotState sample_initial_condition(std::uint64_t seed, double radius = 5.0);
RobotState initial_condition_at(double bearing, double radius = 5.0);

/// Inside the success disc with heading within tolerance of the target.
bool in_parking_region(const RobotState& s, const EpisodeConfig& cfg);

/// Sample-and-hold closed loop: the agent acts at every k*delta and the plant
/// integrates with RK4 at delta/substeps while the action is held.
EpisodeResult run_episode(Agent& agent, const EpisodeConfig& cfg, const RobotParams& plant,
                          const StageCostConfig& cost,
                          std::optional<RobotState> initial = std::nullopt);

/// t,x,y,alpha,v,omega,F,M,stage_cost
void write_trajectory_csv(std::ostream& os, const std::vector<TrajectorySample>& traj);

}  // namespace predrl
