#include "predrl/simulator.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "predrl/seeding.hpp"

namespace predrl {

long EpisodeConfig::steps() const {
  const double ratio = duration / delta;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument(
        fmt::format("duration {} is not an integer multiple of delta {}", duration, delta));
  }
  return static_cast<long>(rounded);
}

void EpisodeConfig::validate() const {
  if (!(delta > 0.0)) throw std::invalid_argument("episode delta must be > 0");
  if (!(duration >= 0.0)) throw std::invalid_argument("episode duration must be >= 0");
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  if (!(success_radius > 0.0) || !(success_angle > 0.0) || !(start_radius > 0.0)) {
    throw std::invalid_argument("episode tolerances and start radius must be > 0");
  }
  (void)steps();
}

RobotState initial_condition_at(double bearing, double radius) {
  return {radius * std::cos(bearing), radius * std::sin(bearing), bearing, 0.0, 0.0};
}

RobotState sample_initial_condition(std::uint64_t seed, double radius) {
  std::mt19937_64 rng(seed);
  const double bearing = 2.0 * std::numbers::pi * unit_interval(rng());
  return initial_condition_at(bearing, radius);
}

bool in_parking_region(const RobotState& s, const EpisodeConfig& cfg) {
  return std::hypot(s.x, s.y) <= cfg.success_radius &&
         std::abs(wrap_angle(s.alpha - cfg.target_alpha)) <= cfg.success_angle;
}

EpisodeResult run_episode(Agent& agent, const EpisodeConfig& cfg, const RobotParams& plant,
                          const StageCostConfig& cost, std::optional<RobotState> initial) {
  cfg.validate();
  if (std::abs(agent.config().horizon.delta - cfg.delta) > 1e-12) {
    throw std::invalid_argument("agent and plant disagree on the sampling time");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const long steps = cfg.steps();

  EpisodeResult out;
  if (cfg.record_trajectory) out.trajectory.reserve(static_cast<std::size_t>(steps));
  RobotState x = initial ? *initial : sample_initial_condition(cfg.seed, cfg.start_radius);
  agent.reset();

  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * cfg.delta;
    if (in_parking_region(x, cfg) && !out.first_park_time) out.first_park_time = t;

    Action u;
    try {
      u = agent.step(x);
    } catch (const DomainError&) {
      out.diverged = true;
      break;
    }
    const double rho = stage_cost(x, u, cost);
    out.accumulated_cost += rho * cfg.delta;
    if (cfg.record_trajectory) out.trajectory.push_back({t, x, u, rho});

    RobotState next;
    try {
      next = integrate_rk4(cfg.delta, cfg.substeps, x, u, plant);
    } catch (const DomainError&) {
      out.diverged = true;
      break;
    }
    if (!next.finite()) {
      out.diverged = true;
      break;
    }
    x = next;
  }

  if (out.diverged) {
    out.parked = false;
  } else if (cfg.success_mode == SuccessMode::Latched) {
    out.parked = out.first_park_time.has_value();
  } else {
    out.parked = in_parking_region(x, cfg);
  }
  out.wall_clock =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectorySample>& traj) {
  os << "t,x,y,alpha,v,omega,F,M,stage_cost\n";
  for (const auto& r : traj) {
    os << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.t, r.state.x, r.state.y, r.state.alpha,
                      r.state.v, r.state.omega, r.action.force, r.action.torque, r.stage_cost);
  }
}

}  // namespace predrl
