#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "predrl/agents.hpp"
#include "predrl/simulator.hpp"

namespace predrl {

struct SweepGrid {
  std::string name;  // sampling | step | horizon | custom
  std::vector<AgentKind> agents{AgentKind::Mpc, AgentKind::Rql, AgentKind::Sql};
  std::vector<double> deltas{0.1};
  std::vector<int> steps{1};
  std::vector<int> horizons{3};
  int runs{30};
  std::uint64_t master_seed{0};

  void validate() const;
  std::size_t point_count() const { return deltas.size() * steps.size() * horizons.size(); }
};

/// Everything held fixed across a sweep: plant, agent template, episode template.
struct SweepBase {
  AgentConfig agent;
  EpisodeConfig episode;
  RobotParams plant;
};

struct SweepPoint {
  AgentKind agent{AgentKind::Mpc};
  double delta{0.1};
  int step_multiplier{1};
  int horizon{3};
};

struct RunRecord {
  int run_index{0};
  std::uint64_t seed{0};
  double accumulated_cost{0.0};
  bool parked{false};
  std::optional<double> first_park_time;
  bool diverged{false};
  double wall_clock{0.0};
};

struct SweepPointSummary {
  SweepPoint point;
  int runs{0};
  double mean_cost{0.0};
  double ci95{0.0};
  int park_count{0};
  int diverged_count{0};
  std::vector<RunRecord> per_run;
};

enum class CiMethod { Normal, StudentT };

struct CostSummary {
  double mean{0.0};
  double ci95{0.0};
};

/// Mean and 95% half-width; sample standard deviation over n - 1.
CostSummary summarize_costs(const std::vector<double>& costs, CiMethod method = CiMethod::Normal);

/// Aggregate runs regardless of the order they are given in.
SweepPointSummary aggregate(const SweepPoint& point, std::vector<RunRecord> runs,
                            CiMethod method = CiMethod::Normal);

/// Initial-condition seed for a run. Depends only on (master seed, run index)
/// so every agent and grid point faces the same start poses.
std::uint64_t run_seed(std::uint64_t master_seed, int run_index);

struct SweepOptions {
  int jobs{1};
  CiMethod ci{CiMethod::Normal};
};

/// Executes every (agent, delta, s, N) x run. Results are keyed by point and
/// run index, so worker count never changes the output.
std::vector<SweepPointSummary> run_sweep(const SweepGrid& grid, const SweepBase& base,
                                         const SweepOptions& opts = {});

/// Preset grids: varying delta, varying s, varying N.
std::vector<SweepGrid> default_grids();
SweepGrid preset_grid(std::string_view name);

void write_summary_csv(std::ostream& os, const std::vector<SweepPointSummary>& rows);
void write_runs_csv(std::ostream& os, const std::vector<SweepPointSummary>& rows);

inline constexpr std::string_view kSummaryHeader =
    "agent,delta,s,N,runs,mean_cost,ci95,park_count,diverged_count";
inline constexpr std::string_view kRunsHeader =
    "agent,delta,s,N,run,seed,accumulated_cost,parked,first_park_time,diverged";

/// Free-text observations: per-agent best delta/s/N and per-point ranking.
std::string sweep_report(const SweepGrid& grid, const std::vector<SweepPointSummary>& rows);

}  // namespace predrl
