#include "predrl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "predrl/seeding.hpp"

namespace predrl {

void SweepGrid::validate() const {
  if (agents.empty() || deltas.empty() || steps.empty() || horizons.empty()) {
    throw std::invalid_argument("sweep grid must be non-empty on every axis");
  }
  if (runs < 2) throw std::invalid_argument("sweep needs at least 2 runs per point");
  for (double d : deltas)
    if (!(d > 0.0)) throw std::invalid_argument("sweep deltas must be > 0");
  for (int s : steps)
    if (s < 1) throw std::invalid_argument("sweep step multipliers must be >= 1");
  for (int n : horizons)
    if (n < 1) throw std::invalid_argument("sweep horizons must be >= 1");
}

CostSummary summarize_costs(const std::vector<double>& costs, CiMethod method) {
  CostSummary out;
  const auto n = costs.size();
  if (n == 0) return out;
  out.mean = std::accumulate(costs.begin(), costs.end(), 0.0) / static_cast<double>(n);
  if (n < 2) return out;
  double ss = 0.0;
  for (double c : costs) ss += (c - out.mean) * (c - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  double z = 1.96;
  if (method == CiMethod::StudentT) {
    const boost::math::students_t dist(static_cast<double>(n - 1));
    z = boost::math::quantile(dist, 0.975);
  }
  out.ci95 = z * sd / std::sqrt(static_cast<double>(n));
  return out;
}

SweepPointSummary aggregate(const SweepPoint& point, std::vector<RunRecord> runs,
                            CiMethod method) {
  std::sort(runs.begin(), runs.end(),
            [](const RunRecord& a, const RunRecord& b) { return a.run_index < b.run_index; });
  SweepPointSummary s;
  s.point = point;
  s.runs = static_cast<int>(runs.size());
  std::vector<double> costs;
  costs.reserve(runs.size());
  for (const auto& r : runs) {
    costs.push_back(r.accumulated_cost);
    s.park_count += r.parked ? 1 : 0;
    s.diverged_count += r.diverged ? 1 : 0;
  }
  const CostSummary cs = summarize_costs(costs, method);
  s.mean_cost = cs.mean;
  s.ci95 = cs.ci95;
  s.per_run = std::move(runs);
  return s;
}

std::uint64_t run_seed(std::uint64_t master_seed, int run_index) {
  return derive_seed({master_seed, static_cast<std::uint64_t>(run_index)});
}

std::vector<SweepPointSummary> run_sweep(const SweepGrid& grid, const SweepBase& base,
                                         const SweepOptions& opts) {
  grid.validate();
  std::vector<SweepPoint> points;
  for (AgentKind a : grid.agents)
    for (double d : grid.deltas)
      for (int s : grid.steps)
        for (int n : grid.horizons) points.push_back({a, d, s, n});

  struct Task {
    std::size_t point;
    int run;
  };
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < points.size(); ++p)
    for (int r = 0; r < grid.runs; ++r) tasks.push_back({p, r});

  std::vector<RunRecord> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        const SweepPoint& pt = points[tasks[i].point];
        AgentConfig ac = base.agent;
        ac.kind = pt.agent;
        ac.horizon.delta = pt.delta;
        ac.horizon.step_multiplier = pt.step_multiplier;
        ac.horizon.horizon = pt.horizon;
        EpisodeConfig ec = base.episode;
        ec.delta = pt.delta;
        ec.seed = run_seed(grid.master_seed, tasks[i].run);
        ec.record_trajectory = false;

        Agent agent(ac);
        const EpisodeResult er = run_episode(agent, ec, base.plant, ac.cost);
        results[i] = {tasks[i].run, ec.seed,    er.accumulated_cost, er.parked,
                      er.first_park_time, er.diverged, er.wall_clock};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks.size();
        return;
      }
    }
  };

  const int jobs = std::max(1, opts.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<SweepPointSummary> out;
  out.reserve(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    std::vector<RunRecord> runs;
    for (std::size_t i = 0; i < tasks.size(); ++i)
      if (tasks[i].point == p) runs.push_back(results[i]);
    out.push_back(aggregate(points[p], std::move(runs), opts.ci));
  }
  return out;
}

SweepGrid preset_grid(std::string_view name) {
  SweepGrid g;
  g.name = std::string(name);
  if (name == "sampling") {
    g.deltas = {0.02, 0.05, 0.1, 0.2, 0.3, 0.5};
  } else if (name == "step") {
    g.steps = {1, 2, 3, 4, 5};
  } else if (name == "horizon") {
    g.horizons = {2, 3, 4, 5};
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) +
                                "' (expected sampling, step or horizon)");
  }
  return g;
}

std::vector<SweepGrid> default_grids() {
  return {preset_grid("sampling"), preset_grid("step"), preset_grid("horizon")};
}

void write_summary_csv(std::ostream& os, const std::vector<SweepPointSummary>& rows) {
  os << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    os << fmt::format("{},{},{},{},{},{},{},{},{}\n", to_string(r.point.agent), r.point.delta,
                      r.point.step_multiplier, r.point.horizon, r.runs, r.mean_cost, r.ci95,
                      r.park_count, r.diverged_count);
  }
}

void write_runs_csv(std::ostream& os, const std::vector<SweepPointSummary>& rows) {
  os << kRunsHeader << '\n';
  for (const auto& r : rows) {
    for (const auto& run : r.per_run) {
      os << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", to_string(r.point.agent),
                        r.point.delta, r.point.step_multiplier, r.point.horizon, run.run_index,
                        run.seed, run.accumulated_cost, run.parked ? 1 : 0,
                        run.first_park_time ? fmt::format("{}", *run.first_park_time) : "",
                        run.diverged ? 1 : 0);
    }
  }
}

namespace {

double swept_value(const SweepGrid& grid, const SweepPoint& p) {
  if (grid.deltas.size() > 1) return p.delta;
  if (grid.steps.size() > 1) return p.step_multiplier;
  return p.horizon;
}

std::string_view swept_name(const SweepGrid& grid) {
  if (grid.deltas.size() > 1) return "delta";
  if (grid.steps.size() > 1) return "s";
  return "N";
}

}  // namespace

std::string sweep_report(const SweepGrid& grid, const std::vector<SweepPointSummary>& rows) {
  std::ostringstream os;
  const auto var = swept_name(grid);
  os << fmt::format("# Sweep report: {}\n\n", grid.name.empty() ? "custom" : grid.name);
  os << fmt::format("{} runs per point, master seed {}, swept variable {}.\n\n", grid.runs,
                    grid.master_seed, var);

  os << "## Best setting per agent (lowest mean accumulated cost)\n\n";
  for (AgentKind a : grid.agents) {
    const SweepPointSummary* best = nullptr;
    for (const auto& r : rows)
      if (r.point.agent == a && (!best || r.mean_cost < best->mean_cost)) best = &r;
    if (!best) continue;
    const double v = swept_value(grid, best->point);
    std::string where = "an endpoint of the grid";
    std::vector<double> values;
    for (const auto& r : rows)
      if (r.point.agent == a) values.push_back(swept_value(grid, r.point));
    if (values.size() > 2 && v != *std::min_element(values.begin(), values.end()) &&
        v != *std::max_element(values.begin(), values.end())) {
      where = "an interior grid value (a sweet spot)";
    }
    os << fmt::format("- {}: {} = {} with mean cost {:.6g} +/- {:.3g}, parked {}/{}; {}.\n",
                      to_string(a), var, v, best->mean_cost, best->ci95, best->park_count,
                      best->runs, where);
  }

  os << "\n## Agent ranking per grid point (best first)\n\n";
  std::map<double, std::vector<const SweepPointSummary*>> by_value;
  for (const auto& r : rows) by_value[swept_value(grid, r.point)].push_back(&r);
  for (auto& [v, group] : by_value) {
    std::stable_sort(group.begin(), group.end(), [](auto* a, auto* b) {
      return a->mean_cost < b->mean_cost;
    });
    os << fmt::format("- {} = {}:", var, v);
    for (auto* r : group) {
      os << fmt::format(" {} ({:.6g}, parked {}/{})", to_string(r->point.agent), r->mean_cost,
                        r->park_count, r->runs);
    }
    os << '\n';
  }

  int diverged = 0;
  for (const auto& r : rows) diverged += r.diverged_count;
  os << fmt::format("\nDiverged episodes: {}.\n", diverged);
  return os.str();
}

}  // namespace predrl
