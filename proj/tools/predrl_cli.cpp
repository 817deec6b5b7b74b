// predrl: run parking sweeps, single episodes, plots and self-checks.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "predrl/config.hpp"
#include "predrl/experiments.hpp"
#include "predrl/simulator.hpp"
#include "predrl/svg_plot.hpp"
#include "predrl/verify.hpp"

namespace fs = std::filesystem;
using namespace predrl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

std::string default_out_dir(const std::string& from_config) {
  if (const char* env = std::getenv("PREDRL_OUT"); env && *env) return env;
  return from_config;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::vector<AgentKind> parse_agent_list(const std::string& csv) {
  std::vector<AgentKind> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_agent_kind(item));
  }
  if (out.empty()) throw std::invalid_argument("--agents needs at least one agent");
  return out;
}

RunConfig load_or_default(const std::string& path) {
  return path.empty() ? default_run_config() : load_run_config(path);
}

int write_plots(const std::vector<plot::SummaryRow>& rows, const fs::path& dir) {
  for (const auto& f : plot::plot_summary(rows)) write_file(dir / f.filename, f.content);
  return kExitOk;
}

struct SweepArgs {
  std::string config, preset, agents, out;
  int runs{0}, jobs{0};
  double duration{-1.0};
  std::int64_t seed{-1};
};

int cmd_sweep(const SweepArgs& a) {
  RunConfig cfg = load_or_default(a.config);
  if (!a.preset.empty()) cfg.apply_preset(a.preset);
  if (!a.agents.empty()) cfg.grid.agents = parse_agent_list(a.agents);
  if (a.runs > 0) cfg.grid.runs = a.runs;
  if (a.duration >= 0.0) cfg.base.episode.duration = a.duration;
  if (a.seed >= 0) cfg.grid.master_seed = static_cast<std::uint64_t>(a.seed);
  if (a.jobs > 0) cfg.jobs = a.jobs;
  cfg.validate();

  const fs::path dir = a.out.empty() ? default_out_dir(cfg.output_dir) : a.out;
  fs::create_directories(dir);

  std::cerr << fmt::format("sweep '{}': {} agents x {} points x {} runs, {} s episodes\n",
                           cfg.grid.name, cfg.grid.agents.size(), cfg.grid.point_count(),
                           cfg.grid.runs, cfg.base.episode.duration);
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = run_sweep(cfg.grid, cfg.base, {cfg.jobs, cfg.ci});
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ostringstream summary, runs;
  write_summary_csv(summary, rows);
  write_runs_csv(runs, rows);
  write_file(dir / "summary.csv", summary.str());
  write_file(dir / "runs.csv", runs.str());

  std::istringstream back(summary.str());
  write_plots(plot::read_summary_csv(back), dir);

  std::string report = sweep_report(cfg.grid, rows);
  report += "\n## Wall-clock\n\n";
  report += fmt::format("Total {:.2f} s.\n", elapsed);
  for (const auto& r : rows) {
    double wall = 0.0;
    for (const auto& run : r.per_run) wall += run.wall_clock;
    report += fmt::format("- {} delta={} s={} N={}: {:.3f} s per episode\n", to_string(r.point.agent),
                          r.point.delta, r.point.step_multiplier, r.point.horizon,
                          wall / std::max(1, r.runs));
  }
  write_file(dir / "report.md", report);

  int diverged = 0, total = 0;
  for (const auto& r : rows) {
    diverged += r.diverged_count;
    total += r.runs;
    std::cout << fmt::format("{:<4} delta={:<5} s={} N={}  mean_cost={:.4g} ci95={:.3g} parked={}/{}\n",
                             to_string(r.point.agent), r.point.delta, r.point.step_multiplier,
                             r.point.horizon, r.mean_cost, r.ci95, r.park_count, r.runs);
  }
  std::cout << "wrote " << (dir / "summary.csv").string() << "\n";
  if (total > 0 && static_cast<double>(diverged) / total > cfg.max_diverged_fraction) {
    std::cerr << fmt::format("error: {} of {} episodes diverged (limit {:.0f}%)\n", diverged,
                             total, 100.0 * cfg.max_diverged_fraction);
    return kExitDiverged;
  }
  return kExitOk;
}

struct EpisodeArgs {
  std::string config, agent{"MPC"}, out;
  double delta{-1.0}, duration{-1.0};
  int s{0}, n{0};
  std::int64_t seed{0};
};

int cmd_episode(const EpisodeArgs& a) {
  RunConfig cfg = load_or_default(a.config);
  AgentConfig ac = cfg.base.agent;
  ac.kind = parse_agent_kind(a.agent);
  if (a.delta > 0.0) ac.horizon.delta = a.delta;
  if (a.s > 0) ac.horizon.step_multiplier = a.s;
  if (a.n > 0) ac.horizon.horizon = a.n;
  EpisodeConfig ec = cfg.base.episode;
  ec.delta = ac.horizon.delta;
  if (a.duration >= 0.0) ec.duration = a.duration;
  ec.seed = run_seed(static_cast<std::uint64_t>(a.seed), 0);
  ec.validate();

  const fs::path dir = a.out.empty() ? default_out_dir(cfg.output_dir) : a.out;
  fs::create_directories(dir);

  Agent agent(ac);
  const EpisodeResult r = run_episode(agent, ec, cfg.base.plant, ac.cost);
  std::ostringstream csv;
  write_trajectory_csv(csv, r.trajectory);
  const fs::path file = dir / fmt::format("trajectory_{}_d{}_s{}_N{}_seed{}.csv", to_string(ac.kind),
                                          ac.horizon.delta, ac.horizon.step_multiplier,
                                          ac.horizon.horizon, a.seed);
  write_file(file, csv.str());

  std::cout << fmt::format("accumulated_cost={}\n", r.accumulated_cost);
  std::cout << fmt::format("parked={}\n", r.parked ? 1 : 0);
  std::cout << "first_park_time=" << (r.first_park_time ? fmt::format("{}", *r.first_park_time) : "none") << "\n";
  std::cout << fmt::format("diverged={}\n", r.diverged ? 1 : 0);
  std::cout << fmt::format("wall_clock={:.3f}\n", r.wall_clock);
  std::cout << "trajectory=" << file.string() << "\n";
  return r.diverged ? kExitDiverged : kExitOk;
}

int cmd_plot(const std::string& csv_path, const std::string& out) {
  std::ifstream in(csv_path);
  if (!in) {
    std::cerr << "error: cannot open " << csv_path << "\n";
    return kExitFailure;
  }
  std::vector<plot::SummaryRow> rows;
  try {
    rows = plot::read_summary_csv(in);
  } catch (const plot::CsvError& e) {
    std::cerr << "error: " << csv_path << ": " << e.what() << "\n";
    return kExitFailure;
  }
  const fs::path dir = out.empty() ? default_out_dir(fs::path(csv_path).parent_path().string()) : out;
  fs::create_directories(dir.empty() ? fs::path(".") : dir);
  return write_plots(rows, dir.empty() ? fs::path(".") : dir);
}

int cmd_verify() {
  bool ok = true;
  for (const auto& c : verify::run_all()) {
    std::cout << fmt::format("[{}] {} ({:.3f} s)\n      {}\n", c.passed ? "PASS" : "FAIL", c.name,
                             c.seconds, c.detail);
    ok = ok && c.passed;
  }
  std::cout << (ok ? "all checks passed\n" : "some checks FAILED\n");
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predictive agents (MPC, roll-out QL, stacked QL) parking a mobile robot"};
  app.require_subcommand(1);

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Run a hyper-parameter sweep and write CSV/SVG/report");
  sweep->add_option("--config", sw.config, "YAML config file");
  sweep->add_option("--preset", sw.preset, "Swept variable")
      ->check(CLI::IsMember({"sampling", "step", "horizon", "custom"}));
  sweep->add_option("--agents", sw.agents, "Comma-separated subset of MPC,RQL,SQL");
  sweep->add_option("--runs", sw.runs, "Runs per grid point")->check(CLI::Range(2, 1'000'000));
  sweep->add_option("--duration", sw.duration, "Episode length [s]")->check(CLI::NonNegativeNumber);
  sweep->add_option("--seed", sw.seed, "Master seed")->check(CLI::NonNegativeNumber);
  sweep->add_option("--out", sw.out, "Output directory (default: $PREDRL_OUT or config)");
  sweep->add_option("--jobs", sw.jobs, "Worker threads")->check(CLI::PositiveNumber);

  EpisodeArgs ep;
  auto* episode = app.add_subcommand("episode", "Run one episode and write its trajectory CSV");
  episode->add_option("--config", ep.config, "YAML config file");
  episode->add_option("--agent", ep.agent, "MPC, RQL or SQL");
  episode->add_option("--delta", ep.delta, "Sampling time [s]")->check(CLI::PositiveNumber);
  episode->add_option("--s", ep.s, "Prediction step multiplier")->check(CLI::PositiveNumber);
  episode->add_option("--N", ep.n, "Prediction horizon")->check(CLI::PositiveNumber);
  episode->add_option("--seed", ep.seed, "Seed")->check(CLI::NonNegativeNumber);
  episode->add_option("--duration", ep.duration, "Episode length [s]")->check(CLI::NonNegativeNumber);
  episode->add_option("--out", ep.out, "Output directory");

  std::string plot_csv, plot_out;
  auto* plot_cmd = app.add_subcommand("plot", "Render SVG charts from a summary CSV");
  plot_cmd->add_option("summary", plot_csv, "summary.csv")->required();
  plot_cmd->add_option("--out", plot_out, "Output directory (default: next to the CSV)");

  auto* verify_cmd = app.add_subcommand("verify", "Run the oracle and numerical self-checks");
  auto* defaults = app.add_subcommand("print-config", "Print the default configuration as YAML");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sweep) return cmd_sweep(sw);
    if (*episode) return cmd_episode(ep);
    if (*plot_cmd) return cmd_plot(plot_csv, plot_out);
    if (*verify_cmd) return cmd_verify();
    if (*defaults) {
      std::cout << default_config_yaml();
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
