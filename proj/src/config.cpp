#include "predrl/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace predrl {

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& key, const std::string& what) const {
    const auto mark = node.Mark();
    if (mark.line >= 0) {
      throw ConfigError(fmt::format("{}:{}: key '{}': {}", source_, mark.line + 1, key, what));
    }
    throw ConfigError(fmt::format("{}: key '{}': {}", source_, key, what));
  }

  void require_map(const YAML::Node& node, const std::string& key) const {
    if (!node.IsMap()) fail(node, key, "expected a mapping");
  }

  // Rejects keys outside `allowed`.
  void check_keys(const YAML::Node& node, const std::string& prefix,
                  const std::set<std::string>& allowed) const {
    for (const auto& kv : node) {
      const auto name = kv.first.as<std::string>();
      if (!allowed.count(name)) {
        fail(kv.first, prefix.empty() ? name : prefix + "." + name, "unknown key");
      }
    }
  }

  template <typename T>
  void read(const YAML::Node& parent, const std::string& prefix, const char* name, T& out) const {
    const YAML::Node node = parent[name];
    if (!node) return;
    const std::string key = prefix + "." + name;
    if (!node.IsScalar()) fail(node, key, "expected a scalar");
    try {
      out = node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, key, fmt::format("cannot convert '{}'", node.Scalar()));
    }
  }

  template <typename T>
  void read_list(const YAML::Node& parent, const std::string& prefix, const char* name,
                 std::vector<T>& out) const {
    const YAML::Node node = parent[name];
    if (!node) return;
    const std::string key = prefix + "." + name;
    if (!node.IsSequence()) fail(node, key, "expected a list");
    std::vector<T> values;
    for (const auto& item : node) {
      try {
        values.push_back(item.as<T>());
      } catch (const YAML::Exception&) {
        fail(item, key, fmt::format("cannot convert list entry '{}'", item.Scalar()));
      }
    }
    out = std::move(values);
  }

  template <typename Check>
  void check(const YAML::Node& parent, const std::string& prefix, const char* name, bool ok,
             Check&& message) const {
    if (ok) return;
    const YAML::Node node = parent[name];
    fail(node ? node : parent, prefix + "." + name, message());
  }

 private:
  std::string source_;
};

YAML::Node section(const Reader& r, const YAML::Node& root, const char* name,
                   const std::set<std::string>& keys) {
  YAML::Node node = root[name];
  if (!node) return node;
  r.require_map(node, name);
  r.check_keys(node, name, keys);
  return node;
}

}  // namespace

void RunConfig::apply_preset(std::string_view name) {
  preset = std::string(name);
  grid.name = preset;
  const double delta = base.agent.horizon.delta;
  const int s = base.agent.horizon.step_multiplier;
  const int n = base.agent.horizon.horizon;
  const SweepGrid axes = name == "custom" ? grid : preset_grid(name);
  if (name != "custom") {
    grid.deltas = name == "sampling" ? axes.deltas : std::vector<double>{delta};
    grid.steps = name == "step" ? axes.steps : std::vector<int>{s};
    grid.horizons = name == "horizon" ? axes.horizons : std::vector<int>{n};
  }
}

void RunConfig::validate() const {
  base.agent.validate();
  base.plant.validate();
  EpisodeConfig probe = base.episode;
  for (double d : grid.deltas) {
    probe.delta = d;
    probe.validate();
  }
  grid.validate();
  if (jobs < 1) throw ConfigError("run.jobs must be >= 1");
  if (!(max_diverged_fraction >= 0.0 && max_diverged_fraction <= 1.0)) {
    throw ConfigError("run.max_diverged_fraction must lie in [0, 1]");
  }
}

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.apply_preset("horizon");
  return cfg;
}

RunConfig parse_run_config(std::string_view yaml, std::string_view source) {
  const Reader r{std::string(source)};
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("{}:{}: {}", source, e.mark.line + 1, e.msg));
  }

  RunConfig cfg = default_run_config();
  if (!root || root.IsNull()) return cfg;
  r.require_map(root, "<root>");
  r.check_keys(root, "", {"plant", "actuator", "cost", "agent", "critic", "optimizer", "episode",
                          "sweep", "run"});

  AgentConfig& agent = cfg.base.agent;

  if (auto n = section(r, root, "plant", {"mass", "inertia"})) {
    r.read(n, "plant", "mass", cfg.base.plant.mass);
    r.read(n, "plant", "inertia", cfg.base.plant.inertia);
    r.check(n, "plant", "mass", cfg.base.plant.mass > 0.0, [] { return "must be > 0"; });
    r.check(n, "plant", "inertia", cfg.base.plant.inertia > 0.0, [] { return "must be > 0"; });
  }
  // The agent predicts with the same nominal parameters the plant uses.
  agent.model = cfg.base.plant;

  if (auto n = section(r, root, "actuator", {"max_force", "max_torque"})) {
    r.read(n, "actuator", "max_force", agent.bounds.max_force);
    r.read(n, "actuator", "max_torque", agent.bounds.max_torque);
    r.check(n, "actuator", "max_force", agent.bounds.max_force > 0.0, [] { return "must be > 0"; });
    r.check(n, "actuator", "max_torque", agent.bounds.max_torque > 0.0, [] { return "must be > 0"; });
  }

  if (auto n = section(r, root, "cost", {"weights", "target_alpha"})) {
    std::vector<double> w(agent.cost.weights.begin(), agent.cost.weights.end());
    r.read_list(n, "cost", "weights", w);
    r.check(n, "cost", "weights", w.size() == agent.cost.weights.size(),
            [] { return "expected 7 entries (x, y, alpha, v, omega, F, M)"; });
    for (double v : w) {
      r.check(n, "cost", "weights", v > 0.0, [] { return "entries must be > 0 (R positive-definite)"; });
    }
    std::copy(w.begin(), w.end(), agent.cost.weights.begin());
    r.read(n, "cost", "target_alpha", agent.cost.target_alpha);
  }
  cfg.base.episode.target_alpha = agent.cost.target_alpha;

  if (auto n = section(r, root, "agent", {"gamma", "sql_discounted"})) {
    r.read(n, "agent", "gamma", agent.horizon.gamma);
    r.check(n, "agent", "gamma", agent.horizon.gamma > 0.0 && agent.horizon.gamma <= 1.0,
            [] { return "must lie in (0, 1]"; });
    r.read(n, "agent", "sql_discounted", agent.sql_discounted);
  }

  if (auto n = section(r, root, "critic", {"buffer_size", "gamma", "weight_bound", "ridge",
                                          "initial_weights", "psd_projection",
                                          "freeze_action_terms"})) {
    int buffer = static_cast<int>(agent.critic.buffer_size);
    r.read(n, "critic", "buffer_size", buffer);
    r.check(n, "critic", "buffer_size", buffer >= 1, [] { return "must be >= 1"; });
    agent.critic.buffer_size = static_cast<std::size_t>(buffer);
    r.read(n, "critic", "gamma", agent.critic.gamma);
    r.check(n, "critic", "gamma", agent.critic.gamma > 0.0 && agent.critic.gamma <= 1.0,
            [] { return "must lie in (0, 1]"; });
    r.read(n, "critic", "weight_bound", agent.critic.weight_bound);
    r.check(n, "critic", "weight_bound", agent.critic.weight_bound > 0.0, [] { return "must be > 0"; });
    r.read(n, "critic", "ridge", agent.critic.ridge);
    r.check(n, "critic", "ridge", agent.critic.ridge > 0.0, [] { return "must be > 0"; });
    std::string init = agent.critic.init == CriticInit::Zero ? "zero" : "stage_cost";
    r.read(n, "critic", "initial_weights", init);
    r.check(n, "critic", "initial_weights", init == "zero" || init == "stage_cost",
            [] { return "expected stage_cost or zero"; });
    agent.critic.init = init == "zero" ? CriticInit::Zero : CriticInit::StageCost;
    r.read(n, "critic", "psd_projection", agent.critic.psd);
    r.read(n, "critic", "freeze_action_terms", agent.critic.freeze_action_terms);
  }

  if (auto n = section(r, root, "optimizer", {"evaluations_per_slot", "initial_simplex_step"})) {
    r.read(n, "optimizer", "evaluations_per_slot", agent.evaluations_per_slot);
    r.check(n, "optimizer", "evaluations_per_slot", agent.evaluations_per_slot >= 1,
            [] { return "must be >= 1"; });
    r.read(n, "optimizer", "initial_simplex_step", agent.initial_simplex_step);
    r.check(n, "optimizer", "initial_simplex_step",
            agent.initial_simplex_step > 0.0 && agent.initial_simplex_step <= 1.0,
            [] { return "must lie in (0, 1]"; });
  }

  EpisodeConfig& ep = cfg.base.episode;
  if (auto n = section(r, root, "episode", {"duration", "substeps", "success_radius",
                                           "success_angle_deg", "start_radius", "success_mode"})) {
    r.read(n, "episode", "duration", ep.duration);
    r.check(n, "episode", "duration", ep.duration >= 0.0, [] { return "must be >= 0"; });
    r.read(n, "episode", "substeps", ep.substeps);
    r.check(n, "episode", "substeps", ep.substeps >= 1, [] { return "must be >= 1"; });
    r.read(n, "episode", "success_radius", ep.success_radius);
    r.check(n, "episode", "success_radius", ep.success_radius > 0.0, [] { return "must be > 0"; });
    double deg = ep.success_angle * 180.0 / std::numbers::pi;
    r.read(n, "episode", "success_angle_deg", deg);
    r.check(n, "episode", "success_angle_deg", deg > 0.0, [] { return "must be > 0"; });
    ep.success_angle = deg * std::numbers::pi / 180.0;
    r.read(n, "episode", "start_radius", ep.start_radius);
    r.check(n, "episode", "start_radius", ep.start_radius > 0.0, [] { return "must be > 0"; });
    std::string mode = ep.success_mode == SuccessMode::Final ? "final" : "latched";
    r.read(n, "episode", "success_mode", mode);
    r.check(n, "episode", "success_mode", mode == "latched" || mode == "final",
            [] { return "expected latched or final"; });
    ep.success_mode = mode == "final" ? SuccessMode::Final : SuccessMode::Latched;
  }

  std::string preset = cfg.preset;
  if (auto n = section(r, root, "sweep", {"preset", "agents", "delta", "s", "N", "deltas", "steps",
                                         "horizons", "runs", "master_seed", "ci"})) {
    r.read(n, "sweep", "preset", preset);
    r.check(n, "sweep", "preset",
            preset == "sampling" || preset == "step" || preset == "horizon" || preset == "custom",
            [] { return "expected sampling, step, horizon or custom"; });
    std::vector<std::string> agents;
    r.read_list(n, "sweep", "agents", agents);
    if (n["agents"]) {
      r.check(n, "sweep", "agents", !agents.empty(), [] { return "must not be empty"; });
      cfg.grid.agents.clear();
      for (const auto& a : agents) {
        try {
          cfg.grid.agents.push_back(parse_agent_kind(a));
        } catch (const std::invalid_argument& e) {
          r.fail(n["agents"], "sweep.agents", e.what());
        }
      }
    }
    r.read(n, "sweep", "delta", agent.horizon.delta);
    r.check(n, "sweep", "delta", agent.horizon.delta > 0.0, [] { return "must be > 0"; });
    r.read(n, "sweep", "s", agent.horizon.step_multiplier);
    r.check(n, "sweep", "s", agent.horizon.step_multiplier >= 1, [] { return "must be >= 1"; });
    r.read(n, "sweep", "N", agent.horizon.horizon);
    r.check(n, "sweep", "N", agent.horizon.horizon >= 1, [] { return "must be >= 1"; });

    SweepGrid axes = cfg.grid;
    axes.deltas = preset_grid("sampling").deltas;
    axes.steps = preset_grid("step").steps;
    axes.horizons = preset_grid("horizon").horizons;
    r.read_list(n, "sweep", "deltas", axes.deltas);
    r.read_list(n, "sweep", "steps", axes.steps);
    r.read_list(n, "sweep", "horizons", axes.horizons);
    r.check(n, "sweep", "deltas", !axes.deltas.empty(), [] { return "must not be empty"; });
    r.check(n, "sweep", "steps", !axes.steps.empty(), [] { return "must not be empty"; });
    r.check(n, "sweep", "horizons", !axes.horizons.empty(), [] { return "must not be empty"; });
    for (double d : axes.deltas)
      r.check(n, "sweep", "deltas", d > 0.0, [] { return "entries must be > 0"; });
    for (int s : axes.steps)
      r.check(n, "sweep", "steps", s >= 1, [] { return "entries must be >= 1"; });
    for (int h : axes.horizons)
      r.check(n, "sweep", "horizons", h >= 1, [] { return "entries must be >= 1"; });
    cfg.grid.deltas = axes.deltas;
    cfg.grid.steps = axes.steps;
    cfg.grid.horizons = axes.horizons;

    r.read(n, "sweep", "runs", cfg.grid.runs);
    r.check(n, "sweep", "runs", cfg.grid.runs >= 2, [] { return "must be >= 2"; });
    r.read(n, "sweep", "master_seed", cfg.grid.master_seed);
    std::string ci = cfg.ci == CiMethod::StudentT ? "t" : "normal";
    r.read(n, "sweep", "ci", ci);
    r.check(n, "sweep", "ci", ci == "normal" || ci == "t", [] { return "expected normal or t"; });
    cfg.ci = ci == "t" ? CiMethod::StudentT : CiMethod::Normal;
  } else {
    cfg.grid.deltas = preset_grid("sampling").deltas;
    cfg.grid.steps = preset_grid("step").steps;
    cfg.grid.horizons = preset_grid("horizon").horizons;
  }
  cfg.base.episode.delta = agent.horizon.delta;

  if (auto n = section(r, root, "run", {"jobs", "max_diverged_fraction", "output_dir"})) {
    r.read(n, "run", "jobs", cfg.jobs);
    r.check(n, "run", "jobs", cfg.jobs >= 1, [] { return "must be >= 1"; });
    r.read(n, "run", "max_diverged_fraction", cfg.max_diverged_fraction);
    r.check(n, "run", "max_diverged_fraction",
            cfg.max_diverged_fraction >= 0.0 && cfg.max_diverged_fraction <= 1.0,
            [] { return "must lie in [0, 1]"; });
    r.read(n, "run", "output_dir", cfg.output_dir);
  }

  cfg.apply_preset(preset);
  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path);
}

std::string default_config_yaml() {
  const RunConfig d = default_run_config();
  const AgentConfig& a = d.base.agent;
  const EpisodeConfig& e = d.base.episode;
  const auto list = [](const auto& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt::format("{}", v[i]);
    return s + "]";
  };
  std::vector<std::string> agents;
  for (AgentKind k : d.grid.agents) agents.emplace_back(to_string(k));
  std::string agent_list = "[";
  for (std::size_t i = 0; i < agents.size(); ++i) agent_list += (i ? ", " : "") + agents[i];
  agent_list += "]";

  std::ostringstream os;
  os << "plant:\n"
     << fmt::format("  mass: {}\n  inertia: {}\n", d.base.plant.mass, d.base.plant.inertia)
     << "actuator:\n"
     << fmt::format("  max_force: {}\n  max_torque: {}\n", a.bounds.max_force, a.bounds.max_torque)
     << "cost:\n"
     << fmt::format("  weights: {}\n  target_alpha: {}\n", list(a.cost.weights), a.cost.target_alpha)
     << "agent:\n"
     << fmt::format("  gamma: {}\n  sql_discounted: {}\n", a.horizon.gamma, a.sql_discounted)
     << "critic:\n"
     << fmt::format("  buffer_size: {}\n  gamma: {}\n  weight_bound: {}\n  ridge: {}\n",
                    a.critic.buffer_size, a.critic.gamma, a.critic.weight_bound, a.critic.ridge)
     << fmt::format("  initial_weights: {}\n  psd_projection: {}\n  freeze_action_terms: {}\n",
                    a.critic.init == CriticInit::Zero ? "zero" : "stage_cost", a.critic.psd,
                    a.critic.freeze_action_terms)
     << "optimizer:\n"
     << fmt::format("  evaluations_per_slot: {}\n  initial_simplex_step: {}\n",
                    a.evaluations_per_slot, a.initial_simplex_step)
     << "episode:\n"
     << fmt::format("  duration: {}\n  substeps: {}\n  success_radius: {}\n", e.duration,
                    e.substeps, e.success_radius)
     << fmt::format("  success_angle_deg: {}\n  start_radius: {}\n  success_mode: {}\n",
                    e.success_angle * 180.0 / std::numbers::pi, e.start_radius,
                    e.success_mode == SuccessMode::Final ? "final" : "latched")
     << "sweep:\n"
     << fmt::format("  preset: {}\n  agents: {}\n", d.preset, agent_list)
     << fmt::format("  delta: {}\n  s: {}\n  N: {}\n", a.horizon.delta, a.horizon.step_multiplier,
                    a.horizon.horizon)
     << fmt::format("  deltas: {}\n  steps: {}\n  horizons: {}\n", list(preset_grid("sampling").deltas),
                    list(preset_grid("step").steps), list(preset_grid("horizon").horizons))
     << fmt::format("  runs: {}\n  master_seed: {}\n  ci: {}\n", d.grid.runs, d.grid.master_seed,
                    d.ci == CiMethod::StudentT ? "t" : "normal")
     << "run:\n"
     << fmt::format("  jobs: {}\n  max_diverged_fraction: {}\n  output_dir: {}\n", d.jobs,
                    d.max_diverged_fraction, d.output_dir);
  return os.str();
}

}  // namespace predrl
