#include "predrl/agents.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "predrl/stacked.hpp"

namespace predrl {

void HorizonConfig::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be > 0");
  if (step_multiplier < 1) throw std::invalid_argument("step multiplier s must be >= 1");
  if (horizon < 1) throw std::invalid_argument("horizon N must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
}

void StageCostConfig::validate() const {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw std::invalid_argument("stage cost weight " + std::to_string(i) +
                                  " must be positive (R positive-definite)");
    }
  }
}

WeightVector StageCostConfig::as_critic_weights() const {
  StackMatrix r = StackMatrix::Zero();
  for (int i = 0; i < kStackDim; ++i) r(i, i) = weights[static_cast<std::size_t>(i)];
  return pack_symmetric(r);
}

double stage_cost(const RobotState& state, const Action& action, const StageCostConfig& cfg) {
  const std::array<double, kStackDim> chi{state.x,
                                          state.y,
                                          wrap_angle(state.alpha - cfg.target_alpha),
                                          state.v,
                                          state.omega,
                                          action.force,
                                          action.torque};
  double rho = 0.0;
  for (std::size_t i = 0; i < chi.size(); ++i) rho += cfg.weights[i] * chi[i] * chi[i];
  return rho;
}

Eigen::VectorXd flatten(const ActionSequence& seq) {
  Eigen::VectorXd flat(2 * static_cast<Eigen::Index>(seq.size()));
  for (std::size_t i = 0; i < seq.size(); ++i) {
    flat(2 * static_cast<Eigen::Index>(i)) = seq[i].force;
    flat(2 * static_cast<Eigen::Index>(i) + 1) = seq[i].torque;
  }
  return flat;
}

ActionSequence unflatten(const Eigen::VectorXd& flat) {
  if (flat.size() % 2 != 0) throw std::invalid_argument("flattened action sequence has odd length");
  ActionSequence seq(static_cast<std::size_t>(flat.size() / 2));
  for (std::size_t i = 0; i < seq.size(); ++i) {
    seq[i] = {flat(2 * static_cast<Eigen::Index>(i)), flat(2 * static_cast<Eigen::Index>(i) + 1)};
  }
  return seq;
}

Box sequence_box(int horizon, const ActionBounds& bounds) {
  Box box{Eigen::VectorXd(2 * horizon), Eigen::VectorXd(2 * horizon)};
  for (int i = 0; i < horizon; ++i) {
    box.lower(2 * i) = -bounds.max_force;
    box.upper(2 * i) = bounds.max_force;
    box.lower(2 * i + 1) = -bounds.max_torque;
    box.upper(2 * i + 1) = bounds.max_torque;
  }
  return box;
}

std::vector<RobotState> predict_sequence(const RobotState& x_k, const ActionSequence& seq,
                                         const HorizonConfig& cfg, const RobotParams& model) {
  std::vector<RobotState> states;
  if (seq.empty()) return states;
  states.reserve(seq.size());
  states.push_back(x_k);
  const double h = cfg.prediction_step();
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    states.push_back(euler_step(h, states.back(), seq[i], model));
  }
  return states;
}

double mpc_objective(const RobotState& x_k, const ActionSequence& seq, const HorizonConfig& cfg,
                     const StageCostConfig& cost, const RobotParams& model) {
  const auto states = predict_sequence(x_k, seq, cfg, model);
  double total = 0.0;
  double discount = 1.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    total += discount * stage_cost(states[i], seq[i], cost);
    discount *= cfg.gamma;
  }
  return total;
}

double rql_objective(const RobotState& x_k, const ActionSequence& seq, const WeightVector& theta,
                     const HorizonConfig& cfg, const StageCostConfig& cost,
                     const RobotParams& model) {
  const auto states = predict_sequence(x_k, seq, cfg, model);
  if (states.empty()) return 0.0;
  double total = 0.0;
  double discount = 1.0;
  for (std::size_t i = 0; i + 1 < states.size(); ++i) {
    total += discount * stage_cost(states[i], seq[i], cost);
    discount *= cfg.gamma;
  }
  return total + q_hat(theta, states.back(), seq.back());
}

double sql_objective(const RobotState& x_k, const ActionSequence& seq, const WeightVector& theta,
                     const HorizonConfig& cfg, const RobotParams& model, bool discounted) {
  const auto states = predict_sequence(x_k, seq, cfg, model);
  if (!discounted) {
    return stacked_q_sum(states, seq, [&](const RobotState& s, const Action& a) {
      return q_hat(theta, s, a);
    });
  }
  double total = 0.0;
  double discount = 1.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    total += discount * q_hat(theta, states[i], seq[i]);
    discount *= cfg.gamma;
  }
  return total;
}

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::Mpc: return "MPC";
    case AgentKind::Rql: return "RQL";
    case AgentKind::Sql: return "SQL";
  }
  return "?";
}

AgentKind parse_agent_kind(std::string_view name) {
  std::string upper(name);
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "MPC") return AgentKind::Mpc;
  if (upper == "RQL") return AgentKind::Rql;
  if (upper == "SQL") return AgentKind::Sql;
  throw std::invalid_argument("unknown agent '" + std::string(name) + "' (expected MPC, RQL or SQL)");
}

void AgentConfig::validate() const {
  horizon.validate();
  cost.validate();
  model.validate();
  if (!(bounds.max_force > 0.0) || !(bounds.max_torque > 0.0)) {
    throw std::invalid_argument("actuator bounds must be positive");
  }
  if (critic.buffer_size == 0) throw std::invalid_argument("critic buffer size must be positive");
  if (!(critic.gamma > 0.0 && critic.gamma <= 1.0)) {
    throw std::invalid_argument("critic gamma must lie in (0, 1]");
  }
  if (!(critic.weight_bound > 0.0)) throw std::invalid_argument("critic weight bound must be > 0");
  if (!(critic.ridge > 0.0)) throw std::invalid_argument("critic ridge must be > 0");
  if (evaluations_per_slot < 1) throw std::invalid_argument("optimizer budget must be >= 1");
  if (!(initial_simplex_step > 0.0 && initial_simplex_step <= 1.0)) {
    throw std::invalid_argument("initial simplex step must lie in (0, 1]");
  }
}

namespace {

AgentConfig validated(AgentConfig cfg) {
  cfg.validate();
  return cfg;
}

std::unique_ptr<SequenceOptimizer> default_optimizer(const AgentConfig& cfg) {
  NelderMeadOptions opts;
  opts.max_evaluations = cfg.evaluations_per_slot * cfg.horizon.horizon;
  opts.initial_step = cfg.initial_simplex_step;
  return std::make_unique<NelderMead>(opts);
}

}  // namespace

Agent::Agent(AgentConfig cfg) : Agent(cfg, default_optimizer(validated(cfg))) {}

Agent::Agent(AgentConfig cfg, std::unique_ptr<SequenceOptimizer> optimizer)
    : cfg_(validated(std::move(cfg))),
      optimizer_(std::move(optimizer)),
      box_(sequence_box(cfg_.horizon.horizon, cfg_.bounds)),
      weight_bounds_(WeightBounds::symmetric(cfg_.critic.weight_bound)),
      buffer_(cfg_.critic.buffer_size) {
  if (!optimizer_) throw std::invalid_argument("agent needs an optimizer");
  if (cfg_.critic.freeze_action_terms) {
    const WeightVector init = initial_weights();
    int k = 0;
    for (int i = 0; i < kStackDim; ++i)
      for (int j = i; j < kStackDim; ++j, ++k)
        if (j >= RobotState::kDim) {
          weight_bounds_.lower(k) = init(k);
          weight_bounds_.upper(k) = init(k);
        }
  }
  reset();
}

WeightVector Agent::initial_weights() const {
  if (cfg_.critic.init == CriticInit::Zero) return WeightVector::Zero();
  return weight_bounds_.project(cfg_.cost.as_critic_weights());
}

void Agent::reset() {
  buffer_.clear();
  theta_ = initial_weights();
  plan_.assign(static_cast<std::size_t>(cfg_.horizon.horizon), Action{});
  history_.clear();
  telemetry_ = {};
}

double Agent::objective(const RobotState& x_k, const ActionSequence& seq) const {
  switch (cfg_.kind) {
    case AgentKind::Mpc: return mpc_objective(x_k, seq, cfg_.horizon, cfg_.cost, cfg_.model);
    case AgentKind::Rql:
      return rql_objective(x_k, seq, theta_, cfg_.horizon, cfg_.cost, cfg_.model);
    case AgentKind::Sql:
      return sql_objective(x_k, seq, theta_, cfg_.horizon, cfg_.model, cfg_.sql_discounted);
  }
  return 0.0;
}

Action Agent::step(const RobotState& x_k) {
  telemetry_ = {};
  if (learns()) {
    if (history_.size() == 2) {
      const auto& [s0, a0] = history_[0];
      const auto& [s1, a1] = history_[1];
      buffer_.push({s0, a0, s1, a1, stage_cost(s0, a0, cfg_.cost)});
    }
    const CriticUpdate upd =
        update_critic(buffer_, theta_, cfg_.critic.gamma, weight_bounds_, cfg_.critic.ridge,
                      cfg_.critic.psd);
    theta_ = upd.theta;
    telemetry_.critic_updated = upd.updated;
    telemetry_.critic_hit_bounds = upd.hit_bounds;
    telemetry_.critic_condition = upd.condition_number;
  }

  // Warm start: previous plan shifted one slot, last slot repeated.
  ActionSequence warm(plan_.begin() + 1, plan_.end());
  warm.push_back(plan_.back());

  const Objective f = [&](const Eigen::VectorXd& flat) { return objective(x_k, unflatten(flat)); };
  const OptimizeResult res = optimizer_->minimize(f, flatten(warm), box_);
  plan_ = unflatten(box_.project(res.x));
  telemetry_.objective = res.value;
  telemetry_.evaluations = res.evaluations;
  telemetry_.optimizer_converged = res.converged;

  const Action u = cfg_.bounds.clamp(plan_.front());
  history_.emplace_back(x_k, u);
  if (history_.size() > 2) history_.erase(history_.begin());
  return u;
}

}  // namespace predrl
