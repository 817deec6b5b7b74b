#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "predrl/critic.hpp"
#include "predrl/dynamics.hpp"
#include "predrl/optimizer.hpp"

namespace predrl {

struct HorizonConfig {
  double delta{0.1};  // sampling time, s
  int step_multiplier{1};
  int horizon{3};
  double gamma{1.0};

  double prediction_step() const { return step_multiplier * delta; }
  void validate() const;
};

/// Diagonal R over chi = [x, y, alpha, v, omega, F, M]; rho = chi^T R chi.
struct StageCostConfig {
  std::array<double, kStackDim> weights{1.0, 1.0, 0.1, 0.1, 0.01, 1e-4, 1e-4};
  double target_alpha{0.0};

  void validate() const;
  /// theta such that q_hat(theta, x, u) == stage_cost(x, u) when target_alpha == 0.
  WeightVector as_critic_weights() const;
};

double stage_cost(const RobotState& state, const Action& action, const StageCostConfig& cfg);

using ActionSequence = std::vector<Action>;

Eigen::VectorXd flatten(const ActionSequence& seq);
ActionSequence unflatten(const Eigen::VectorXd& flat);
Box sequence_box(int horizon, const ActionBounds& bounds);

/// x_hat_1 = x_k, x_hat_{i+1} = euler(s*delta, x_hat_i, u_i). Returns N states.
std::vector<RobotState> predict_sequence(const RobotState& x_k, const ActionSequence& seq,
                                         const HorizonConfig& cfg, const RobotParams& model);

double mpc_objective(const RobotState& x_k, const ActionSequence& seq, const HorizonConfig& cfg,
                     const StageCostConfig& cost, const RobotParams& model);

/// N-1 discounted stage costs plus the critic at the last predicted pair.
double rql_objective(const RobotState& x_k, const ActionSequence& seq, const WeightVector& theta,
                     const HorizonConfig& cfg, const StageCostConfig& cost,
                     const RobotParams& model);

/// Sum of critic values along the prediction; undiscounted unless `discounted`.
double sql_objective(const RobotState& x_k, const ActionSequence& seq, const WeightVector& theta,
                     const HorizonConfig& cfg, const RobotParams& model, bool discounted = false);

enum class AgentKind { Mpc, Rql, Sql };

std::string_view to_string(AgentKind kind);
AgentKind parse_agent_kind(std::string_view name);

enum class CriticInit { StageCost, Zero };

struct CriticConfig {
  std::size_t buffer_size{20};
  double gamma{1.0};
  double weight_bound{1e3};
  /// Proximal pull toward the previous weights.
  double ridge{0.1};
  CriticInit init{CriticInit::StageCost};
  bool psd{true};
  /// Pin every weight that touches F or M to its initial value.
  bool freeze_action_terms{true};
};

struct AgentConfig {
  AgentKind kind{AgentKind::Mpc};
  HorizonConfig horizon;
  StageCostConfig cost;
  RobotParams model;
  ActionBounds bounds;
  CriticConfig critic;
  int evaluations_per_slot{100};
  double initial_simplex_step{0.1};
  bool sql_discounted{false};

  void validate() const;
};

struct StepTelemetry {
  double objective{0.0};
  int evaluations{0};
  bool optimizer_converged{false};
  bool critic_updated{false};
  bool critic_hit_bounds{false};
  double critic_condition{0.0};
};

/// One predictive actor with its own replay buffer and critic weights.
/// Single-threaded; run distinct instances in parallel.
class Agent {
 public:
  explicit Agent(AgentConfig cfg);
  Agent(AgentConfig cfg, std::unique_ptr<SequenceOptimizer> optimizer);

  /// Observe x_k, update the critic (RQL/SQL), re-plan, return u_{1|k}.
  Action step(const RobotState& x_k);
  void reset();

  double objective(const RobotState& x_k, const ActionSequence& seq) const;

  const AgentConfig& config() const { return cfg_; }
  const WeightVector& weights() const { return theta_; }
  const ActionSequence& plan() const { return plan_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const StepTelemetry& telemetry() const { return telemetry_; }

 private:
  bool learns() const { return cfg_.kind != AgentKind::Mpc; }
  WeightVector initial_weights() const;

  AgentConfig cfg_;
  std::unique_ptr<SequenceOptimizer> optimizer_;
  Box box_;
  WeightBounds weight_bounds_;
  ReplayBuffer buffer_;
  WeightVector theta_;
  ActionSequence plan_;
  // Last two observed (state, applied action) pairs, oldest first.
  std::vector<std::pair<RobotState, Action>> history_;
  StepTelemetry telemetry_;
};

}  // namespace predrl
