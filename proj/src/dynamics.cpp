#include "predrl/dynamics.hpp"

#include <algorithm>
#include <string>

namespace predrl {

namespace {

RobotState axpy(double h, const RobotState& d, const RobotState& s) {
  return {s.x + h * d.x, s.y + h * d.y, s.alpha + h * d.alpha, s.v + h * d.v,
          s.omega + h * d.omega};
}

void require_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("integration step must be positive and finite, got " +
                                std::to_string(h));
  }
}

}  // namespace

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  if (r > std::numbers::pi) r -= two_pi;
  return r;
}

double RobotState::wrapped_alpha() const { return wrap_angle(alpha); }

bool RobotState::finite() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(alpha) &&
         std::isfinite(v) && std::isfinite(omega);
}

Action ActionBounds::clamp(const Action& a) const {
  return {std::clamp(a.force, -max_force, max_force),
          std::clamp(a.torque, -max_torque, max_torque)};
}

bool ActionBounds::contains(const Action& a) const {
  return std::abs(a.force) <= max_force && std::abs(a.torque) <= max_torque;
}

void RobotParams::validate() const {
  if (!(mass > 0.0) || !(inertia > 0.0) || !std::isfinite(mass) || !std::isfinite(inertia)) {
    throw std::invalid_argument("robot mass and inertia must be positive");
  }
}

RobotStateDerivative rhs(const RobotState& state, const Action& action,
                         const RobotParams& params) {
  if (!state.finite() || !std::isfinite(action.force) || !std::isfinite(action.torque)) {
    throw DomainError("rhs: non-finite state or action");
  }
  return {state.v * std::cos(state.alpha), state.v * std::sin(state.alpha), state.omega,
          action.force / params.mass, action.torque / params.inertia};
}

RobotState euler_step(double h, const RobotState& state, const Action& action,
                      const RobotParams& params) {
  require_step(h);
  return axpy(h, rhs(state, action, params), state);
}

RobotState rk4_step(double h, const RobotState& state, const Action& action,
                    const RobotParams& params) {
  require_step(h);
  const RobotState k1 = rhs(state, action, params);
  const RobotState k2 = rhs(axpy(0.5 * h, k1, state), action, params);
  const RobotState k3 = rhs(axpy(0.5 * h, k2, state), action, params);
  const RobotState k4 = rhs(axpy(h, k3, state), action, params);
  const double w = h / 6.0;
  return {state.x + w * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          state.y + w * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
          state.alpha + w * (k1.alpha + 2.0 * k2.alpha + 2.0 * k3.alpha + k4.alpha),
          state.v + w * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v),
          state.omega + w * (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega)};
}

RobotState integrate_rk4(double duration, int substeps, const RobotState& state,
                         const Action& action, const RobotParams& params) {
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  const double h = duration / substeps;
  RobotState s = state;
  for (int i = 0; i < substeps; ++i) s = rk4_step(h, s, action, params);
  return s;
}

}  // namespace predrl
