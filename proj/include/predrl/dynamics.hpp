#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace predrl {

/// Planar pose, heading, speed and turn rate of the three-wheel robot.
/// The heading is kept unwrapped while integrating; use wrapped_alpha()
/// wherever a cost or a success test looks at it.
struct RobotState {
  double x{0.0};      // m
  double y{0.0};      // m
  double alpha{0.0};  // rad
  double v{0.0};      // m/s
  double omega{0.0};  // rad/s

  static constexpr int kDim = 5;

  double wrapped_alpha() const;
  bool finite() const;
  std::array<double, kDim> as_array() const { return {x, y, alpha, v, omega}; }
  static RobotState from_array(const std::array<double, kDim>& a) {
    return {a[0], a[1], a[2], a[3], a[4]};
  }

  bool operator==(const RobotState&) const = default;
};

/// Time derivative of a RobotState, same layout.
using RobotStateDerivative = RobotState;

struct Action {
  double force{0.0};   // N
  double torque{0.0};  // N m

  static constexpr int kDim = 2;

  bool operator==(const Action&) const = default;
};

struct ActionBounds {
  double max_force{300.0};
  double max_torque{100.0};

  Action clamp(const Action& a) const;
  bool contains(const Action& a) const;
};

struct RobotParams {
  double mass{10.0};    // kg
  double inertia{1.0};  // kg m^2

  void validate() const;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Maps an angle to (-pi, pi].
double wrap_angle(double a);

/// Right-hand side of the ENDI model: (v cos a, v sin a, w, F/m, M/I).
RobotStateDerivative rhs(const RobotState& state, const Action& action,
                         const RobotParams& params);

/// state + h * rhs(state, action). One rhs evaluation.
RobotState euler_step(double h, const RobotState& state, const Action& action,
                      const RobotParams& params);

/// Classical 4th-order Runge-Kutta with the action held over the step.
RobotState rk4_step(double h, const RobotState& state, const Action& action,
                    const RobotParams& params);

/// Advances `duration` seconds in `substeps` equal RK4 steps.
RobotState integrate_rk4(double duration, int substeps, const RobotState& state,
                         const Action& action, const RobotParams& params);

}  // namespace predrl
