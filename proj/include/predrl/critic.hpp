#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>

#include <Eigen/Core>

#include "predrl/dynamics.hpp"

namespace predrl {

/// Length of z = [state | action].
inline constexpr int kStackDim = RobotState::kDim + Action::kDim;
/// Number of quadratic monomials z_i z_j with i <= j.
inline constexpr int kFeatureDim = kStackDim * (kStackDim + 1) / 2;
static_assert(kFeatureDim == 28);

using StackVector = Eigen::Matrix<double, kStackDim, 1>;
using StackMatrix = Eigen::Matrix<double, kStackDim, kStackDim>;
using FeatureVector = Eigen::Matrix<double, kFeatureDim, 1>;
using WeightVector = FeatureVector;

/// z = [x, y, wrap(alpha), v, omega, F, M].
StackVector stack(const RobotState& state, const Action& action);

/// Upper triangle of z z^T, row-major, off-diagonal entries doubled.
/// With this convention theta . features(z) == z^T S z when theta = pack(S).
FeatureVector features(const RobotState& state, const Action& action);
FeatureVector features_of_stack(const StackVector& z);

/// Row-major upper triangle of a symmetric matrix (no doubling).
WeightVector pack_symmetric(const StackMatrix& s);
StackMatrix unpack_symmetric(const WeightVector& theta);

struct WeightBounds {
  WeightVector lower = WeightVector::Constant(-1e3);
  WeightVector upper = WeightVector::Constant(1e3);

  static WeightBounds symmetric(double limit);
  WeightVector project(const WeightVector& theta) const;
  bool contains(const WeightVector& theta) const;
};

struct CriticWeights {
  WeightVector theta = WeightVector::Zero();
  WeightBounds bounds;
};

double q_hat(const WeightVector& theta, const RobotState& state, const Action& action);
/// Runtime-sized variant; throws std::length_error unless theta has 28 entries.
double q_hat(std::span<const double> theta, const RobotState& state, const Action& action);

struct Transition {
  RobotState prev_state;
  Action prev_action;
  RobotState state;
  Action action;
  double prev_stage_cost{0.0};
};

/// Fixed-capacity FIFO of transitions; the oldest record is evicted first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  void clear() { records_.clear(); }

  std::size_t size() const { return records_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return records_.empty(); }
  const Transition& operator[](std::size_t i) const { return records_[i]; }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

 private:
  std::size_t capacity_;
  std::deque<Transition> records_;
};

/// e = theta . phi(prev) - gamma * theta_minus . phi(cur) - rho(prev).
double td_error(const WeightVector& theta, const WeightVector& theta_minus, const Transition& t,
                double gamma);

/// Half sum of squared TD errors. Empty buffer yields nullopt (nothing to fit).
std::optional<double> critic_loss(const WeightVector& theta, const ReplayBuffer& buffer,
                                  const WeightVector& theta_minus, double gamma);

/// Sum_i e_i * phi(prev_i); zero for an empty buffer.
WeightVector critic_loss_gradient(const WeightVector& theta, const ReplayBuffer& buffer,
                                  const WeightVector& theta_minus, double gamma);

struct CriticUpdate {
  WeightVector theta;
  bool updated{false};          // false when the buffer was empty
  bool hit_bounds{false};       // unconstrained minimizer left the box
  double condition_number{0.0};
  double loss_before{0.0};      // at theta_minus
  double loss_after{0.0};
};

/// Bounded linear least squares on the TD loss. The ridge term pulls toward
/// theta_minus, so directions the buffer does not excite keep their value.
CriticUpdate update_critic(const ReplayBuffer& buffer, const WeightVector& theta_minus,
                           double gamma, const WeightBounds& bounds, double ridge = 1e-8,
                           bool psd = false);

/// Nearest (Frobenius) weights whose packed matrix is positive semidefinite.
WeightVector project_psd(const WeightVector& theta);

}  // namespace predrl
