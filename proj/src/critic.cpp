#include "predrl/critic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace predrl {

StackVector stack(const RobotState& state, const Action& action) {
  StackVector z;
  z << state.x, state.y, state.wrapped_alpha(), state.v, state.omega, action.force, action.torque;
  return z;
}

FeatureVector features_of_stack(const StackVector& z) {
  FeatureVector phi;
  int k = 0;
  for (int i = 0; i < kStackDim; ++i) {
    phi(k++) = z(i) * z(i);
    for (int j = i + 1; j < kStackDim; ++j) phi(k++) = 2.0 * z(i) * z(j);
  }
  return phi;
}

FeatureVector features(const RobotState& state, const Action& action) {
  return features_of_stack(stack(state, action));
}

WeightVector pack_symmetric(const StackMatrix& s) {
  WeightVector theta;
  int k = 0;
  for (int i = 0; i < kStackDim; ++i)
    for (int j = i; j < kStackDim; ++j) theta(k++) = s(i, j);
  return theta;
}

StackMatrix unpack_symmetric(const WeightVector& theta) {
  StackMatrix s;
  int k = 0;
  for (int i = 0; i < kStackDim; ++i)
    for (int j = i; j < kStackDim; ++j) {
      s(i, j) = theta(k);
      s(j, i) = theta(k);
      ++k;
    }
  return s;
}

WeightBounds WeightBounds::symmetric(double limit) {
  if (!(limit > 0.0)) throw std::invalid_argument("critic weight bound must be positive");
  return {WeightVector::Constant(-limit), WeightVector::Constant(limit)};
}

WeightVector WeightBounds::project(const WeightVector& theta) const {
  return theta.cwiseMax(lower).cwiseMin(upper);
}

bool WeightBounds::contains(const WeightVector& theta) const {
  return (theta.array() >= lower.array()).all() && (theta.array() <= upper.array()).all();
}

double q_hat(const WeightVector& theta, const RobotState& state, const Action& action) {
  return theta.dot(features(state, action));
}

double q_hat(std::span<const double> theta, const RobotState& state, const Action& action) {
  if (theta.size() != static_cast<std::size_t>(kFeatureDim)) {
    throw std::length_error("critic weights must have " + std::to_string(kFeatureDim) +
                            " entries, got " + std::to_string(theta.size()));
  }
  return Eigen::Map<const WeightVector>(theta.data()).dot(features(state, action));
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
}

void ReplayBuffer::push(const Transition& t) {
  if (records_.size() == capacity_) records_.pop_front();
  records_.push_back(t);
}

double td_error(const WeightVector& theta, const WeightVector& theta_minus, const Transition& t,
                double gamma) {
  return theta.dot(features(t.prev_state, t.prev_action)) -
         gamma * theta_minus.dot(features(t.state, t.action)) - t.prev_stage_cost;
}

std::optional<double> critic_loss(const WeightVector& theta, const ReplayBuffer& buffer,
                                  const WeightVector& theta_minus, double gamma) {
  if (buffer.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& t : buffer) {
    const double e = td_error(theta, theta_minus, t, gamma);
    sum += e * e;
  }
  return 0.5 * sum;
}

WeightVector critic_loss_gradient(const WeightVector& theta, const ReplayBuffer& buffer,
                                  const WeightVector& theta_minus, double gamma) {
  WeightVector g = WeightVector::Zero();
  for (const auto& t : buffer) {
    g += td_error(theta, theta_minus, t, gamma) * features(t.prev_state, t.prev_action);
  }
  return g;
}

namespace {

// Rows [Phi; sqrt(ridge) I] and targets [rho + gamma theta_minus.phi'; sqrt(ridge) theta_minus].
struct RidgeSystem {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;

  double objective(const WeightVector& theta) const { return 0.5 * (a * theta - b).squaredNorm(); }
};

RidgeSystem build_system(const ReplayBuffer& buffer, const WeightVector& theta_minus,
                         double gamma, double ridge) {
  const auto m = static_cast<Eigen::Index>(buffer.size());
  RidgeSystem sys{Eigen::MatrixXd::Zero(m + kFeatureDim, kFeatureDim),
                  Eigen::VectorXd::Zero(m + kFeatureDim)};
  Eigen::Index row = 0;
  for (const auto& t : buffer) {
    sys.a.row(row) = features(t.prev_state, t.prev_action).transpose();
    sys.b(row) = t.prev_stage_cost + gamma * theta_minus.dot(features(t.state, t.action));
    ++row;
  }
  const double r = std::sqrt(ridge);
  sys.a.bottomRows(kFeatureDim) = r * Eigen::MatrixXd::Identity(kFeatureDim, kFeatureDim);
  sys.b.tail(kFeatureDim) = r * theta_minus;
  return sys;
}

// Active-set refinement of the projected unconstrained solution.
WeightVector solve_in_box(const RidgeSystem& sys, const WeightVector& start,
                          const WeightBounds& bounds) {
  WeightVector theta = bounds.project(start);
  double best = sys.objective(theta);
  for (int pass = 0; pass < 4 * kFeatureDim; ++pass) {
    const Eigen::VectorXd grad = sys.a.transpose() * (sys.a * theta - sys.b);
    std::vector<int> free;
    for (int j = 0; j < kFeatureDim; ++j) {
      const bool at_lower = theta(j) <= bounds.lower(j);
      const bool at_upper = theta(j) >= bounds.upper(j);
      if ((!at_lower && !at_upper) || (at_lower && grad(j) < 0.0) || (at_upper && grad(j) > 0.0)) {
        free.push_back(j);
      }
    }
    if (free.empty()) break;
    Eigen::MatrixXd sub(sys.a.rows(), static_cast<Eigen::Index>(free.size()));
    Eigen::VectorXd rhs = sys.b;
    std::vector<bool> is_free(kFeatureDim, false);
    for (std::size_t c = 0; c < free.size(); ++c) {
      sub.col(static_cast<Eigen::Index>(c)) = sys.a.col(free[c]);
      is_free[free[c]] = true;
    }
    for (int j = 0; j < kFeatureDim; ++j)
      if (!is_free[j]) rhs -= sys.a.col(j) * theta(j);
    const Eigen::VectorXd sol = sub.colPivHouseholderQr().solve(rhs);
    WeightVector next = theta;
    for (std::size_t c = 0; c < free.size(); ++c) next(free[c]) = sol(static_cast<Eigen::Index>(c));
    next = bounds.project(next);
    const double value = sys.objective(next);
    if (!(value < best)) break;
    best = value;
    theta = next;
  }
  return theta;
}

}  // namespace

WeightVector project_psd(const WeightVector& theta) {
  const Eigen::SelfAdjointEigenSolver<StackMatrix> eig(unpack_symmetric(theta));
  const auto clipped = eig.eigenvalues().cwiseMax(0.0);
  const StackMatrix s = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  return pack_symmetric(0.5 * (s + s.transpose()));
}

CriticUpdate update_critic(const ReplayBuffer& buffer, const WeightVector& theta_minus,
                           double gamma, const WeightBounds& bounds, double ridge, bool psd) {
  if (!(ridge > 0.0)) throw std::invalid_argument("critic ridge must be positive");
  CriticUpdate out;
  out.theta = theta_minus;
  if (buffer.empty()) return out;

  const RidgeSystem sys = build_system(buffer, theta_minus, gamma, ridge);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.a);
  const auto& sv = svd.singularValues();
  out.condition_number = sv(0) / sv(sv.size() - 1);

  WeightVector theta = sys.a.colPivHouseholderQr().solve(sys.b);
  if (!bounds.contains(theta)) {
    out.hit_bounds = true;
    theta = solve_in_box(sys, theta, bounds);
  }

  if (psd) {
    theta = project_psd(theta);
    // Uniform scaling keeps the matrix semidefinite while fitting the box.
    double scale = 1.0;
    for (int j = 0; j < kFeatureDim; ++j) {
      if (theta(j) > bounds.upper(j) && theta(j) > 0.0) scale = std::min(scale, bounds.upper(j) / theta(j));
      if (theta(j) < bounds.lower(j) && theta(j) < 0.0) scale = std::min(scale, bounds.lower(j) / theta(j));
    }
    theta *= scale;
  }

  out.loss_before = *critic_loss(theta_minus, buffer, theta_minus, gamma);
  out.loss_after = *critic_loss(theta, buffer, theta_minus, gamma);
  // theta_minus is feasible; never hand back something that fits worse.
  if (out.loss_after > out.loss_before && bounds.contains(theta_minus)) {
    theta = theta_minus;
    out.loss_after = out.loss_before;
  }
  out.theta = theta;
  out.updated = true;
  return out;
}

}  // namespace predrl
