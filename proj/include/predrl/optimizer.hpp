#pragma once

#include <functional>
#include <memory>

#include <Eigen/Core>

namespace predrl {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::VectorXd project(const Eigen::VectorXd& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
  bool contains(const Eigen::VectorXd& x) const {
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
  }
};

struct OptimizeResult {
  Eigen::VectorXd x;
  double value{0.0};
  int evaluations{0};
  bool converged{false};  // false: budget ran out first, x is best-so-far
};

/// Bounded minimizer over a flat decision vector.
class SequenceOptimizer {
 public:
  virtual ~SequenceOptimizer() = default;
  virtual OptimizeResult minimize(const Objective& f, const Eigen::VectorXd& initial,
                                  const Box& box) const = 0;
};

struct NelderMeadOptions {
  int max_evaluations{500};
  /// Initial simplex edge as a fraction of each coordinate's box width.
  double initial_step{0.1};
  /// Stop when the spread of simplex values falls below this...
  double value_tolerance{1e-10};
  /// ...and every vertex lies within this fraction of the box width of the best.
  double step_tolerance{1e-8};
};

/// Nelder-Mead with every trial point projected onto the box.
class NelderMead final : public SequenceOptimizer {
 public:
  explicit NelderMead(NelderMeadOptions options = {}) : opts_(options) {}

  OptimizeResult minimize(const Objective& f, const Eigen::VectorXd& initial,
                          const Box& box) const override;

  const NelderMeadOptions& options() const { return opts_; }

 private:
  NelderMeadOptions opts_;
};

}  // namespace predrl
