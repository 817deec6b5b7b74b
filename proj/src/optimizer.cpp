#include "predrl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace predrl {

OptimizeResult NelderMead::minimize(const Objective& f, const Eigen::VectorXd& initial,
                                    const Box& box) const {
  const Eigen::Index n = initial.size();
  if (box.lower.size() != n || box.upper.size() != n) {
    throw std::invalid_argument("optimizer box dimension mismatch");
  }

  OptimizeResult best;
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    double v = f(x);
    if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
    if (evals == 1 || v < best.value) {
      best.x = x;
      best.value = v;
    }
    return v;
  };

  std::vector<Eigen::VectorXd> pts;
  std::vector<double> vals;
  pts.reserve(static_cast<std::size_t>(n) + 1);
  pts.push_back(box.project(initial));
  vals.push_back(eval(pts[0]));
  for (Eigen::Index i = 0; i < n && evals < opts_.max_evaluations; ++i) {
    Eigen::VectorXd p = pts[0];
    const double width = box.upper(i) - box.lower(i);
    const double step = opts_.initial_step * width;
    // Step away from whichever face is closer so the vertex stays distinct.
    p(i) += (p(i) + step <= box.upper(i)) ? step : -step;
    p = box.project(p);
    pts.push_back(p);
    vals.push_back(eval(p));
  }
  if (static_cast<Eigen::Index>(pts.size()) < n + 1) {
    best.evaluations = evals;
    return best;
  }

  const Eigen::ArrayXd width = (box.upper - box.lower).array().max(1e-300);
  std::vector<std::size_t> order(pts.size());
  constexpr double reflect = 1.0, expand = 2.0, contract = 0.5, shrink = 0.5;

  while (evals < opts_.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t lo = order.front(), hi = order.back(), second = order[order.size() - 2];
    // A flat simplex can straddle the minimum, so its size must shrink too.
    double spread = 0.0;
    for (const auto& p : pts)
      spread = std::max(spread, ((p - pts[lo]).array().abs() / width.array()).maxCoeff());
    if (std::abs(vals[hi] - vals[lo]) <= opts_.value_tolerance * (1.0 + std::abs(vals[lo])) &&
        spread <= opts_.step_tolerance) {
      best.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < pts.size(); ++k)
      if (k != hi) centroid += pts[k];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd xr = box.project(centroid + reflect * (centroid - pts[hi]));
    const double fr = eval(xr);
    if (fr < vals[lo]) {
      if (evals >= opts_.max_evaluations) {
        pts[hi] = xr;
        vals[hi] = fr;
        break;
      }
      const Eigen::VectorXd xe = box.project(centroid + expand * (xr - centroid));
      const double fe = eval(xe);
      if (fe < fr) {
        pts[hi] = xe;
        vals[hi] = fe;
      } else {
        pts[hi] = xr;
        vals[hi] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[hi] = xr;
      vals[hi] = fr;
      continue;
    }
    if (evals >= opts_.max_evaluations) break;
    const bool outside = fr < vals[hi];
    const Eigen::VectorXd xc = outside ? box.project(centroid + contract * (xr - centroid))
                                       : box.project(centroid + contract * (pts[hi] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[hi])) {
      pts[hi] = xc;
      vals[hi] = fc;
      continue;
    }
    for (std::size_t k = 0; k < pts.size() && evals < opts_.max_evaluations; ++k) {
      if (k == lo) continue;
      pts[k] = box.project(pts[lo] + shrink * (pts[k] - pts[lo]));
      vals[k] = eval(pts[k]);
    }
  }

  best.evaluations = evals;
  return best;
}

}  // namespace predrl
