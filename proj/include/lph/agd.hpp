#ifndef LPH_AGD_HPP
#define LPH_AGD_HPP

#include "lph/objective.hpp"

#include <cmath>
#include <string>

namespace lph::solvers {

template <typename Scalar>
struct AgdOptions {
  /// Also stop once the gradient norm reaches this level (roundoff floor).
  Scalar absolute_tolerance = 0;
  /// Below this gradient norm, a best value that has not halved within
  /// `stall_window` iterations is treated as the roundoff floor.
  Scalar stall_tolerance = 0;
  /// 0 selects 20 sqrt(kappa).
  Index stall_window = 0;
  /// 0 selects 100 sqrt(kappa) ln(kappa / ratio).
  Index max_iterations = 0;
};

template <typename Scalar>
struct AgdResult {
  Vector<Scalar> y;
  Index iterations = 0;
  Scalar initial_gradient_norm = 0;
  Scalar gradient_norm = 0;
  bool hit_absolute_tolerance = false;
  bool stalled = false;
};

/// Iteration cap used when AgdOptions::max_iterations is 0.
template <typename Scalar>
Index agd_iteration_cap(Scalar kappa, Scalar ratio) {
  using std::log;
  using std::sqrt;
  return Index(std::ceil(100 * sqrt(kappa) * log(kappa / ratio))) + 10;
}

/// Nesterov's constant-momentum method for an objective whose Hessian obeys
/// Q <= grad^2 g <= kappa Q with Q an orthogonal projection: step 1/kappa,
/// momentum (sqrt(kappa) - 1) / (sqrt(kappa) + 1).
///
/// Stops at the first iterate with ||grad g||^2 <= ratio ||grad g(y0)||^2 / kappa.
/// Strong convexity on range(Q) then gives g(y) - min g <= ||grad g||^2 / 2 and
/// smoothness gives g(y0) - min g >= ||grad g(y0)||^2 / (2 kappa), so the
/// returned point satisfies g(y) - min g <= ratio (g(y0) - min g).
///
/// `Objective` provides `evaluate(y)` returning {value, gradient} and
/// `project(y)` onto range(Q).
template <typename Scalar, typename Objective>
AgdResult<Scalar> agd_minimize(const Objective& obj, const Vector<Scalar>& y0, Scalar kappa, Scalar ratio,
                               const AgdOptions<Scalar>& options = {}) {
  using std::sqrt;
  if (!(kappa >= 1)) throw ParameterError("agd requires kappa >= 1");
  if (!(ratio > 0) || !(ratio < Scalar(0.5))) throw ParameterError("agd requires 0 < target_gap_ratio < 1/2");
  const Index cap = options.max_iterations > 0 ? options.max_iterations : agd_iteration_cap(kappa, ratio);
  const Scalar step = 1 / kappa;
  const Scalar root = sqrt(kappa);
  const Scalar momentum = (root - 1) / (root + 1);

  const Index window =
      options.stall_window > 0 ? options.stall_window : std::max<Index>(Index(std::ceil(20 * root)), 20);

  AgdResult<Scalar> out;
  Vector<Scalar> y = obj.project(y0);
  Vector<Scalar> x = y;
  Vector<Scalar> grad = obj.evaluate(x).gradient;
  out.initial_gradient_norm = grad.norm();
  const Scalar target = ratio * out.initial_gradient_norm * out.initial_gradient_norm / kappa;

  Vector<Scalar> best = x;
  Scalar best_norm = out.initial_gradient_norm;
  Scalar mark_norm = best_norm;
  Index mark = 0;
  for (Index k = 0;; ++k) {
    const Scalar gn = grad.norm();
    if (!std::isfinite(double(gn))) throw SolverError("agd produced a non-finite gradient");
    if (gn * gn <= target || gn <= options.absolute_tolerance) {
      out.y = std::move(x);
      out.iterations = k;
      out.gradient_norm = gn;
      out.hit_absolute_tolerance = gn * gn > target;
      return out;
    }
    if (gn < best_norm) {
      best_norm = gn;
      best = x;
    }
    if (best_norm <= mark_norm / 2) {
      mark_norm = best_norm;
      mark = k;
    } else if (k - mark >= window && best_norm <= options.stall_tolerance) {
      out.y = std::move(best);
      out.iterations = k;
      out.gradient_norm = best_norm;
      out.stalled = true;
      return out;
    }
    if (k >= cap)
      throw SolverError("agd did not converge within " + std::to_string(cap) + " iterations");
    Vector<Scalar> y_next = x - step * grad;
    x = y_next + momentum * (y_next - y);
    y = std::move(y_next);
    grad = obj.evaluate(x).gradient;
  }
}

}  // namespace lph::solvers

#endif  // LPH_AGD_HPP
