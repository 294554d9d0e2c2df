#ifndef LPH_KATYUSHA_HPP
#define LPH_KATYUSHA_HPP

#include "lph/objective.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace lph::solvers {

template <typename Scalar>
struct SmoothnessConstants {
  Scalar L;           // smoothness of F = sum_i F_i
  Scalar sigma;       // strong convexity of F on the range of the sketched projection
  Vector<Scalar> Li;  // smoothness of each F_i
};

/// L = 2 kappa and L_i = 2 kappa tau_i with tau the D-weighted leverage
/// scores. sigma is the reciprocal of the largest eigenvalue of
/// (A^T W A, A^T D A), which is 1 for W = D and at least 1/2 for any
/// accepted sparsifier.
template <typename Scalar>
SmoothnessConstants<Scalar> smoothness_constants(const DesignMatrix<Scalar>& a, const Vector<Scalar>& weights,
                                                 const Vector<Scalar>& sketch, Scalar kappa) {
  const Vector<Scalar> tau = leverage_scores(a, weights);
  const auto [lo, hi] = pencil_extremes<Scalar>(a.weighted_gram(sketch), a.weighted_gram(weights));
  (void)lo;
  const Scalar sigma = hi > 0 ? Scalar(1) / hi : Scalar(1);
  return {2 * kappa, sigma, 2 * kappa * tau};
}

/// Mini-batch size balancing the sampled-row cost against the d^2 work per
/// step, clamped to [1, n].
inline Index batch_size(Index n, Index d, Index nnz, double kappa) {
  const double nn = double(n), dd = double(d), z = double(std::max<Index>(nnz, 1));
  double b = 0;
  if (kappa * dd >= nn)
    b = std::ceil(std::sqrt(std::pow(nn, 1.5) * std::pow(dd, 2.5) / z));
  else
    b = std::ceil(std::sqrt(nn * nn * dd * dd / (z * std::sqrt(kappa))));
  return std::clamp<Index>(Index(b), 1, n);
}

template <typename Scalar>
struct KatyushaOptions {
  Scalar absolute_tolerance = 0;
  /// Below this snapshot gradient norm, a best value that has not halved
  /// within `stall_window` steps is treated as the roundoff floor.
  Scalar stall_tolerance = 0;
  /// 0 selects 20 (n/b + sqrt(L/sigma) + sqrt(n sum L_i / sigma) / b).
  Index stall_window = 0;
  /// 0 selects 100 times the mini-batch complexity bound.
  Index max_steps = 0;
};

template <typename Scalar>
struct KatyushaResult {
  Vector<Scalar> y;
  Index epochs = 0;
  Index steps = 0;
  Index rows_touched = 0;    // rows of A read inside stochastic steps
  Index min_rows_per_step = 0;
  Index max_rows_per_step = 0;
  Index full_passes = 0;     // snapshot gradients, each reading every row once
  Scalar initial_gradient_norm = 0;
  Scalar gradient_norm = 0;
  bool hit_absolute_tolerance = false;
  bool stalled = false;
};

/// Step budget (n/b + sqrt(L/sigma) + sqrt(n sum L_i / sigma) / b) ln(1/ratio).
template <typename Scalar>
Scalar katyusha_step_bound(Index n, Index batch, Scalar sigma, Scalar L, Scalar sum_li, Scalar ratio) {
  using std::log;
  using std::sqrt;
  const Scalar nb = Scalar(n) / Scalar(batch);
  return (nb + sqrt(L / sigma) + sqrt(Scalar(n) * sum_li / sigma) / Scalar(batch)) * log(1 / ratio);
}

/// Mini-batch Katyusha on F(y) = sum_i F_i(y) with
///   F_i(y) = (1/n) c . P'' y + tilde-f_i(a_i . P'' y - b_i).
///
/// Rows are sampled with replacement with probability proportional to L_i.
/// Each epoch starts from a full snapshot gradient; the run stops at the
/// first snapshot with ||grad F||^2 <= ratio (sigma / L) ||grad F(y0)||^2,
/// which certifies F(y) - min F <= ratio (F(y0) - min F).
template <typename Scalar>
KatyushaResult<Scalar> katyusha_minimize(const PreconditionedObjective<Scalar, SketchedPreconditioner<Scalar>>& obj,
                                         const Vector<Scalar>& y0, Index batch, Scalar sigma, Scalar L,
                                         const Vector<Scalar>& Li, Scalar ratio, std::uint64_t seed,
                                         const KatyushaOptions<Scalar>& options = {}) {
  using std::sqrt;
  const LpProblem<Scalar>& problem = obj.problem();
  const DesignMatrix<Scalar>& a = problem.A();
  const SketchedPreconditioner<Scalar>& pre = obj.preconditioner();
  const Index n = problem.n();
  if (batch < 1) throw ParameterError("batch size must be positive");
  if (Li.size() != n) throw DimensionError("Li", "length does not match the rows of A");
  if (!(sigma > 0) || !(L > 0)) throw ParameterError("katyusha requires sigma > 0 and L > 0");
  if (!(ratio > 0) || !(ratio < Scalar(0.5))) throw ParameterError("katyusha requires 0 < target_gap_ratio < 1/2");

  const Scalar sum_li = Li.sum();
  KatyushaResult<Scalar> out;

  // Full gradient of F at y; also records tilde-f_i' at every row.
  Vector<Scalar> snapshot_slope(n);
  auto full_gradient = [&](const Vector<Scalar>& y) {
    ++out.full_passes;
    const Vector<Scalar> s = obj.residual_of(y);
    for (Index i = 0; i < n; ++i) snapshot_slope(i) = obj.coordinate(i, s(i)).first;
    return Vector<Scalar>(pre.apply_transpose(problem.c() + a.apply_transpose(snapshot_slope)));
  };

  Vector<Scalar> snapshot = pre.project(y0);
  Vector<Scalar> grad = full_gradient(snapshot);
  out.initial_gradient_norm = grad.norm();
  const Scalar target = ratio * (sigma / L) * out.initial_gradient_norm * out.initial_gradient_norm;
  if (!(sum_li > 0)) {
    out.y = snapshot;
    out.gradient_norm = out.initial_gradient_norm;
    return out;
  }

  // Average form f = F / n.
  const Scalar sigma_f = sigma / Scalar(n);
  const Scalar l_eff = (L + sum_li / Scalar(batch)) / Scalar(n);
  const Index inner = std::max<Index>(1, (2 * n + batch - 1) / batch);
  const Scalar tau2 = Scalar(0.5);
  const Scalar tau1 = std::min(sqrt(Scalar(inner) * sigma_f / (3 * l_eff)), Scalar(0.5));
  const Scalar alpha = 1 / (3 * tau1 * l_eff);
  const Scalar growth = 1 + alpha * sigma_f;

  const Index cap = options.max_steps > 0
                        ? options.max_steps
                        : Index(std::ceil(100 * katyusha_step_bound(n, batch, sigma, L, sum_li, ratio))) + inner;
  const Index window = options.stall_window > 0
                           ? options.stall_window
                           : Index(std::ceil(20 * katyusha_step_bound(n, batch, sigma, L, sum_li, std::exp(Scalar(-1)))));

  std::vector<double> prob(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) prob[std::size_t(i)] = double(std::max(Li(i), Scalar(0)) / sum_li);
  std::discrete_distribution<Index> pick(prob.begin(), prob.end());
  std::mt19937_64 rng(seed);

  Vector<Scalar> z = snapshot;
  Vector<Scalar> y = snapshot;
  Vector<Scalar> sum(snapshot.size());
  Vector<Scalar> v(problem.d());

  Vector<Scalar> best = snapshot;
  Scalar best_norm = out.initial_gradient_norm;
  Scalar mark_norm = best_norm;
  Index mark = 0;
  for (;;) {
    const Scalar gn = grad.norm();
    if (!std::isfinite(double(gn))) throw SolverError("katyusha produced a non-finite gradient");
    if (gn * gn <= target || gn <= options.absolute_tolerance) {
      out.y = snapshot;
      out.gradient_norm = gn;
      out.hit_absolute_tolerance = gn * gn > target;
      return out;
    }
    if (gn < best_norm) {
      best_norm = gn;
      best = snapshot;
    }
    if (best_norm <= mark_norm / 2) {
      mark_norm = best_norm;
      mark = out.steps;
    } else if (out.steps - mark >= window && best_norm <= options.stall_tolerance) {
      out.y = best;
      out.gradient_norm = best_norm;
      out.stalled = true;
      return out;
    }
    if (out.steps >= cap)
      throw SolverError("katyusha did not converge within " + std::to_string(cap) + " steps");

    const Vector<Scalar> mu = grad / Scalar(n);
    const Vector<Scalar> slope_at_snapshot = snapshot_slope;
    sum.setZero();
    Scalar weight_sum = 0;
    Scalar weight = 1;
    for (Index j = 0; j < inner; ++j) {
      const Index touched_before = out.rows_touched;
      const Vector<Scalar> point = tau1 * z + tau2 * snapshot + (1 - tau1 - tau2) * y;
      const Vector<Scalar> u = pre.apply(point);
      v.setZero();
      for (Index k = 0; k < batch; ++k) {
        const Index i = pick(rng);
        ++out.rows_touched;
        const Scalar r = obj.anchor_residual()(i) + a.row_dot(i, u);
        const Scalar delta = obj.coordinate(i, r).first - slope_at_snapshot(i);
        a.add_row(i, delta / (Scalar(prob[std::size_t(i)]) * Scalar(batch) * Scalar(n)), v);
      }
      const Vector<Scalar> estimate = mu + pre.apply_transpose(v);
      z -= alpha * estimate;
      y = point - estimate / (3 * l_eff);
      sum += weight * y;
      weight_sum += weight;
      weight *= growth;
      const Index touched = out.rows_touched - touched_before;
      out.min_rows_per_step = out.steps == 0 ? touched : std::min(out.min_rows_per_step, touched);
      out.max_rows_per_step = std::max(out.max_rows_per_step, touched);
      ++out.steps;
    }
    snapshot = sum / weight_sum;
    ++out.epochs;
    grad = full_gradient(snapshot);
  }
}

}  // namespace lph::solvers

#endif  // LPH_KATYUSHA_HPP
