#ifndef LPH_VALIDATION_HPP
#define LPH_VALIDATION_HPP

#include "lph/homotopy.hpp"
#include "lph/objective.hpp"
#include "lph/problem.hpp"
#include "lph/smoothing.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace lph::validation {

template <typename Scalar>
struct OracleResult {
  Vector<Scalar> x_star;
  Scalar objective = 0;
  std::string method;
  Scalar certificate = 0;  // KKT residual at the final smoothing radius
  Scalar t_final = 0;
};

/// Bound the oracle certificate must meet: 1e-8 (1 + ||c|| + ||b||^{p-1}).
template <typename Scalar>
Scalar certificate_bound(const LpProblem<Scalar>& problem) {
  return Scalar(1e-8) * (1 + problem.c().norm() + std::pow(problem.b().norm(), problem.p() - 1));
}

namespace detail {

// c.x + sum f_t(Ax - b)
template <typename Scalar>
Scalar smoothed_value(const LpProblem<Scalar>& problem, Scalar t, const Vector<Scalar>& x) {
  const Vector<Scalar> s = problem.residual(x);
  Scalar total(0);
  for (Index i = 0; i < s.size(); ++i) total += smoothing::eval(t, problem.p(), s(i)).value;
  return problem.c().dot(x) + total;
}

// Damped Newton on z -> c.Vz + sum f_t(AVz - b) from x, stopping once half
// the squared Newton decrement is below 1e-12 (1 + |value|) and a few full
// polishing steps no longer reduce the gradient. Returns false on stagnation.
template <typename Scalar>
bool newton_stage(const LpProblem<Scalar>& problem, Scalar t, Vector<Scalar>& x) {
  const Matrix<Scalar>& v = problem.rowspace().basis;
  const Matrix<Scalar> av = problem.A().to_dense() * v;
  const Scalar p = problem.p();
  Vector<Scalar> second(problem.n());
  auto gradient = [&](const Vector<Scalar>& at) {
    const Vector<Scalar> s = problem.residual(at);
    Vector<Scalar> first(s.size());
    for (Index i = 0; i < s.size(); ++i) {
      const smoothing::Derivatives<Scalar> f = smoothing::eval(t, p, s(i));
      first(i) = f.first;
      second(i) = f.second;
    }
    return Vector<Scalar>(v.transpose() * problem.c() + av.transpose() * first);
  };
  int polish = 0;
  for (int it = 0; it < 500; ++it) {
    const Vector<Scalar> g = gradient(x);
    const Matrix<Scalar> hess = av.transpose() * second.asDiagonal() * av;
    const Eigen::LDLT<Matrix<Scalar>> ldlt(hess);
    if (ldlt.info() != Eigen::Success) return false;
    const Vector<Scalar> dz = -ldlt.solve(g);
    const Scalar decrement = -g.dot(dz);
    if (!std::isfinite(double(decrement))) return false;
    const Vector<Scalar> dx = v * dz;
    const Scalar f0 = smoothed_value(problem, t, x);
    if (decrement / 2 <= Scalar(1e-12) * (1 + std::abs(f0))) {
      if (polish++ >= 3) return true;
      const Vector<Scalar> trial = x + dx;
      if (!(gradient(trial).norm() < g.norm())) return true;
      x = trial;
      continue;
    }
    Scalar step = 1;
    bool moved = false;
    for (int ls = 0; ls < 60 && !moved; ++ls, step /= 2) {
      const Vector<Scalar> trial = x + step * dx;
      if (smoothed_value(problem, t, trial) <= f0 - Scalar(0.25) * step * decrement) {
        x = trial;
        moved = true;
      }
    }
    if (!moved) return false;
  }
  return false;
}

// Minimize c.x + ||Ax - b||_p^p by normalized subgradient steps, keeping the best iterate.
template <typename Scalar>
Vector<Scalar> subgradient_solve(const LpProblem<Scalar>& problem, Vector<Scalar> x, long steps) {
  const Scalar p = problem.p();
  Vector<Scalar> best = x;
  Scalar best_value = objective(problem, x);
  const Scalar scale = 1 / (1 + problem.A().to_dense().squaredNorm());
  for (long k = 0; k < steps; ++k) {
    const Vector<Scalar> s = problem.residual(x);
    Vector<Scalar> w(s.size());
    for (Index i = 0; i < s.size(); ++i)
      w(i) = p * std::pow(std::abs(s(i)), p - 1) * (s(i) > 0 ? 1 : (s(i) < 0 ? -1 : 0));
    Vector<Scalar> g = problem.rowspace().project(problem.c() + problem.A().apply_transpose(w));
    const Scalar gn = g.norm();
    if (gn == 0) break;
    x -= scale / std::sqrt(Scalar(k + 1)) * g / gn;
    const Scalar val = objective(problem, x);
    if (val < best_value) {
      best_value = val;
      best = x;
    }
  }
  return best;
}

}  // namespace detail

/// Independent minimizer: damped Newton on the smoothed objective with
/// continuation t = ||b|| + 1, halved down to termination_t(epsilon/2, n, p).
/// Shares only the f_t formulas with the homotopy solver.
template <typename Scalar>
OracleResult<Scalar> reference_solve(const LpProblem<Scalar>& problem, Scalar epsilon) {
  const Scalar t_end = homotopy::termination_t(epsilon / 2, problem.n(), problem.p());
  OracleResult<Scalar> out;
  out.method = "newton";
  Vector<Scalar> x = Vector<Scalar>::Zero(problem.d());
  Scalar t = std::max(problem.b().norm() + 1, t_end);
  bool ok = true;
  for (;;) {
    if (!detail::newton_stage(problem, t, x)) {
      ok = false;
      break;
    }
    if (t <= t_end) break;
    t = std::max(t / 2, t_end);
  }
  if (!ok) {
    if (problem.d() > 3) throw SolverError("reference_solve: Newton stagnated at t = " + std::to_string(double(t)));
    x = detail::subgradient_solve(problem, x, 1000000);
    out.method = "subgradient";
  }
  out.x_star = problem.rowspace().project(x);
  out.objective = objective(problem, out.x_star);
  out.t_final = t_end;
  out.certificate = homotopy::kkt_residual(problem, t_end, out.x_star);
  return out;
}

/// Root of a nondecreasing scalar function on [lo, hi], 200 bisection steps.
template <typename Scalar, typename F>
Scalar bisect(F&& f, Scalar lo, Scalar hi, int iterations = 200) {
  for (int k = 0; k < iterations; ++k) {
    const Scalar mid = lo + (hi - lo) / 2;
    if (f(mid) > 0)
      hi = mid;
    else
      lo = mid;
  }
  return lo + (hi - lo) / 2;
}

namespace detail {

template <typename Scalar>
void check_scalar(const LpProblem<Scalar>& problem) {
  if (problem.d() != 1) throw DimensionError("A", "the bisection oracle needs d = 1");
}

template <typename Scalar, typename F>
Scalar bisect_bracketed(const LpProblem<Scalar>& problem, F&& f) {
  Scalar r = problem.b().norm() + problem.c().norm() + 1;
  for (int k = 0; k < 200 && !(f(-r) <= 0 && f(r) >= 0); ++k) r *= 2;
  return bisect<Scalar>(f, -r, r);
}

}  // namespace detail

/// x(t) for d = 1 by bisection on c + sum a_i f_t'(a_i x - b_i).
template <typename Scalar>
Scalar bisection_path_point(const LpProblem<Scalar>& problem, Scalar t) {
  detail::check_scalar(problem);
  const Vector<Scalar> a = problem.A().to_dense().col(0);
  const Scalar c = problem.c()(0);
  auto f = [&](Scalar x) {
    Scalar total = c;
    for (Index i = 0; i < a.size(); ++i) total += a(i) * smoothing::eval(t, problem.p(), a(i) * x - problem.b()(i)).first;
    return total;
  };
  return detail::bisect_bracketed(problem, f);
}

/// Minimizer of c x + sum |a_i x - b_i|^p for d = 1 by bisection on the derivative.
template <typename Scalar>
Scalar bisection_minimizer(const LpProblem<Scalar>& problem) {
  detail::check_scalar(problem);
  const Vector<Scalar> a = problem.A().to_dense().col(0);
  const Scalar c = problem.c()(0);
  const Scalar p = problem.p();
  auto f = [&](Scalar x) {
    Scalar total = c;
    for (Index i = 0; i < a.size(); ++i) {
      const Scalar s = a(i) * x - problem.b()(i);
      total += a(i) * p * std::pow(std::abs(s), p - 1) * (s > 0 ? 1 : (s < 0 ? -1 : 0));
    }
    return total;
  };
  return detail::bisect_bracketed(problem, f);
}

/// Central differences, one coordinate at a time.
template <typename Scalar>
Vector<Scalar> finite_diff_gradient(const std::function<Scalar(const Vector<Scalar>&)>& f, const Vector<Scalar>& x,
                                    Scalar step) {
  if (!(step > 0)) throw ParameterError("finite difference step must be positive");
  Vector<Scalar> g(x.size());
  Vector<Scalar> probe = x;
  for (Index j = 0; j < x.size(); ++j) {
    probe(j) = x(j) + step;
    const Scalar up = f(probe);
    probe(j) = x(j) - step;
    const Scalar down = f(probe);
    probe(j) = x(j);
    g(j) = (up - down) / (2 * step);
  }
  return g;
}

template <typename Scalar>
struct SandwichResult {
  Scalar min_ratio = 0;
  Scalar max_ratio = 0;
  Index samples = 0;
};

/// Extreme eigenvalues of grad^2 g(y) restricted to range(Q) at `samples`
/// random y. Since Q is an orthogonal projection these are the generalized
/// Rayleigh ratios of (grad^2 g, Q) on its range. The perturbations are
/// log-uniform in size around the D-weighted band width so that residuals
/// land both inside and outside their extension intervals.
template <typename Scalar>
SandwichResult<Scalar> hessian_sandwich_check(
    const solvers::PreconditionedObjective<Scalar, solvers::DensePreconditioner<Scalar>>& obj, Index samples,
    std::uint64_t seed, const Vector<Scalar>& weights) {
  if (obj.dim() > 200) throw DimensionError("A", "hessian_sandwich_check needs d <= 200");
  const PsdSpectrum<Scalar> range(obj.preconditioner().projector());
  const Matrix<Scalar>& basis = range.basis;
  const auto& loss = obj.loss();
  const Vector<Scalar> width = loss.band_upper() - loss.band_lower();
  const Scalar rho0 = std::max((weights.cwiseSqrt().cwiseProduct(width)).norm(), Scalar(1e-12));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> expo(-2.0, 1.0);

  SandwichResult<Scalar> out;
  out.min_ratio = std::numeric_limits<Scalar>::infinity();
  out.max_ratio = -std::numeric_limits<Scalar>::infinity();
  for (Index k = 0; k < samples; ++k) {
    Vector<Scalar> u(basis.cols());
    for (Index j = 0; j < u.size(); ++j) u(j) = Scalar(normal(rng));
    Vector<Scalar> y = basis * u;
    if (k > 0 && y.norm() > 0) y *= rho0 * Scalar(std::pow(10.0, expo(rng))) / y.norm();
    else y.setZero();
    const Matrix<Scalar> h = solvers::dense_hessian(obj, y);
    const Matrix<Scalar> reduced = basis.transpose() * h * basis;
    const Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(reduced, Eigen::EigenvaluesOnly);
    out.min_ratio = std::min(out.min_ratio, eig.eigenvalues().minCoeff());
    out.max_ratio = std::max(out.max_ratio, eig.eigenvalues().maxCoeff());
    ++out.samples;
  }
  return out;
}

template <typename Scalar>
struct PathSpeedReport {
  Scalar max_violation_ratio = 0;  // max over grid and rows of |ds_i/dt| / bound_i
  Scalar max_speed = 0;            // max |ds_i/dt| observed
  Index points = 0;
};

/// Finite-difference ds/dt along the d = 1 path, delta = 1e-4 relative,
/// against (p^2/(p-1)) sqrt(n) (t/|s_i|)^{(p-2)/2}.
template <typename Scalar>
PathSpeedReport<Scalar> path_speed_check(const LpProblem<Scalar>& problem, const std::vector<Scalar>& t_grid) {
  detail::check_scalar(problem);
  const Vector<Scalar> a = problem.A().to_dense().col(0);
  const Scalar p = problem.p();
  const Scalar delta = Scalar(1e-4);
  const Scalar lead = p * p / (p - 1) * std::sqrt(Scalar(problem.n()));
  PathSpeedReport<Scalar> out;
  for (const Scalar t : t_grid) {
    const Scalar x = bisection_path_point(problem, t);
    const Scalar up = bisection_path_point(problem, t * (1 + delta));
    const Scalar down = bisection_path_point(problem, t * (1 - delta));
    const Scalar dxdt = (up - down) / (2 * t * delta);
    for (Index i = 0; i < a.size(); ++i) {
      const Scalar s = a(i) * x - problem.b()(i);
      const Scalar speed = std::abs(a(i) * dxdt);
      out.max_speed = std::max(out.max_speed, speed);
      if (speed == 0) continue;
      const Scalar bound = lead * std::pow(t / std::abs(s), (p - 2) / 2);
      out.max_violation_ratio = std::max(out.max_violation_ratio, speed / bound);
    }
    ++out.points;
  }
  return out;
}

}  // namespace lph::validation

#endif  // LPH_VALIDATION_HPP
