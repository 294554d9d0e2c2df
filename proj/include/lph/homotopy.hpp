#ifndef LPH_HOMOTOPY_HPP
#define LPH_HOMOTOPY_HPP

#include "lph/agd.hpp"
#include "lph/katyusha.hpp"
#include "lph/objective.hpp"
#include "lph/problem.hpp"
#include "lph/smoothing.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace lph::homotopy {

/// gamma = (1 + p^3/(p-1) sqrt(n) h) t^{p/2}
template <typename Scalar>
Scalar gamma(Scalar t, Scalar p, Scalar h, Index n) {
  using std::pow;
  using std::sqrt;
  if (!(h >= 0) || h > 1 / (2 * p)) throw ParameterError("gamma requires 0 <= h <= 1/(2p)");
  return (1 + p * p * p / (p - 1) * sqrt(Scalar(n)) * h) * pow(t, p / 2);
}

/// kappa = (2p^2/(p-1)) (3 + 2p^3/(p-1) sqrt(n) h)^{|2 - 4/p|}
template <typename Scalar>
Scalar kappa(Scalar p, Scalar h, Index n) {
  using std::abs;
  using std::pow;
  using std::sqrt;
  if (!(h >= 0) || h > 1 / (2 * p)) throw ParameterError("kappa requires 0 <= h <= 1/(2p)");
  return 2 * p * p / (p - 1) * pow(3 + 2 * p * p * p / (p - 1) * sqrt(Scalar(n)) * h, abs(2 - 4 / p));
}

/// D_i = (p-1)/2 max(t^{p/2}, |s_i|^{p/2} - sign(p-2) gamma)^{2-4/p}
template <typename Scalar>
Vector<Scalar> diag_Dt(const Vector<Scalar>& s, Scalar t, Scalar p, Scalar gamma) {
  using std::abs;
  using std::max;
  using std::pow;
  const Scalar sign = p > 2 ? Scalar(1) : (p < 2 ? Scalar(-1) : Scalar(0));
  const Scalar floor = pow(t, p / 2);
  Vector<Scalar> out(s.size());
  for (Index i = 0; i < s.size(); ++i)
    out(i) = (p - 1) / 2 * pow(max(floor, pow(abs(s(i)), p / 2) - sign * gamma), 2 - 4 / p);
  return out;
}

template <typename Scalar>
bool in_neighborhood(const Vector<Scalar>& s_new, const Vector<Scalar>& s_ref, Scalar gamma, Scalar p) {
  using std::abs;
  using std::pow;
  if (s_new.size() != s_ref.size()) throw DimensionError("s_new", "length does not match the reference residual");
  for (Index i = 0; i < s_new.size(); ++i)
    if (abs(pow(abs(s_new(i)), p / 2) - pow(abs(s_ref(i)), p / 2)) > gamma) return false;
  return true;
}

/// Smoothing radius below which x(t) is epsilon-optimal: (epsilon/(n p))^{1/p}.
template <typename Scalar>
Scalar termination_t(Scalar epsilon, Index n, Scalar p) {
  if (!(epsilon > 0)) throw ParameterError("epsilon must be positive");
  return std::pow(epsilon / (Scalar(n) * p), 1 / p);
}

/// c^T (A^T A)^dagger c
template <typename Scalar>
Scalar c_gram_c(const LpProblem<Scalar>& problem) {
  return problem.c().dot(problem.rowspace().gram_pinv_apply(problem.c()));
}

template <typename Scalar>
Scalar initial_t0(const LpProblem<Scalar>& problem) {
  const Scalar p = problem.p();
  const Scalar from_c = std::pow(2 * c_gram_c(problem), 1 / (p - 1));
  const Scalar t0 = std::max(from_c, 2 * problem.b().norm());
  return t0 > 0 ? t0 : Scalar(1);
}

/// Lemma 4's closed form x(t) = (A^T A)^dagger A^T b - (1/p) t^{2-p} (A^T A)^dagger c.
///
/// Refuses unless t^{p-1} > 1.01 (2/p) c^T (A^T A)^dagger c, t > 1.01 * 2 ||b||
/// and every residual lies in the quadratic region |s_i| < t.
template <typename Scalar>
Vector<Scalar> initial_point(const LpProblem<Scalar>& problem, Scalar t) {
  using std::pow;
  const Scalar p = problem.p();
  const Scalar margin = Scalar(1.01);
  const Scalar cgc = c_gram_c(problem);
  const Scalar bn = problem.b().norm();
  const bool ok_c = pow(t, p - 1) > margin * (2 / p) * cgc || cgc == 0;
  const bool ok_b = t > margin * 2 * bn || bn == 0;
  if (!(t > 0) || !ok_c || !ok_b)
    throw ParameterError("initial_point: t = " + std::to_string(double(t)) +
                         " violates t^{p-1} > (2/p) c^T (A^T A)^+ c or t > 2 ||b||; enlarge t");
  const RowSpace<Scalar>& rs = problem.rowspace();
  const Vector<Scalar> x =
      rs.gram_pinv_apply(problem.A().apply_transpose(problem.b())) - pow(t, 2 - p) / p * rs.gram_pinv_apply(problem.c());
  const Vector<Scalar> s = problem.residual(x);
  if (!(s.cwiseAbs().maxCoeff() < t))
    throw ParameterError("initial_point: residual leaves the quadratic region at t = " + std::to_string(double(t)) +
                         "; enlarge t");
  return x;
}

/// c + A^T f_t'(Ax - b), projected onto row-space(A).
template <typename Scalar>
Vector<Scalar> kkt_vector(const LpProblem<Scalar>& problem, Scalar t, const Vector<Scalar>& x) {
  const Vector<Scalar> s = problem.residual(x);
  Vector<Scalar> slope(s.size());
  for (Index i = 0; i < s.size(); ++i) slope(i) = smoothing::eval(t, problem.p(), s(i)).first;
  return problem.rowspace().project(problem.c() + problem.A().apply_transpose(slope));
}

template <typename Scalar>
Scalar kkt_residual(const LpProblem<Scalar>& problem, Scalar t, const Vector<Scalar>& x) {
  if (!(t > 0)) throw ParameterError("kkt_residual requires t > 0");
  return kkt_vector(problem, t, x).norm();
}

/// dx/dt = -(A^T H_t A)^dagger A^T (d/dt f_t')(s), H_t = diag f_t''(s).
template <typename Scalar>
Vector<Scalar> path_velocity(const LpProblem<Scalar>& problem, Scalar t, const Vector<Scalar>& x) {
  const Vector<Scalar> s = problem.residual(x);
  Vector<Scalar> h(s.size()), dt(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    const smoothing::Derivatives<Scalar> f = smoothing::eval(t, problem.p(), s(i));
    h(i) = f.second;
    dt(i) = f.dt_of_first;
  }
  return -(pinv_symmetric<Scalar>(problem.A().weighted_gram(h)) * problem.A().apply_transpose(dt));
}

enum class SolverKind { agd_dense, agd_sparse, katyusha };

inline std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::agd_dense: return "agd-dense";
    case SolverKind::agd_sparse: return "agd-sparse";
    case SolverKind::katyusha: return "katyusha";
  }
  return "unknown";
}

inline SolverKind parse_solver_kind(const std::string& name) {
  if (name == "agd-dense" || name == "agd_dense") return SolverKind::agd_dense;
  if (name == "agd-sparse" || name == "agd_sparse") return SolverKind::agd_sparse;
  if (name == "katyusha") return SolverKind::katyusha;
  throw ParameterError("unknown solver '" + name + "' (expected agd-dense, agd-sparse or katyusha)");
}

struct HomotopyConfig {
  double epsilon = 1e-6;
  SolverKind solver_kind = SolverKind::agd_dense;
  int inner_tolerance_exponent = 6;
  Index max_phases = 100000;
  std::uint64_t seed = 0;
};

template <typename Scalar>
struct HomotopyState {
  Index k = 0;
  Scalar t = 0;
  Vector<Scalar> x;
  Vector<Scalar> s;
  Scalar gamma = 0;
  Vector<Scalar> D;
  Scalar kappa = 0;
};

/// Phase quantities at (t, x) with h = 1/(2p).
template <typename Scalar>
HomotopyState<Scalar> make_state(const LpProblem<Scalar>& problem, Index k, Scalar t, Vector<Scalar> x) {
  const Scalar p = problem.p();
  const Scalar h = 1 / (2 * p);
  HomotopyState<Scalar> st;
  st.k = k;
  st.t = t;
  st.s = problem.residual(x);
  st.x = std::move(x);
  st.gamma = gamma(t, p, h, problem.n());
  st.D = diag_Dt(st.s, t, p, st.gamma);
  st.kappa = kappa(p, h, problem.n());
  return st;
}

template <typename Scalar>
struct PhaseRecord {
  Index k = 0;
  Scalar t_k = 0;
  Index inner_iterations = 0;
  Scalar objective = 0;
  Scalar kkt_residual = 0;
  double wall_ms = 0;
  bool in_neighborhood = true;
  Scalar kappa = 0;
};

template <typename Scalar>
struct SolveReport {
  Index n = 0, d = 0, nnz = 0;
  Scalar p = 0;
  Scalar epsilon = 0;
  Scalar t0 = 0;
  Scalar t_final = 0;
  SolverKind solver_kind = SolverKind::agd_dense;
  std::vector<PhaseRecord<Scalar>> phases;
  Vector<Scalar> final_x;
  Scalar final_objective = 0;
  double total_wall_ms = 0;
  std::uint64_t seed = 0;
};

/// Raised by `run`; carries the phases completed so far.
template <typename Scalar>
class HomotopyError : public SolverError {
 public:
  HomotopyError(const std::string& what, SolveReport<Scalar> partial)
      : SolverError(what), partial_(std::move(partial)) {}
  const SolveReport<Scalar>& partial() const noexcept { return partial_; }

 private:
  SolveReport<Scalar> partial_;
};

/// Relative gap target for the inner solves: n^{-exponent}, never looser than 1e-8.
template <typename Scalar>
Scalar inner_ratio(Index n, int exponent) {
  return std::min(std::pow(Scalar(n), -Scalar(exponent)), Scalar(1e-8));
}

namespace detail {

// Multiples of the estimated rounding level: stop outright below the first,
// accept a stall below the second.
inline constexpr double kFloorStop = 100;
inline constexpr double kFloorStall = 1e4;

template <typename Scalar>
struct InnerResult {
  Vector<Scalar> x;
  Index iterations = 0;
};

// Gradient norm at which rounding dominates: the residual s = Ax - b carries
// an error of about eps (|A||x| + |b|), which the curvature of tilde-f
// turns into an error of P^T A^T (tilde-f'' eps (|A||x| + |b|)) in the gradient.
template <typename Scalar, typename Obj>
Scalar roundoff_floor(const Obj& obj, const Vector<Scalar>& y0) {
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const auto& problem = obj.problem();
  const Vector<Scalar> x = obj.x_of(y0);
  const Vector<Scalar> s = obj.residual_of(y0);
  const Vector<Scalar> scale = problem.A().apply_abs(x - obj.anchor()) + s.cwiseAbs();
  Vector<Scalar> noise(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    const smoothing::Extended<Scalar> e = obj.coordinate(i, s(i));
    noise(i) = e.second * scale(i) + std::abs(e.first);
  }
  const Scalar coherent = obj.preconditioner().apply_transpose(problem.A().apply_transpose(noise)).norm();
  return eps * (coherent + obj.c_image().norm());
}

template <typename Scalar, typename Precond>
InnerResult<Scalar> agd_phase(const LpProblem<Scalar>& problem, const HomotopyState<Scalar>& st,
                              const smoothing::SmoothedLoss<Scalar>& loss, const Precond& pre, Scalar ratio) {
  const Scalar h = 1 / (2 * problem.p());
  const solvers::PreconditionedObjective<Scalar, Precond> obj(problem, loss, h, pre, st.x);
  const Vector<Scalar> y0 = Vector<Scalar>::Zero(obj.dim());
  solvers::AgdOptions<Scalar> opt;
  const Scalar floor = roundoff_floor<Scalar>(obj, y0);
  opt.absolute_tolerance = kFloorStop * floor;
  opt.stall_tolerance = kFloorStall * floor;
  const solvers::AgdResult<Scalar> r = solvers::agd_minimize(obj, y0, st.kappa, ratio, opt);
  return {obj.x_of(r.y), r.iterations};
}

template <typename Scalar>
InnerResult<Scalar> katyusha_phase(const LpProblem<Scalar>& problem, const HomotopyState<Scalar>& st,
                                   const smoothing::SmoothedLoss<Scalar>& loss, Scalar ratio, std::uint64_t seed) {
  const Scalar h = 1 / (2 * problem.p());
  const solvers::SparsifyResult<Scalar> w = solvers::sparsify_with_retries(problem.A(), st.D, seed);
  const solvers::SketchedPreconditioner<Scalar> pre(problem.A(), w.weights);
  const solvers::PreconditionedObjective<Scalar, solvers::SketchedPreconditioner<Scalar>> obj(problem, loss, h, pre,
                                                                                              st.x);
  const solvers::SmoothnessConstants<Scalar> sc = solvers::smoothness_constants(problem.A(), st.D, w.weights, st.kappa);
  const Index batch = solvers::batch_size(problem.n(), problem.d(), problem.nnz(), double(st.kappa));
  const Vector<Scalar> y0 = Vector<Scalar>::Zero(obj.dim());
  solvers::KatyushaOptions<Scalar> opt;
  const Scalar floor = roundoff_floor<Scalar>(obj, y0);
  opt.absolute_tolerance = kFloorStop * floor;
  opt.stall_tolerance = kFloorStall * floor;
  const solvers::KatyushaResult<Scalar> r =
      solvers::katyusha_minimize(obj, y0, batch, sc.sigma, sc.L, sc.Li, ratio, seed ^ 0x9e3779b97f4a7c15ULL, opt);
  return {obj.x_of(r.y), r.steps};
}

}  // namespace detail

/// The continuation loop: t_{k+1} = (1 - 1/(2p)) t_k from the Lemma 4 start
/// until t_k <= termination_t(epsilon, n, p), each phase minimizing the
/// preconditioned g_{t_k} from the previous path point.
template <typename Scalar>
SolveReport<Scalar> run(const LpProblem<Scalar>& problem, const HomotopyConfig& config) {
  using clock = std::chrono::steady_clock;
  if (!(config.epsilon > 0)) throw ParameterError("epsilon must be positive");
  if (config.max_phases < 1) throw ParameterError("max_phases must be at least 1");
  if (config.inner_tolerance_exponent < 1) throw ParameterError("inner_tolerance_exponent must be positive");
  const auto start = clock::now();
  const Scalar p = problem.p();
  const Scalar h = 1 / (2 * p);
  const Scalar eps = Scalar(config.epsilon);

  SolveReport<Scalar> report;
  report.n = problem.n();
  report.d = problem.d();
  report.nnz = problem.nnz();
  report.p = p;
  report.epsilon = eps;
  report.solver_kind = config.solver_kind;
  report.seed = config.seed;

  Scalar t = initial_t0(problem);
  Vector<Scalar> x;
  for (int doubling = 0;; ++doubling) {
    try {
      x = initial_point(problem, t);
      break;
    } catch (const ParameterError&) {
      if (doubling >= 64) throw;
      t *= 2;
    }
  }
  report.t0 = t;

  const Scalar t_end = termination_t(eps, problem.n(), p);
  const Scalar ratio = inner_ratio<Scalar>(problem.n(), config.inner_tolerance_exponent);
  auto finish = [&]() {
    report.t_final = t;
    report.final_x = x;
    report.final_objective = objective(problem, x);
    report.total_wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
  };

  for (Index k = 0; t > t_end; ++k) {
    if (k >= config.max_phases) {
      finish();
      throw HomotopyError<Scalar>("homotopy exceeded max_phases = " + std::to_string(config.max_phases), report);
    }
    const auto phase_start = clock::now();
    const HomotopyState<Scalar> st = make_state(problem, k, t, x);
    const smoothing::SmoothedLoss<Scalar> loss(t, p, st.s, st.gamma);

    detail::InnerResult<Scalar> inner;
    try {
      switch (config.solver_kind) {
        case SolverKind::agd_dense: {
          const solvers::DensePreconditioner<Scalar> pre(problem.A(), st.D);
          inner = detail::agd_phase(problem, st, loss, pre, ratio);
          break;
        }
        case SolverKind::agd_sparse: {
          const solvers::FactoredPreconditioner<Scalar> pre(problem.A(), st.D);
          inner = detail::agd_phase(problem, st, loss, pre, ratio);
          break;
        }
        case SolverKind::katyusha:
          inner = detail::katyusha_phase(problem, st, loss, ratio, config.seed + std::uint64_t(k) * 1000003ULL);
          break;
      }
    } catch (const SolverError& e) {
      finish();
      throw HomotopyError<Scalar>("phase " + std::to_string(k) + ": " + e.what(), report);
    }

    const Vector<Scalar> x_next = problem.rowspace().project(inner.x);
    const Scalar t_next = (1 - h) * t;
    PhaseRecord<Scalar> rec;
    rec.k = k;
    rec.t_k = t;
    rec.inner_iterations = inner.iterations;
    rec.objective = objective(problem, x_next);
    rec.kkt_residual = kkt_residual(problem, t_next, x_next);
    rec.in_neighborhood = in_neighborhood(problem.residual(x_next), st.s, st.gamma, p);
    rec.kappa = st.kappa;
    rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - phase_start).count();
    report.phases.push_back(rec);

    x = x_next;
    t = t_next;
  }
  finish();
  return report;
}

}  // namespace lph::homotopy

#endif  // LPH_HOMOTOPY_HPP
