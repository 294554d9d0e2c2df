#include "lph/suite.hpp"

#include "lph/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace lph::validation {
namespace {

using V = Vector<double>;

double rel_err(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

CheckResult result(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

// A phase state of a real run: the homotopy is advanced `phases` phases
// (or to completion) and the state at the point reached is returned.
homotopy::HomotopyState<double> advance(const LpProblem<double>& problem, double epsilon, Index phases) {
  homotopy::HomotopyConfig cfg;
  cfg.epsilon = epsilon;
  double t = 0;
  V x;
  if (phases == 0) {
    t = homotopy::initial_t0(problem);
    for (int k = 0;; ++k) {
      try {
        x = homotopy::initial_point(problem, t);
        break;
      } catch (const ParameterError&) {
        if (k >= 64) throw;
        t *= 2;
      }
    }
  } else {
    cfg.max_phases = phases;
    try {
      const auto r = homotopy::run(problem, cfg);
      x = r.final_x;
      t = r.t_final;
    } catch (const homotopy::HomotopyError<double>& e) {
      x = e.partial().final_x;
      t = e.partial().t_final;
    }
  }
  return homotopy::make_state(problem, phases, t, x);
}

}  // namespace

Instance make_instance(Index n, Index d, double p, std::uint64_t seed, double density) {
  LpProblem<double> problem = generate_random<double>(n, d, p, density, seed);
  const double eps = 1e-6 * (1 + objective(problem, V(V::Zero(d))));
  return {std::move(problem), eps};
}

RunAudit audit_report(const homotopy::SolveReport<double>& report) {
  RunAudit a;
  const double p = report.p;
  const double h = 1 / (2 * p);
  for (std::size_t k = 0; k < report.phases.size(); ++k) {
    const auto& ph = report.phases[k];
    if (!ph.in_neighborhood) ++a.neighborhood_violations;
    if (k > 0 && rel_err(ph.t_k / report.phases[k - 1].t_k, 1 - h) > 1e-12) a.schedule_ok = false;
    if (report.solver_kind != homotopy::SolverKind::katyusha) {
      const double bound = 10 * std::sqrt(ph.kappa) * std::log(ph.kappa * std::pow(double(report.n), 6));
      a.worst_inner_ratio = std::max(a.worst_inner_ratio, double(ph.inner_iterations) / bound);
      if (double(ph.inner_iterations) > bound) a.inner_bound_ok = false;
    }
  }
  a.phase_bound = 10 * p * std::log(double(report.n) * p * std::pow(report.t0, p) / report.epsilon);
  a.phase_count_ok = double(report.phases.size()) <= a.phase_bound;
  return a;
}

CheckResult check_smoothing_derivatives(std::uint64_t seed, int points) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double ps[] = {1.25, 1.5, 2, 3, 4, 8};
  const double ts[] = {1e-3, 1, 1e3};
  double worst = 0;
  int count = 0;
  for (const double p : ps) {
    for (const double t : ts) {
      for (int k = 0; k < points; ++k) {
        // |s| in (0, 3t), at least 1e-3 t away from the kink
        double s = 3 * t * unit(rng);
        if (std::abs(s - t) < 1e-3 * t) s = t * (s > t ? 1.01 : 0.99);
        if (unit(rng) < 0.5) s = -s;
        const double step = 1e-6 * std::max(std::abs(s), t) * 1e-1;
        const auto f = smoothing::eval(t, p, s);
        const auto up = smoothing::eval(t, p, s + step), down = smoothing::eval(t, p, s - step);
        const double fd_first = (up.value - down.value) / (2 * step);
        const double fd_second = (up.first - down.first) / (2 * step);
        const double dt = 1e-7 * t;
        const double fd_dt = (smoothing::eval(t + dt, p, s).first - smoothing::eval(t - dt, p, s).first) / (2 * dt);
        worst = std::max({worst, rel_err(fd_first, f.first), rel_err(fd_second, f.second)});
        // d/dt f' vanishes outside [-t, t]; compare against the scale of f' there
        const double dt_scale = std::max(std::abs(f.dt_of_first), std::abs(f.first) / t);
        worst = std::max(worst, std::abs(fd_dt - f.dt_of_first) / dt_scale);
        ++count;
      }
    }
  }
  return result("smoothing derivatives vs finite differences", worst <= 1e-5,
                "max rel err " + fmt(worst) + " over " + std::to_string(count) + " points");
}

CheckResult check_tilde_gradient(std::uint64_t seed, int points) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double ps[] = {1.5, 3, 4, 8};
  double worst = 0;
  for (int k = 0; k < points; ++k) {
    const double p = ps[k % 4];
    const Index n = 6;
    const double t = std::exp(normal(rng));
    V s_ref(n), s(n);
    for (Index i = 0; i < n; ++i) s_ref(i) = 2 * t * normal(rng);
    const double h = 1 / (2 * p);
    const double gamma = homotopy::gamma(t, p, h, n) * unit(rng);
    const smoothing::SmoothedLoss<double> loss(t, p, s_ref, gamma);
    for (Index i = 0; i < n; ++i) s(i) = s_ref(i) + 3 * t * normal(rng);
    const auto tv = smoothing::tilde_eval(loss, h, s);
    const std::function<double(const V&)> f = [&](const V& z) { return smoothing::tilde_eval(loss, h, z).value; };
    const V fd = finite_diff_gradient<double>(f, s, 1e-6 * t);
    worst = std::max(worst, (fd - tv.gradient).norm() / std::max(tv.gradient.norm(), 1e-300));
  }
  return result("tilde-f gradient vs finite differences", worst <= 1e-5,
                "max rel err " + fmt(worst) + " over " + std::to_string(points) + " points");
}

CheckResult check_g_gradient(std::uint64_t seed, int instances, int probes) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double ps[] = {1.5, 3, 4, 8};
  double worst = 0;
  for (int k = 0; k < instances; ++k) {
    const double p = ps[k % 4];
    const Instance inst = make_instance(40, 4, p, seed + std::uint64_t(k));
    const auto st = advance(inst.problem, inst.epsilon, 3);
    const smoothing::SmoothedLoss<double> loss(st.t, p, st.s, st.gamma);
    const double h = 1 / (2 * p);
    const solvers::DensePreconditioner<double> pre(inst.problem.A(), st.D);
    const solvers::PreconditionedObjective<double, solvers::DensePreconditioner<double>> obj(inst.problem, loss, h,
                                                                                             pre);
    const V y_star = obj.preimage(st.x);
    const std::function<double(const V&)> f = [&](const V& y) { return solvers::g_eval(obj, y).value; };
    for (int j = 0; j < probes; ++j) {
      V dir(obj.dim());
      for (Index i = 0; i < dir.size(); ++i) dir(i) = normal(rng);
      const V y = y_star + obj.project(dir) * (1e-2 * (1 + y_star.norm()));
      const V g = solvers::g_eval(obj, y).gradient;
      const V fd = finite_diff_gradient<double>(f, y, 1e-6 * (1 + y.norm()));
      const double scale = std::max(g.norm(), obj.c_image().norm());
      worst = std::max(worst, (fd - g).norm() / std::max(scale, 1e-300));
    }
  }
  return result("g_eval gradient vs finite differences", worst <= 1e-5,
                "max rel err " + fmt(worst) + " over " + std::to_string(instances * probes) + " probes");
}

CheckResult check_leverage_scores(std::uint64_t seed, int instances) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.5, 2.0);
  double worst = 0;
  bool in_range = true;
  for (int k = 0; k < instances; ++k) {
    const Index d = 2 + k % 6;
    const Index n = 10 * d + k;
    LpProblem<double> problem = generate_random<double>(n, d, 3.0, k % 2 ? 0.2 : 1.0, seed + std::uint64_t(k));
    V w(n);
    for (Index i = 0; i < n; ++i) w(i) = unit(rng);
    const V tau = solvers::leverage_scores(problem.A(), w);
    const double rank = double(PsdSpectrum<double>(problem.A().weighted_gram(w)).rank());
    worst = std::max(worst, std::abs(tau.sum() - rank));
    if (tau.minCoeff() < -1e-12 || tau.maxCoeff() > 1 + 1e-12) in_range = false;
  }
  return result("leverage scores sum to rank", worst <= 1e-8 && in_range,
                "max |sum - rank| " + fmt(worst) + (in_range ? "" : ", score outside [0,1]") + " over " +
                    std::to_string(instances) + " instances");
}

CheckResult check_sandwich(std::uint64_t seed, int states, Index n, Index d, Index samples) {
  const double ps[] = {1.5, 3, 4, 8};
  double lo = 1e300, worst_hi = -1e300;
  bool ok = true;
  for (int k = 0; k < states; ++k) {
    const double p = ps[k % 4];
    const Instance inst = make_instance(n, d, p, seed + std::uint64_t(k));
    const auto st = advance(inst.problem, inst.epsilon, Index(5 * (k / 4)));
    const smoothing::SmoothedLoss<double> loss(st.t, p, st.s, st.gamma);
    const solvers::DensePreconditioner<double> pre(inst.problem.A(), st.D);
    const solvers::PreconditionedObjective<double, solvers::DensePreconditioner<double>> obj(inst.problem, loss,
                                                                                             1 / (2 * p), pre, st.x);
    const auto r = hessian_sandwich_check(obj, samples, seed + 1000 + std::uint64_t(k), st.D);
    lo = std::min(lo, r.min_ratio);
    worst_hi = std::max(worst_hi, r.max_ratio / st.kappa);
    if (r.min_ratio < 1 - 1e-6 || r.max_ratio > st.kappa + 1e-6) ok = false;
  }
  return result("Hessian sandwich Q <= grad^2 g <= kappa Q", ok,
                "min ratio " + fmt(lo) + ", max ratio / kappa " + fmt(worst_hi) + " over " + std::to_string(states) +
                    " phase states");
}

// Near t0 the KKT map amplifies a one-ulp change of x by p t^{p-2} ||A^T A||,
// which for p = 8 exceeds 1e-8 in double precision; the closed form is
// therefore evaluated in long double, and the double residual is reported.
CheckResult check_initial_point(std::uint64_t seed, int instances) {
  using LD = long double;
  const double ps[] = {1.5, 3, 4, 8};
  LD worst = 0;
  double worst_double = 0;
  for (int k = 0; k < instances; ++k) {
    const double p = ps[k % 4];
    const Index d = 1 + k % 8;
    const Index n = 5 * d + 3 * (k % 5);
    const LpProblem<LD> problem = generate_random<LD>(n, d, LD(p), 1.0, seed + std::uint64_t(k));
    const LD t = LD(1.02) * homotopy::initial_t0(problem);
    const Vector<LD> x = homotopy::initial_point(problem, t);
    worst = std::max(worst, homotopy::kkt_residual(problem, t, x) / (1 + problem.c().norm()));
    const LpProblem<double> pd = generate_random<double>(n, d, p, 1.0, seed + std::uint64_t(k));
    const double td = 1.02 * homotopy::initial_t0(pd);
    worst_double = std::max(worst_double, homotopy::kkt_residual(pd, td, homotopy::initial_point(pd, td)) /
                                              (1 + pd.c().norm()));
  }
  return result("Lemma 4 initial point KKT residual", worst <= 1e-8L,
                "max residual / (1 + ||c||) " + fmt(double(worst)) + " in long double (" + fmt(worst_double) +
                    " in double) over " + std::to_string(instances) + " instances");
}

CheckResult check_sparsifier(std::uint64_t seed, int trials, Index n, Index d, double min_first_try_rate) {
  const LpProblem<double> problem = generate_random<double>(n, d, 3.0, 1.0, seed);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.5, 2.0);
  V w(n);
  for (Index i = 0; i < n; ++i) w(i) = unit(rng);
  int first_try = 0;
  bool bounds_ok = true;
  for (int k = 0; k < trials; ++k) {
    const auto r = solvers::sparsify(problem.A(), w, seed + 17 + std::uint64_t(k));
    if (r.accepted) {
      ++first_try;
      if (r.lower < 0.5 || r.upper > 2) bounds_ok = false;
    }
  }
  const double rate = double(first_try) / double(trials);
  return result("sparsifier first-try acceptance", rate >= min_first_try_rate && bounds_ok,
                std::to_string(first_try) + "/" + std::to_string(trials) + " accepted on the first draw");
}

CheckResult check_path_speed() {
  double worst = 0;
  // A = [1], b = [1], c = [0.1], plus a few multi-row d = 1 instances.
  std::vector<LpProblem<double>> family;
  for (const double p : {2.0, 3.0, 4.0, 8.0}) {
    Matrix<double> a(1, 1);
    a << 1;
    family.emplace_back(DesignMatrix<double>(a), V::Ones(1), V::Constant(1, 0.1), p);
    family.push_back(generate_random<double>(20, 1, p, 1.0, 100 + std::uint64_t(p)));
  }
  for (const auto& problem : family) {
    std::vector<double> grid;
    const double t0 = homotopy::initial_t0(problem);
    for (double t = 2 * t0; t > 1e-3 * t0; t *= 0.8) grid.push_back(t);
    const auto r = path_speed_check(problem, grid);
    worst = std::max(worst, r.max_violation_ratio);
  }
  return result("Lemma 10 path speed bound", worst <= 1.1, "max |ds/dt| / bound " + fmt(worst));
}

std::vector<CheckResult> check_homotopy(const std::vector<HomotopyCase>& cases, homotopy::SolverKind kind,
                                        std::vector<homotopy::SolveReport<double>>* reports) {
  double worst_gap = -1e300;
  Index violations = 0;
  bool schedule = true, phases = true, inner = true, oracle_ok = true, cert_ok = true;
  double worst_inner = 0, worst_phase_ratio = 0;
  for (const auto& c : cases) {
    const Instance inst = make_instance(c.n, c.d, c.p, c.seed);
    homotopy::HomotopyConfig cfg;
    cfg.epsilon = inst.epsilon;
    cfg.solver_kind = kind;
    cfg.seed = c.seed;
    const auto report = homotopy::run(inst.problem, cfg);
    const auto oracle = reference_solve(inst.problem, inst.epsilon);
    const double gap = report.final_objective - oracle.objective;
    worst_gap = std::max(worst_gap, gap / inst.epsilon);
    if (gap > inst.epsilon) oracle_ok = false;
    if (oracle.certificate > certificate_bound(inst.problem)) cert_ok = false;
    const RunAudit a = audit_report(report);
    violations += a.neighborhood_violations;
    schedule = schedule && a.schedule_ok;
    phases = phases && a.phase_count_ok;
    inner = inner && a.inner_bound_ok;
    worst_inner = std::max(worst_inner, a.worst_inner_ratio);
    worst_phase_ratio = std::max(worst_phase_ratio, double(report.phases.size()) / a.phase_bound);
    if (reports) reports->push_back(report);
  }
  const std::string on = " on " + std::to_string(cases.size()) + " runs (" + homotopy::to_string(kind) + ")";
  std::vector<CheckResult> out;
  out.push_back(result("homotopy objective <= oracle + eps", oracle_ok, "max (gap / eps) " + fmt(worst_gap) + on));
  out.push_back(result("oracle certificate", cert_ok, "KKT certificate within 1e-8 (1 + ||c|| + ||b||^{p-1})" + on));
  out.push_back(result("path containment (Lemma 1)", violations == 0,
                       std::to_string(violations) + " neighborhood violations" + on));
  out.push_back(result("schedule t_{k+1} = (1 - 1/(2p)) t_k", schedule, "every consecutive phase" + on));
  out.push_back(result("phase count (Theorem 1)", phases, "max phases / bound " + fmt(worst_phase_ratio) + on));
  if (kind != homotopy::SolverKind::katyusha)
    out.push_back(
        result("inner iterations (Lemma 2)", inner, "max iterations / bound " + fmt(worst_inner) + on));
  return out;
}

std::vector<CheckResult> check_katyusha(std::uint64_t seed, int instances, Index n, Index d, double p,
                                        double tolerance,
                                        std::vector<homotopy::SolveReport<double>>* reports) {
  double worst = 0;
  bool rows_ok = true;
  Index steps = 0;
  for (int k = 0; k < instances; ++k) {
    const Instance inst = make_instance(n, d, p, seed + std::uint64_t(k));
    homotopy::HomotopyConfig cfg;
    cfg.epsilon = inst.epsilon;
    cfg.seed = seed + std::uint64_t(k);
    cfg.solver_kind = homotopy::SolverKind::agd_dense;
    const auto dense = homotopy::run(inst.problem, cfg);
    cfg.solver_kind = homotopy::SolverKind::katyusha;
    const auto kat = homotopy::run(inst.problem, cfg);
    worst = std::max(worst, std::abs(kat.final_objective - dense.final_objective));
    if (reports) {
      reports->push_back(dense);
      reports->push_back(kat);
    }

    // One instrumented phase: every stochastic step reads exactly |S| rows.
    const auto st = advance(inst.problem, inst.epsilon, 2);
    const smoothing::SmoothedLoss<double> loss(st.t, p, st.s, st.gamma);
    const auto w = solvers::sparsify_with_retries(inst.problem.A(), st.D, cfg.seed);
    const solvers::SketchedPreconditioner<double> pre(inst.problem.A(), w.weights);
    const solvers::PreconditionedObjective<double, solvers::SketchedPreconditioner<double>> obj(
        inst.problem, loss, 1 / (2 * p), pre, st.x);
    const auto sc = solvers::smoothness_constants(inst.problem.A(), st.D, w.weights, st.kappa);
    const Index batch = solvers::batch_size(n, d, inst.problem.nnz(), st.kappa);
    const auto r = solvers::katyusha_minimize(obj, V(V::Zero(obj.dim())), batch, sc.sigma, sc.L, sc.Li,
                                              homotopy::inner_ratio<double>(n, 6), cfg.seed);
    steps += r.steps;
    if (r.steps > 0 && (r.min_rows_per_step != batch || r.max_rows_per_step != batch ||
                        r.rows_touched != r.steps * batch))
      rows_ok = false;
  }
  std::vector<CheckResult> out;
  out.push_back(result("katyusha matches agd-dense", worst <= tolerance,
                       "max |objective difference| " + fmt(worst) + " over " + std::to_string(instances) +
                           " instances"));
  out.push_back(result("katyusha row-touch accounting", rows_ok,
                       "rows read per step equal the batch size over " + std::to_string(steps) + " steps"));
  return out;
}

std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed) {
  if (suite != "quick" && suite != "full") throw ParameterError("unknown suite '" + suite + "' (quick or full)");
  const bool full = suite == "full";
  std::vector<CheckResult> out;
  out.push_back(check_smoothing_derivatives(seed, full ? 100 : 10));
  out.push_back(check_tilde_gradient(seed, full ? 100 : 10));
  out.push_back(check_g_gradient(seed, full ? 8 : 4, full ? 50 : 5));
  out.push_back(check_leverage_scores(seed, full ? 50 : 10));
  out.push_back(check_sandwich(seed, full ? 20 : 4, full ? 200 : 60, full ? 10 : 4, full ? 100 : 20));
  out.push_back(check_initial_point(seed, full ? 100 : 20));
  out.push_back(check_sparsifier(seed, full ? 50 : 10, 200, 5, 0.9));
  out.push_back(check_path_speed());
  std::vector<HomotopyCase> cases;
  const double ps[] = {1.5, 3, 4, 8};
  const int count = full ? 12 : 4;
  for (int k = 0; k < count; ++k) cases.push_back({full ? 200 : 60, full ? 8 : 3, ps[k % 4], seed + std::uint64_t(k)});
  for (auto& r : check_homotopy(cases, homotopy::SolverKind::agd_dense)) out.push_back(std::move(r));
  if (full) {
    for (auto& r : check_homotopy({cases[1], cases[2]}, homotopy::SolverKind::agd_sparse)) out.push_back(std::move(r));
  }
  for (auto& r : check_katyusha(seed, full ? 5 : 2, full ? 200 : 60, 3, 3.0, 1e-5)) out.push_back(std::move(r));
  return out;
}

}  // namespace lph::validation
