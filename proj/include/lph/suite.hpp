#ifndef LPH_SUITE_HPP
#define LPH_SUITE_HPP

#include "lph/homotopy.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lph::validation {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Per-run invariants read off a SolveReport.
struct RunAudit {
  Index neighborhood_violations = 0;
  bool schedule_ok = true;         // t_{k+1} / t_k = 1 - 1/(2p)
  bool phase_count_ok = true;      // phases <= 10 p ln(n p t0^p / eps)
  bool inner_bound_ok = true;      // inner iterations <= 10 sqrt(kappa) ln(kappa n^6), AGD only
  double phase_bound = 0;
  double worst_inner_ratio = 0;    // max over phases of iterations / bound
};

RunAudit audit_report(const homotopy::SolveReport<double>& report);

/// Random instance seeded by `seed` with epsilon = 1e-6 (1 + objective at 0).
struct Instance {
  LpProblem<double> problem;
  double epsilon;
};
Instance make_instance(Index n, Index d, double p, std::uint64_t seed, double density = 1.0);

// Individual checks; sizes are parameters so that the quick and full suites
// and the acceptance driver can share them.
CheckResult check_smoothing_derivatives(std::uint64_t seed, int points);
CheckResult check_tilde_gradient(std::uint64_t seed, int points);
CheckResult check_g_gradient(std::uint64_t seed, int instances, int probes);
CheckResult check_leverage_scores(std::uint64_t seed, int instances);
CheckResult check_sandwich(std::uint64_t seed, int states, Index n, Index d, Index samples);
CheckResult check_initial_point(std::uint64_t seed, int instances);
CheckResult check_sparsifier(std::uint64_t seed, int trials, Index n, Index d, double min_first_try_rate);
CheckResult check_path_speed();

struct HomotopyCase {
  Index n, d;
  double p;
  std::uint64_t seed;
};

/// Oracle agreement, containment, schedule, phase count and (for AGD) the
/// inner-iteration bound over `cases`. Reports are appended to `reports`
/// when given.
std::vector<CheckResult> check_homotopy(const std::vector<HomotopyCase>& cases, homotopy::SolverKind kind,
                                        std::vector<homotopy::SolveReport<double>>* reports = nullptr);

/// Katyusha against agd-dense on `instances` seeded problems, plus the
/// per-step row-touch accounting.
std::vector<CheckResult> check_katyusha(std::uint64_t seed, int instances, Index n, Index d, double p,
                                        double tolerance,
                                        std::vector<homotopy::SolveReport<double>>* reports = nullptr);

/// The checks behind `lp_homotopy validate`; `suite` is "quick" or "full".
std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed);

}  // namespace lph::validation

#endif  // LPH_SUITE_HPP
