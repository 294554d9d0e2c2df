#include "lph/report.hpp"

#include <ostream>

namespace lph {

nlohmann::json report_to_json(const homotopy::SolveReport<double>& report, const std::string& x_path) {
  nlohmann::json j;
  j["problem"] = {{"n", report.n}, {"d", report.d}, {"p", report.p}, {"nnz", report.nnz}};
  j["epsilon"] = report.epsilon;
  j["t0"] = report.t0;
  j["t_final"] = report.t_final;
  nlohmann::json phases = nlohmann::json::array();
  for (const auto& ph : report.phases) {
    phases.push_back({{"k", ph.k},
                      {"t_k", ph.t_k},
                      {"inner_iterations", ph.inner_iterations},
                      {"objective", ph.objective},
                      {"kkt_residual", ph.kkt_residual},
                      {"in_neighborhood", ph.in_neighborhood},
                      {"wall_ms", ph.wall_ms}});
  }
  j["phases"] = std::move(phases);
  j["solver_kind"] = homotopy::to_string(report.solver_kind);
  if (x_path.empty()) {
    nlohmann::json x = nlohmann::json::array();
    for (Index i = 0; i < report.final_x.size(); ++i) x.push_back(report.final_x(i));
    j["final_x"] = std::move(x);
  } else {
    j["final_x"] = x_path;
  }
  j["final_objective"] = report.final_objective;
  j["total_wall_ms"] = report.total_wall_ms;
  j["seed"] = report.seed;
  return j;
}

void write_bench_row(std::ostream& out, const BenchRow& row) {
  const nlohmann::json p = row.p;
  const nlohmann::json ms = row.wall_ms;
  out << p.dump() << ',' << row.n << ',' << row.d << ',' << row.phase << ',' << row.inner_iters << ',' << ms.dump()
      << '\n';
}

}  // namespace lph
