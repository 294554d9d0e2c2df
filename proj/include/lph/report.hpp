#ifndef LPH_REPORT_HPP
#define LPH_REPORT_HPP

#include "lph/homotopy.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace lph {

/// SolveReport as JSON. `final_x` is an inline array unless `x_path` is
/// non-empty, in which case it holds that path.
nlohmann::json report_to_json(const homotopy::SolveReport<double>& report, const std::string& x_path = "");

/// Column header of the bench scaling table.
inline constexpr const char* kBenchHeader = "p,n,d,phase,inner_iters,wall_ms";

struct BenchRow {
  double p;
  Index n, d, phase, inner_iters;
  double wall_ms;
};

void write_bench_row(std::ostream& out, const BenchRow& row);

}  // namespace lph

#endif  // LPH_REPORT_HPP
