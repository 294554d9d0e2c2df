#include "lph/cli.hpp"

#include "lph/homotopy.hpp"
#include "lph/io.hpp"
#include "lph/log.hpp"
#include "lph/report.hpp"
#include "lph/suite.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace lph {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_p(double p) {
  if (!(p > 1) || !std::isfinite(p)) {
    std::ostringstream os;
    os << "--p must satisfy p > 1 (got " << p << ")";
    throw UsageError(os.str());
  }
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

unsigned thread_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LP_HOMOTOPY_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) cap = unsigned(v);
    else log_warning(std::string("ignoring LP_HOMOTOPY_THREADS='") + env + "'");
  }
  return cap;
}

struct SolveArgs {
  std::string matrix, b, c, out, x_out, solver = "agd-dense";
  double p = 0, eps = 1e-6;
  std::uint64_t seed = 0;
};

int cmd_solve(const SolveArgs& a) {
  require_p(a.p);
  if (!(a.eps > 0)) throw UsageError("--eps must be positive");
  homotopy::HomotopyConfig cfg;
  try {
    cfg.solver_kind = homotopy::parse_solver_kind(a.solver);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  cfg.epsilon = a.eps;
  cfg.seed = a.seed;
  const LpProblem<double> problem = load_problem(a.matrix, a.b, a.c, a.p);

  try {
    const auto report = homotopy::run(problem, cfg);
    if (!a.x_out.empty()) write_vector_file(a.x_out, report.final_x);
    write_json(a.out, report_to_json(report, a.x_out));
    std::cout << "objective " << std::setprecision(17) << report.final_objective << " after "
              << report.phases.size() << " phases\n";
    return kExitOk;
  } catch (const homotopy::HomotopyError<double>& e) {
    if (!a.x_out.empty()) write_vector_file(a.x_out, e.partial().final_x);
    write_json(a.out, report_to_json(e.partial(), a.x_out));
    std::cerr << "lp_homotopy: solve failed: " << e.what() << " (partial report in " << a.out << ")\n";
    return kExitFailure;
  }
}

int cmd_validate(std::uint64_t seed, const std::string& suite) {
  if (suite != "quick" && suite != "full") throw UsageError("--suite must be quick or full");
  const auto results = validation::run_suite(suite, seed);
  std::size_t width = 5;
  for (const auto& r : results) width = std::max(width, r.name.size());
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(int(width)) << r.name << "  "
              << r.detail << '\n';
    ok = ok && r.passed;
  }
  std::cout << (ok ? "all checks passed\n" : "some checks FAILED\n");
  return ok ? kExitOk : kExitFailure;
}

struct BenchArgs {
  std::vector<double> p_list{1.5, 3, 4, 8};
  std::vector<Index> n_list;
  Index d = 0;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string out, solver = "agd-dense";
};

int cmd_bench(const BenchArgs& a) {
  for (const double p : a.p_list) require_p(p);
  homotopy::SolverKind kind;
  try {
    kind = homotopy::parse_solver_kind(a.solver);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  for (const Index n : a.n_list)
    if (n < a.d) throw UsageError("--n must be at least --d");

  struct Job {
    double p;
    Index n;
    int trial;
    std::vector<BenchRow> rows;
    std::string error;
  };
  std::vector<Job> jobs;
  for (const double p : a.p_list)
    for (const Index n : a.n_list)
      for (int t = 0; t < a.trials; ++t) jobs.push_back({p, n, t, {}, {}});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      Job& job = jobs[j];
      try {
        const std::uint64_t seed = a.seed + std::uint64_t(job.trial);
        const auto inst = validation::make_instance(job.n, a.d, job.p, seed);
        homotopy::HomotopyConfig cfg;
        cfg.epsilon = inst.epsilon;
        cfg.solver_kind = kind;
        cfg.seed = seed;
        const auto report = homotopy::run(inst.problem, cfg);
        for (const auto& ph : report.phases)
          job.rows.push_back({job.p, job.n, a.d, ph.k, ph.inner_iterations, ph.wall_ms});
      } catch (const std::exception& e) {
        job.error = e.what();
      }
    }
  };
  const unsigned threads = std::min<unsigned>(thread_cap(), unsigned(std::max<std::size_t>(jobs.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw Error("cannot open '" + a.out + "' for writing");
  }
  std::ostream& out = a.out.empty() ? std::cout : file;
  out << kBenchHeader << '\n';
  bool ok = true;
  for (const auto& job : jobs) {
    for (const auto& row : job.rows) write_bench_row(out, row);
    if (!job.error.empty()) {
      ok = false;
      std::cerr << "lp_homotopy: bench p=" << job.p << " n=" << job.n << " trial " << job.trial << ": " << job.error
                << '\n';
    }
  }
  return ok ? kExitOk : kExitFailure;
}

struct GenArgs {
  Index n = 0, d = 0;
  double p = 0, density = 1;
  std::uint64_t seed = 0;
  std::string prefix;
};

int cmd_gen(const GenArgs& a) {
  require_p(a.p);
  if (a.n < 1 || a.d < 1 || a.n < a.d) throw UsageError("need 1 <= --d <= --n");
  if (!(a.density > 0) || a.density > 1) throw UsageError("--density must lie in (0, 1]");
  std::string prefix = a.prefix;
  if (std::filesystem::is_directory(prefix) && !prefix.empty() && prefix.back() != '/') prefix += '/';
  const auto problem = generate_random<double>(a.n, a.d, a.p, a.density, a.seed);
  write_matrix_market_file(prefix + "A.mtx", problem.A());
  write_vector_file(prefix + "b.txt", problem.b());
  write_vector_file(prefix + "c.txt", problem.c());
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"lp-norm regression by homotopy on the smoothing radius"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "solve min c.x + ||Ax - b||_p^p");
  s->add_option("--matrix", solve.matrix, "Matrix Market file for A")->required();
  s->add_option("--b", solve.b, "vector b, one entry per line")->required();
  s->add_option("--c", solve.c, "vector c, one entry per line")->required();
  s->add_option("--p", solve.p, "exponent, p > 1")->required();
  s->add_option("--eps", solve.eps, "target accuracy")->capture_default_str();
  s->add_option("--solver", solve.solver, "agd-dense, agd-sparse or katyusha")->capture_default_str();
  s->add_option("--seed", solve.seed)->capture_default_str();
  s->add_option("--out", solve.out, "JSON report path")->required();
  s->add_option("--x-out", solve.x_out, "write the solution here instead of inlining it");

  std::uint64_t vseed = 0;
  std::string suite = "quick";
  auto* v = app.add_subcommand("validate", "run the invariant suites");
  v->add_option("--seed", vseed)->capture_default_str();
  v->add_option("--suite", suite, "quick or full")->capture_default_str();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "per-phase inner iteration counts as CSV");
  b->add_option("--p-list", bench.p_list, "comma-separated exponents")->delimiter(',')->capture_default_str();
  b->add_option("--n", bench.n_list, "row counts, comma-separated")->delimiter(',')->required();
  b->add_option("--d", bench.d, "columns")->required()->check(CLI::PositiveNumber);
  b->add_option("--trials", bench.trials)->capture_default_str()->check(CLI::PositiveNumber);
  b->add_option("--seed", bench.seed)->capture_default_str();
  b->add_option("--solver", bench.solver)->capture_default_str();
  b->add_option("--out", bench.out, "CSV path (stdout when omitted)");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "write a random instance");
  g->add_option("--n", gen.n)->required();
  g->add_option("--d", gen.d)->required();
  g->add_option("--p", gen.p)->required();
  g->add_option("--density", gen.density)->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--out-prefix", gen.prefix, "files are <prefix>A.mtx, <prefix>b.txt, <prefix>c.txt")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*s) return cmd_solve(solve);
    if (*v) return cmd_validate(vseed, suite);
    if (*b) return cmd_bench(bench);
    return cmd_gen(gen);
  } catch (const UsageError& e) {
    std::cerr << "lp_homotopy: " << e.what() << '\n';
    std::cerr << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "lp_homotopy: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace lph
