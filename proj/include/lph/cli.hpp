#ifndef LPH_CLI_HPP
#define LPH_CLI_HPP

namespace lph {

/// Entry point of the `lp_homotopy` driver: solve, validate, bench, gen.
/// Returns 0 on success, 1 on a runtime or solver failure, 2 on bad usage.
int run_cli(int argc, char** argv);

}  // namespace lph

#endif  // LPH_CLI_HPP
