#ifndef LPH_LOG_HPP
#define LPH_LOG_HPP

#include <cstdlib>
#include <iostream>
#include <string_view>

namespace lph {

/// Warnings go to stderr unless LP_HOMOTOPY_QUIET is set.
inline void log_warning(std::string_view msg) {
  static const bool quiet = std::getenv("LP_HOMOTOPY_QUIET") != nullptr;
  if (!quiet) std::clog << "lp_homotopy: warning: " << msg << '\n';
}

}  // namespace lph

#endif  // LPH_LOG_HPP
