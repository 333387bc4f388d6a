#pragma once

#include <ostream>

namespace impulse::cli {

enum ExitCode : int {
  kSuccess = 0,
  kDomainFailure = 1,  ///< hypothesis violated, margin error, no completed pulse
  kUsage = 2,          ///< bad flags or malformed scenario file
  kIoFailure = 3,
};

/// Environment variable consulted for the default `simulate` output directory.
inline constexpr const char* kOutDirEnv = "IMPULSE_OUT_DIR";

/// Entry point for `impulse validate | bounds | simulate`; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace impulse::cli
