#pragma once

#include <ostream>

namespace lusw {

/// Exit codes of cli_main.
enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,
  kExitUsage = 2,
  kExitValidation = 3,
  kExitIo = 4,
  kExitNonFinite = 5,
};

/// lusw <run|cauchy|energy-audit|noise-info|oracle-transport> [--config PATH] [--seed U64] [--out DIR]
/// Failures print one JSON object per line on `err`, e.g.
///   {"error":"validation","key":"model.alpha","message":"..."}
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lusw
