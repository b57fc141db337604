#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ppr/error.hpp"

namespace ppr {

// Exit statuses of the `ppr` tool.
enum ExitStatus : int {
  kExitOk = 0,
  kExitDataErrors = 1,
  kExitUsage = 2,
  kExitIo = 3,
};

int exit_status(ErrorCode code);

/// Runs one command line (without the program name). `--json` prints exactly
/// the `data` member the HTTP service returns for the same operation.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ppr
