#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace twisted {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNonConvergence = 2;

/// Runs one subcommand (eigen, norms, project, opnorm, sweep, dispersive, heisenberg, selftest).
/// `args` excludes the program name. Results go to --output (default: `out`); errors go to
/// `err` as one JSON object per line.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twisted
