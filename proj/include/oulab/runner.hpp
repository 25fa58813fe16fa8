#pragma once

#include "oulab/config.hpp"

#include <string>
#include <vector>

namespace oulab {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInvalid = 2;

struct RunResult {
    int exit_code = kExitInvalid;
    std::string payload;                ///< result document without timing; deterministic in (config minus workers)
    std::string document;               ///< payload plus the timing block, as written to the output
    std::vector<std::string> verdicts;  ///< one line per check
    std::string diagnostics;            ///< parse or domain errors when exit_code == 2
    double seconds = 0.0;
};

/// Validates, dispatches to the checker for config.command, and formats the result.
/// Never throws for bad input; errors become exit code 2 with diagnostics.
RunResult run(RunConfig const& config);

/// Writes `document` to config.output (stdout when empty) and the optional path dump.
void write_artifacts(RunConfig const& config, RunResult const& result);

}  // namespace oulab
