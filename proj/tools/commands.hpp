#pragma once

#include "config.hpp"

namespace dbtool {

// Exit codes.
constexpr int kExitOk = 0;
constexpr int kExitVerificationFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitSolverFailure = 3;

int cmd_spectrum(const RunConfig& cfg);
int cmd_bound(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);
int cmd_converge(const RunConfig& cfg);

// Parses the command line (subcommand, optional --config file, flags overriding the file) and
// dispatches; library errors are mapped to exit codes.
int run_cli(int argc, char** argv);

}  // namespace dbtool
