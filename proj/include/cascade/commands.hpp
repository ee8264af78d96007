// The CLI subcommands as library entry points, so tests can drive the exact
// pipeline the binary runs.
#pragma once

#include "cascade/config.hpp"

namespace cascade {

// steady: trace the constant-flow steady-state branch over the Da range and
// write it as a diagram CSV (curve "ss").
void cmd_steady(const RunConfig& config);

// periodic: trace the enforced-periodic branch for the configured tau_rf and
// write the aligned beg/end/av diagram curves.
void cmd_periodic(const RunConfig& config);

// simulate: time series at a single Da under the configured operating mode.
void cmd_simulate(const RunConfig& config);

// relax-scan: scan tau_rel for the best settled cycle average at one Da.
void cmd_relax_scan(const RunConfig& config);

// Full command-line entry point: parses arguments, merges the config file,
// dispatches, and maps failures to exit codes (0 ok, 2 usage, 3 numerical
// failure, 1 anything else).
int run_cli(int argc, const char* const* argv);

}  // namespace cascade
