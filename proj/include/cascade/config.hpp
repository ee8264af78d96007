// Run configuration shared by the CLI subcommands: model constants, the
// operating mode, parameter ranges, solver settings and output paths. Values
// come from an optional flat key = value file with command-line flags taking
// precedence.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>

#include "cascade/integrate.hpp"
#include "cascade/model.hpp"
#include "cascade/steady.hpp"

namespace cascade {

// Raised for malformed invocations; the CLI maps it to exit code 2.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConstantFlowMode {
    FlowDirection dir = FlowDirection::forward;
};
struct ReverseFlowMode {
    double tau_rf = 0.0;
};
struct RelaxationModeCfg {
    double tau_rf = 0.0;
    std::optional<double> tau_rel;  // empty means "scan"
};
using OperatingMode = std::variant<ConstantFlowMode, ReverseFlowMode, RelaxationModeCfg>;

struct RunConfig {
    ModelParams params;

    std::optional<double> da;                            // single-Da commands
    std::optional<std::pair<double, double>> da_range;   // range commands
    double dp = 1e-5;

    std::optional<double> tau_rf;
    std::optional<double> tau_rel;
    double scan_step = 0.1;
    long cycles = 40;
    long settle_cycles = 5000;  // settling budget for periodic / relax-scan
    CascadeState seed{0.0, 0.0};

    double step = 0.0;      // integrator step override; 0 = tau_rf / 2000
    int record_every = 10;

    std::string out;
    std::optional<std::string> svg;

    IntegratorSettings integrator() const { return {step, record_every}; }

    // Exactly one of {da, da_range} must be present, as required per command.
    void require_single_da() const;
    void require_da_range() const;

    OperatingMode mode() const;  // inferred from which tau flags are present
};

// Parses a flat `key = value` file ('#' starts a comment). Keys use the long
// flag names with '-' or '_' accepted interchangeably. Unknown keys are
// usage errors.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Applies one key/value pair onto the config (used for both file entries and
// flag overrides). Throws UsageError on unknown keys or unparsable values.
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

}  // namespace cascade
