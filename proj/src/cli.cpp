#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <map>
#include <string>
#include <vector>

#include "cascade/commands.hpp"
#include "cascade/errors.hpp"
#include "cascade/version.hpp"

namespace cascade {

namespace {

// Every flag funnels through apply_config_entry as text, so the config file
// and the command line share one parser and one set of validations.
struct FlagSet {
    std::map<std::string, std::string> values;  // key -> raw value, in CLI11 parse order
    std::vector<std::string> order;

    CLI::Option* add(CLI::App* cmd, const std::string& flag, const std::string& key,
                     const std::string& help) {
        return cmd->add_option_function<std::string>(
            flag,
            [this, key](const std::string& v) {
                if (!values.count(key)) order.push_back(key);
                values[key] = v;
            },
            help);
    }
};

void add_model_flags(CLI::App* cmd, FlagSet& flags) {
    flags.add(cmd, "--gamma", "gamma", "Activation-energy number (default 15)");
    flags.add(cmd, "--beta", "beta", "Adiabatic-temperature-rise number (default 0.65)");
    flags.add(cmd, "--order", "order", "Reaction order n (default 1.5)");
}

void add_integrator_flags(CLI::App* cmd, FlagSet& flags) {
    flags.add(cmd, "--step", "step", "Integrator step (default: tau-rf / 2000)");
    flags.add(cmd, "--record-every", "record_every", "Trajectory sampling stride in steps");
}

void add_output_flags(CLI::App* cmd, FlagSet& flags, std::string& config_path) {
    cmd->add_option("--config", config_path, "Flat key = value configuration file");
    flags.add(cmd, "--out", "out", "Output CSV path")->required();
    flags.add(cmd, "--svg", "svg", "Optional SVG plot path");
}

RunConfig build_config(const std::string& config_path, const FlagSet& flags) {
    RunConfig config;
    if (!config_path.empty())
        for (const auto& [key, value] : parse_config_file(config_path))
            apply_config_entry(config, key, value);
    for (const std::string& key : flags.order)  // flags win over the file
        apply_config_entry(config, key, flags.values.at(key));
    return config;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Bifurcation analysis of a two-reactor cascade under constant flow,"
                 " periodic flow reversal, and flow reversal with relaxation"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    FlagSet flags;

    CLI::App* steady = app.add_subcommand(
        "steady", "Trace the constant-flow steady-state branch over a Da range");
    add_model_flags(steady, flags);
    flags.add(steady, "--da-min", "da_min", "Lower Da bound")->required();
    flags.add(steady, "--da-max", "da_max", "Upper Da bound")->required();
    flags.add(steady, "--dp", "dp", "Continuation increment (default 1e-5)");
    add_output_flags(steady, flags, config_path);

    CLI::App* periodic = app.add_subcommand(
        "periodic", "Trace the enforced-periodic branch (beg/end/av curves) over a Da range");
    add_model_flags(periodic, flags);
    flags.add(periodic, "--da-min", "da_min", "Lower Da bound")->required();
    flags.add(periodic, "--da-max", "da_max", "Upper Da bound")->required();
    flags.add(periodic, "--dp", "dp", "Continuation increment (default 1e-5)");
    flags.add(periodic, "--tau-rf", "tau_rf", "Flow-reversal period")->required();
    flags.add(periodic, "--seed-alpha1", "seed_alpha1", "Settling seed, reactor 1");
    flags.add(periodic, "--seed-alpha2", "seed_alpha2", "Settling seed, reactor 2");
    flags.add(periodic, "--settle-cycles", "settle_cycles", "Settling budget in cycles");
    add_integrator_flags(periodic, flags);
    add_output_flags(periodic, flags, config_path);

    CLI::App* simulate = app.add_subcommand(
        "simulate",
        "Time series at one Da; constant flow by default, reverse flow with --tau-rf,"
        " relaxation with --tau-rf and --tau-rel");
    add_model_flags(simulate, flags);
    flags.add(simulate, "--da", "da", "Damkohler number")->required();
    flags.add(simulate, "--tau-rf", "tau_rf", "Flow-reversal period");
    flags.add(simulate, "--tau-rel", "tau_rel", "Relaxation time");
    flags.add(simulate, "--cycles", "cycles", "Number of cycles (default 40)");
    flags.add(simulate, "--seed-alpha1", "seed_alpha1", "Initial conversion, reactor 1");
    flags.add(simulate, "--seed-alpha2", "seed_alpha2", "Initial conversion, reactor 2");
    add_integrator_flags(simulate, flags);
    add_output_flags(simulate, flags, config_path);

    CLI::App* relax_scan = app.add_subcommand(
        "relax-scan", "Scan tau_rel for the highest settled cycle-average conversion");
    add_model_flags(relax_scan, flags);
    flags.add(relax_scan, "--da", "da", "Damkohler number")->required();
    flags.add(relax_scan, "--tau-rf", "tau_rf", "Flow-reversal period")->required();
    flags.add(relax_scan, "--scan-step", "scan_step", "tau_rel grid step (default 0.1)");
    flags.add(relax_scan, "--settle-cycles", "settle_cycles", "Settling budget in cycles");
    add_integrator_flags(relax_scan, flags);
    add_output_flags(relax_scan, flags, config_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const RunConfig config = build_config(config_path, flags);
        if (steady->parsed())
            cmd_steady(config);
        else if (periodic->parsed())
            cmd_periodic(config);
        else if (simulate->parsed())
            cmd_simulate(config);
        else if (relax_scan->parsed())
            cmd_relax_scan(config);
        return 0;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace cascade
