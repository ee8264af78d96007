// The relaxation operating policy: after every flow reversal the outlet
// reactor is cut off for tau_rel while the fed reactor is fed and drained
// directly. This module simulates the policy, scans tau_rel for the highest
// settled cycle-average conversion, and compares the three operating modes.
#pragma once

#include <optional>
#include <vector>

#include "cascade/integrate.hpp"
#include "cascade/model.hpp"
#include "cascade/settle.hpp"

namespace cascade {

struct RelaxationPolicy {
    double tau_rf = 0.0;
    double tau_rel = 0.0;

    void validate() const;  // 0 <= tau_rel <= tau_rf, tau_rf > 0
};

struct SimulateRelaxationResult {
    Trajectory trajectory;
    std::vector<CycleSummary> cycles;
};

// n_cycles relaxation cycles with the flow direction alternating each cycle.
SimulateRelaxationResult simulate_relaxation(const CascadeState& state0, double da,
                                             const ModelParams& params,
                                             const RelaxationPolicy& policy,
                                             const IntegratorSettings& settings, int n_cycles);

// Settling applied to relaxation cycles; same convergence criterion as the
// reverse-flow route.
SettleResult settle_relaxation(const CascadeState& state0, double da, const ModelParams& params,
                               const RelaxationPolicy& policy, const IntegratorSettings& settings,
                               const SettleSettings& settle = {});

struct ScanEntry {
    double tau_rel = 0.0;
    double average = 0.0;
    bool settled = false;
    int cycles = 0;
};

struct ScanResult {
    std::vector<ScanEntry> table;
    double best_tau_rel = 0.0;
    double best_average = 0.0;
    std::optional<double> gain_vs_reverse;   // best / settled reverse-flow average
    std::optional<double> gain_vs_constant;  // best / constant-flow steady conversion
    double cold_check_average = 0.0;         // argmax entry re-settled from the origin
    bool cold_check_consistent = true;
};

// Scans tau_rel over {0, grid_step, ..., tau_rf}. Each grid point warm-starts
// from the previous settled state (the first from the origin); unsettled
// entries stay in the table but are excluded from the argmax, and ties break
// to the smallest tau_rel. The argmax is re-checked from a cold start.
ScanResult scan_tau_rel(double da, const ModelParams& params, double tau_rf, double grid_step,
                        const IntegratorSettings& settings, const SettleSettings& settle = {});

struct ConstantFlowResult {
    CascadeState state;
    double alpha_out = 0.0;
    double elapsed = 0.0;
    bool converged = false;
};

// Integrates the constant-flow cascade until the vector field vanishes at
// the iterate; the end state is the stable steady state in the basin of the
// starting point.
ConstantFlowResult constant_flow_steady(const CascadeState& state0, FlowDirection dir, double da,
                                        const ModelParams& params, double step = 0.01,
                                        double max_time = 1e5);

struct ModeComparison {
    double constant_alpha_out = 0.0;
    double reverse_average = 0.0;
    double relaxation_average = 0.0;
    bool reverse_settled = false;
    bool relaxation_settled = false;
    std::optional<double> reverse_vs_constant;
    std::optional<double> relax_vs_reverse;
    std::optional<double> relax_vs_constant;
};

// Settled outlet conversion of the three operating modes at one Da, plus the
// pairwise gain ratios (absent when a denominator vanishes).
ModeComparison compare_modes(double da, const ModelParams& params, double tau_rf, double tau_rel,
                             const IntegratorSettings& settings, const SettleSettings& settle = {});

}  // namespace cascade
