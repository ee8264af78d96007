// Shared settling loop: advances a cyclically forced system one cycle at a
// time, alternating the flow direction, until the start-of-cycle state
// repeats over a full two-cycle period.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "cascade/integrate.hpp"
#include "cascade/model.hpp"

namespace cascade {

struct SettleSettings {
    int max_cycles = 5000;  // cap on tau_rf cycles
    double tol = 1e-9;      // max-norm change of the even-cycle start state
};

struct SettleResult {
    bool converged = false;
    int cycles = 0;             // cycles executed before the convergence check passed
    CascadeState start_state;   // start of a forward (even-index) cycle
    double average = 0.0;       // mean outlet conversion over one full period
    CycleSummary forward_cycle; // summary of the forward cycle at the settled state
    std::vector<CascadeState> trail;  // trailing even-cycle starts when not converged
};

inline double max_abs_diff(const CascadeState& a, const CascadeState& b) {
    return std::max(std::abs(a.alpha1 - b.alpha1), std::abs(a.alpha2 - b.alpha2));
}

namespace detail {

// cycle_fn(state, dir) must integrate exactly one cycle and return its result.
inline SettleResult settle_loop(
    const std::function<CycleResult(const CascadeState&, FlowDirection)>& cycle_fn,
    CascadeState state0, const SettleSettings& settings) {
    SettleResult result;
    CascadeState s = state0;
    CascadeState prev_even = state0;
    std::vector<CascadeState> trail{state0};

    for (int j = 0; j < settings.max_cycles; ++j) {
        const CycleResult cycle = cycle_fn(s, direction_for_cycle(j));
        s = cycle.end_state;
        if (j % 2 == 1) {
            // s is now the start of even cycle j+1.
            if (max_abs_diff(s, prev_even) < settings.tol) {
                result.converged = true;
                result.cycles = j + 1;
                result.start_state = s;
                const CycleResult fwd = cycle_fn(s, FlowDirection::forward);
                const CycleResult rev = cycle_fn(fwd.end_state, FlowDirection::reversed);
                result.forward_cycle = fwd.summary;
                result.average = 0.5 * (fwd.summary.alpha_avg + rev.summary.alpha_avg);
                return result;
            }
            prev_even = s;
            trail.push_back(s);
            if (trail.size() > 8) trail.erase(trail.begin());
        }
    }
    result.cycles = settings.max_cycles;
    result.start_state = s;
    result.trail = std::move(trail);
    return result;
}

}  // namespace detail
}  // namespace cascade
