// Fixed-step RK4 integration of cascade trajectories over reverse-flow
// cycles, with Simpson quadrature of the outlet conversion accumulated on
// the integration grid. Fixed steps hit the phase boundaries exactly and
// keep the period map smooth in its initial conditions, which the shooting
// Jacobians rely on.
#pragma once

#include <vector>

#include "cascade/model.hpp"

namespace cascade {

struct IntegratorSettings {
    // Requested step; <= 0 means one two-thousandth of the span being
    // integrated (tau_rf for cycle integrations). The effective step is
    // adjusted down so every phase length is an even multiple of it.
    double step = 0.0;
    // Trajectory sampling stride in steps; <= 0 records nothing.
    int record_every = 10;
};

struct TrajectorySample {
    double tau = 0.0;
    CascadeState state;
    double alpha_out = 0.0;
    FlowDirection dir = FlowDirection::forward;
    CyclePhase phase = CyclePhase::series;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
};

// Outlet statistics of one cycle: conversion at the cycle boundaries and its
// integral mean over the cycle.
struct CycleSummary {
    double alpha_beg = 0.0;
    double alpha_end = 0.0;
    double alpha_avg = 0.0;
    CascadeState end_state;
};

struct IntegrateResult {
    CascadeState end_state;
    double alpha_out_integral = 0.0;
    Trajectory trajectory;
};

struct CycleResult {
    CascadeState end_state;
    CycleSummary summary;
    Trajectory trajectory;
};

// Uniform grid with an even number of steps (composite Simpson needs the
// parity). Throws std::invalid_argument for a nonpositive duration.
struct StepGrid {
    int steps = 0;
    double h = 0.0;
};
StepGrid make_grid(double duration, double requested_step);

// Advances the state over `duration` with classical RK4 under the given
// phase's vector field, accumulating the Simpson integral of alpha_out on
// the grid nodes. `tau0` offsets the recorded sample times; when
// `record_initial` is false the sample at tau0 is skipped (used when
// concatenating phases so sample times stay strictly increasing).
IntegrateResult integrate(CyclePhase phase, const CascadeState& state0, FlowDirection dir,
                          double da, const ModelParams& params, double duration,
                          const IntegratorSettings& settings, double tau0 = 0.0,
                          bool record_initial = true);

// One full series cycle of length tau_rf with a fixed flow direction.
CycleResult integrate_cycle(const CascadeState& state0, FlowDirection dir, double da,
                            const ModelParams& params, double tau_rf,
                            const IntegratorSettings& settings, double tau0 = 0.0,
                            bool record_initial = true);

// One relaxation cycle: the relaxation vector field on [0, tau_rel] with the
// outlet read from the fed reactor, then the series field on [tau_rel,
// tau_rf]. The cycle average weights both phases by time. tau_rel = 0
// reproduces integrate_cycle on the identical grid.
CycleResult integrate_relax_cycle(const CascadeState& state0, FlowDirection dir, double da,
                                  const ModelParams& params, double tau_rf, double tau_rel,
                                  const IntegratorSettings& settings, double tau0 = 0.0,
                                  bool record_initial = true);

}  // namespace cascade
