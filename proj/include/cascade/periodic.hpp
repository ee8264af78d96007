// Enforced periodic regimes of the reverse-flow cascade. The cascade's swap
// symmetry makes one half of the full two-cycle period sufficient: a
// symmetric orbit is a state whose one-cycle image equals its component
// swap. Orbits are found by Newton shooting on that condition and continued
// in the Damkohler number with the same determinant-sign fold rule as the
// steady branch; the Jacobians of the flow map come from central finite
// differences, since the map itself is only available numerically.
#pragma once

#include <optional>
#include <vector>

#include "cascade/integrate.hpp"
#include "cascade/mat2.hpp"
#include "cascade/model.hpp"
#include "cascade/settle.hpp"
#include "cascade/steady.hpp"

namespace cascade {

struct ShootingResidual {
    double f1 = 0.0;  // alpha1(tau_rf) - alpha2(0)
    double f2 = 0.0;  // alpha2(tau_rf) - alpha1(0)
    double max_abs() const;
};

struct ShootingJacobian {
    Mat2 a;             // derivative of the residual in the cycle-start state
    Vec2 b;             // derivative of the residual in Da
    bool one_sided = false;  // a boundary forced one-sided differences
};

struct PeriodicPoint {
    double da = 0.0;
    CascadeState start_state;
    CycleSummary summary;
    int det_sign = 1;
    std::optional<bool> floquet_stable;
};

struct ShootSettings {
    double tol = 1e-10;
    int max_iter = 30;
    double fd_alpha = 1e-6;  // finite-difference step in the start state
    double fd_da = 0.0;      // finite-difference step in Da; <= 0 means 1e-8 max(Da, 1e-3)
};

struct ShootResult {
    PeriodicPoint point;
    ShootingJacobian jacobian;  // evaluated at the converged state
    int iterations = 0;
};

// State after one cycle of length tau_rf with a fixed flow direction.
CascadeState period_map(const CascadeState& state0, FlowDirection dir, double da,
                        const ModelParams& params, double tau_rf,
                        const IntegratorSettings& settings);

ShootingResidual residual_periodic(const CascadeState& state0, FlowDirection dir, double da,
                                   const ModelParams& params, double tau_rf,
                                   const IntegratorSettings& settings);

ShootingJacobian shooting_jacobian(const CascadeState& state0, FlowDirection dir, double da,
                                   const ModelParams& params, double tau_rf,
                                   const IntegratorSettings& settings,
                                   const ShootSettings& shoot = {});

// Damped Newton iteration on the shooting residual. Throws NonConvergence /
// SingularJacobian on failure.
ShootResult newton_shoot(const CascadeState& guess, FlowDirection dir, double da,
                         const ModelParams& params, double tau_rf,
                         const IntegratorSettings& settings, const ShootSettings& shoot = {});

// One Euler predictor step along the periodic branch; Da moves by
// sign(det A) * d_da and the start state by the corresponding tangent.
PeriodicPoint continuation_step_periodic(const PeriodicPoint& point, FlowDirection dir,
                                         const ModelParams& params, double tau_rf, double d_da,
                                         const IntegratorSettings& settings,
                                         const ShootSettings& shoot = {});

struct PeriodicBranch {
    std::vector<PeriodicPoint> points;
    DiagramCurve beg, end, av;  // aligned with points
};

// Walks the periodic branch from a converged point, emitting the cycle-begin,
// cycle-end and cycle-average outlet conversions as three aligned curves.
PeriodicBranch trace_branch_periodic(const PeriodicPoint& start, FlowDirection dir,
                                     const ModelParams& params, double tau_rf,
                                     const ContinuationSettings& settings,
                                     const IntegratorSettings& integ,
                                     const ShootSettings& shoot = {});

// Plain simulation route: alternates the flow direction each cycle and stops
// once the even-cycle start state repeats within tolerance.
SettleResult settle_to_attractor(const CascadeState& state0, double da, const ModelParams& params,
                                 double tau_rf, const IntegratorSettings& settings,
                                 const SettleSettings& settle = {});

// Multiplicity search: settles from a grid_n x grid_n grid of initial states
// and keeps one representative per distinct settled cycle average (averages
// closer than 1e-4 count as the same oscillation state).
std::vector<SettleResult> find_attractors(double da, const ModelParams& params, double tau_rf,
                                          const IntegratorSettings& settings, int grid_n = 5,
                                          const SettleSettings& settle = {});

// Derivative of the one-cycle flow map, recovered from the shooting Jacobian.
Mat2 flow_map_derivative(const ShootingJacobian& jac);

// Spectral radius of the two-cycle (full-period) map derivative at a
// symmetric orbit; < 1 means the enforced orbit is stable.
bool floquet_stable(const ShootingJacobian& jac);

}  // namespace cascade
