// Steady states of the constant-flow cascade and their continuation in the
// Damkohler number. The branch walker is an Euler predictor whose parameter
// direction follows the sign of the Jacobian determinant, so folds are
// traversed without any explicit turning-point handling; a fixed-parameter
// Newton corrector runs periodically to bound predictor drift. A brute-force
// grid/bisection oracle provides independent steady states for validation.
#pragma once

#include <optional>
#include <vector>

#include "cascade/mat2.hpp"
#include "cascade/model.hpp"

namespace cascade {

struct SteadyResidual {
    double f1 = 0.0;
    double f2 = 0.0;
    double max_abs() const;
};

struct ContinuationSettings {
    double dp = 1e-5;         // parameter increment
    double p_min = 1e-4;      // lower parameter bound
    double p_max = 0.06;      // upper parameter bound
    long max_steps = 2'000'000;
    int refine_every = 50;    // Newton corrector cadence, in continuation steps
    double det_threshold = 1e-8;  // skip the corrector closer to a fold than this
    double refine_tol = 1e-12;
    int refine_max_iter = 20;
};

struct BranchPoint {
    double p = 0.0;  // Damkohler number
    CascadeState state;
    double alpha_out = 0.0;
    int det_sign = 1;
    std::optional<bool> stable;
};

enum class CurveKind { ss, beg, end, av };

const char* curve_kind_name(CurveKind kind);

struct DiagramCurve {
    CurveKind kind = CurveKind::ss;
    std::vector<BranchPoint> points;
};

// f1 = IO a2 + phi(a1) - a1, f2 = (1-IO) a1 + phi(a2) - a2.
SteadyResidual residual_ss(const CascadeState& s, FlowDirection dir, double da,
                           const ModelParams& params);

// Analytic Jacobian of the residual; also the Jacobian of the series vector
// field, so its eigenvalues decide stability.
Mat2 jacobian_ss(const CascadeState& s, FlowDirection dir, double da, const ModelParams& params);

// Derivative of the residual with respect to the continuation parameter Da.
Vec2 w_vector(const CascadeState& s, const ModelParams& params);

// One Euler predictor step; the parameter moves by sign(det J) * dp, so a
// negative dp flips the walk's orientation. Throws SingularJacobian when
// |det J| < 1e-14 (an exact fold hit); the caller retries with a halved
// increment.
BranchPoint continuation_step_ss(const BranchPoint& point, FlowDirection dir,
                                 const ModelParams& params, double dp);

// Fixed-parameter Newton corrector. Throws NonConvergence with the final
// residual when max_iter is exhausted.
CascadeState newton_refine_ss(const CascadeState& s, FlowDirection dir, double da,
                              const ModelParams& params, double tol = 1e-12, int max_iter = 20);

// Independent brute-force solver: scans phi(a) - a = 0 for the upstream
// reactor on a uniform grid, bisects every sign change, then repeats for the
// downstream residual at each root. Returns all combinations, sorted.
std::vector<CascadeState> find_steady_states_oracle(double da, FlowDirection dir,
                                                    const ModelParams& params,
                                                    int grid_size = 200'000);

// Builds a fully tagged branch point (residual untouched) at a given state.
BranchPoint make_branch_point(const CascadeState& s, FlowDirection dir, double p,
                              const ModelParams& params);

// Walks the branch from a refined starting point until the parameter leaves
// [p_min, p_max] or max_steps is exhausted. Aborts with NonConvergence when
// the parameter stalls inside a window of 10 dp for 10^4 consecutive steps.
DiagramCurve trace_branch_ss(const BranchPoint& start, FlowDirection dir,
                             const ModelParams& params, const ContinuationSettings& settings);

}  // namespace cascade
