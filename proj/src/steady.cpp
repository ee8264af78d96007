#include "cascade/steady.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "cascade/errors.hpp"

namespace cascade {

namespace {

constexpr double kSingularDet = 1e-14;

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

CascadeState clamp_box(const CascadeState& s) { return {clamp01(s.alpha1), clamp01(s.alpha2)}; }

// Bisects f on [lo, hi] assuming a sign change (or an exact zero endpoint).
double bisect(const std::function<double(double)>& f, double lo, double hi, double flo) {
    if (flo == 0.0) return lo;
    for (int i = 0; i < 80 && hi - lo > 1e-16; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// All roots of f on [0, 1] found by a uniform scan plus bisection.
std::vector<double> scan_roots(const std::function<double(double)>& f, int grid) {
    std::vector<double> roots;
    double x_prev = 0.0;
    double f_prev = f(0.0);
    if (f_prev == 0.0) roots.push_back(0.0);
    for (int i = 1; i <= grid; ++i) {
        const double x = static_cast<double>(i) / grid;
        const double fx = f(x);
        if (fx == 0.0) {
            roots.push_back(x);
        } else if (f_prev != 0.0 && (f_prev < 0.0) != (fx < 0.0)) {
            roots.push_back(bisect(f, x_prev, x, f_prev));
        }
        x_prev = x;
        f_prev = fx;
    }
    return roots;
}

}  // namespace

double SteadyResidual::max_abs() const { return std::max(std::abs(f1), std::abs(f2)); }

const char* curve_kind_name(CurveKind kind) {
    switch (kind) {
        case CurveKind::ss: return "ss";
        case CurveKind::beg: return "beg";
        case CurveKind::end: return "end";
        case CurveKind::av: return "av";
    }
    return "?";
}

SteadyResidual residual_ss(const CascadeState& s, FlowDirection dir, double da,
                           const ModelParams& params) {
    const CascadeState rate = rhs_series(s, dir, da, params);
    return {rate.alpha1, rate.alpha2};
}

Mat2 jacobian_ss(const CascadeState& s, FlowDirection dir, double da, const ModelParams& params) {
    const double io = io_value(dir);
    return {dphi_dalpha(s.alpha1, da, params) - 1.0, io,
            1.0 - io, dphi_dalpha(s.alpha2, da, params) - 1.0};
}

Vec2 w_vector(const CascadeState& s, const ModelParams& params) {
    return {dphi_dda(s.alpha1, params), dphi_dda(s.alpha2, params)};
}

BranchPoint make_branch_point(const CascadeState& s, FlowDirection dir, double p,
                              const ModelParams& params) {
    const Mat2 j = jacobian_ss(s, dir, p, params);
    BranchPoint point;
    point.p = p;
    point.state = s;
    point.alpha_out = alpha_out(s, dir, CyclePhase::series);
    point.det_sign = sign_of(j.det());
    point.stable = eigenvalues_negative(j);
    return point;
}

BranchPoint continuation_step_ss(const BranchPoint& point, FlowDirection dir,
                                 const ModelParams& params, double dp) {
    const Mat2 j = jacobian_ss(point.state, dir, point.p, params);
    const double det = j.det();
    if (std::abs(det) < kSingularDet)
        throw SingularJacobian("continuation_step_ss: Jacobian determinant " +
                               std::to_string(det) + " at Da " + std::to_string(point.p));
    const Vec2 w = w_vector(point.state, params);
    const Vec2 tangent = solve(j, w);
    const double signed_dp = sign_of(det) * dp;
    // Predicted iterates stay in the model's box; the corrector absorbs the
    // projection error on the rare step that actually clamps.
    const CascadeState next = clamp_box({point.state.alpha1 - tangent.v1 * signed_dp,
                                         point.state.alpha2 - tangent.v2 * signed_dp});
    return make_branch_point(next, dir, point.p + signed_dp, params);
}

CascadeState newton_refine_ss(const CascadeState& s, FlowDirection dir, double da,
                              const ModelParams& params, double tol, int max_iter) {
    CascadeState x = clamp_box(s);
    SteadyResidual f = residual_ss(x, dir, da, params);
    for (int it = 0; it < max_iter; ++it) {
        if (f.max_abs() < tol) return x;
        const Mat2 j = jacobian_ss(x, dir, da, params);
        if (std::abs(j.det()) < kSingularDet)
            throw SingularJacobian("newton_refine_ss: singular Jacobian at Da " +
                                   std::to_string(da));
        const Vec2 step = solve(j, {f.f1, f.f2});
        double lambda = 1.0;
        CascadeState trial;
        SteadyResidual ft;
        for (;;) {
            trial = clamp_box({x.alpha1 - lambda * step.v1, x.alpha2 - lambda * step.v2});
            ft = residual_ss(trial, dir, da, params);
            if (ft.max_abs() < f.max_abs() || ft.max_abs() < tol || lambda < 1.0 / 1024.0) break;
            lambda *= 0.5;
        }
        x = trial;
        f = ft;
    }
    if (f.max_abs() < tol) return x;
    throw NonConvergence("newton_refine_ss: no convergence after " + std::to_string(max_iter) +
                             " iterations",
                         f.max_abs());
}

std::vector<CascadeState> find_steady_states_oracle(double da, FlowDirection dir,
                                                    const ModelParams& params, int grid_size) {
    // The upstream reactor (the one receiving fresh feed) decouples, so its
    // residual is scanned first; each root then parameterizes the
    // downstream residual.
    auto upstream = [&](double a) { return phi(a, da, params) - a; };
    std::vector<CascadeState> states;
    for (double a_up : scan_roots(upstream, grid_size)) {
        auto downstream = [&](double a) { return a_up + phi(a, da, params) - a; };
        for (double a_down : scan_roots(downstream, grid_size)) {
            if (dir == FlowDirection::forward)
                states.push_back({a_up, a_down});
            else
                states.push_back({a_down, a_up});
        }
    }
    std::sort(states.begin(), states.end(), [](const CascadeState& a, const CascadeState& b) {
        if (a.alpha1 != b.alpha1) return a.alpha1 < b.alpha1;
        return a.alpha2 < b.alpha2;
    });
    return states;
}

DiagramCurve trace_branch_ss(const BranchPoint& start, FlowDirection dir,
                             const ModelParams& params, const ContinuationSettings& settings) {
    DiagramCurve curve;
    curve.kind = CurveKind::ss;

    CascadeState refined =
        newton_refine_ss(start.state, dir, start.p, params, settings.refine_tol,
                         settings.refine_max_iter);
    BranchPoint point = make_branch_point(refined, dir, start.p, params);
    curve.points.push_back(point);

    // The determinant-sign rule fixes the direction only up to the branch
    // orientation; anchor it so the first step heads into the wider side of
    // the parameter window. Folds still reverse the walk.
    const bool prefer_up = point.p - settings.p_min <= settings.p_max - point.p;
    const int orient = point.det_sign == (prefer_up ? 1 : -1) ? 1 : -1;

    double stall_lo = point.p, stall_hi = point.p;
    long stall_block = 0;

    for (long step = 1; step <= settings.max_steps; ++step) {
        double dp = orient * settings.dp;
        BranchPoint next;
        for (int attempt = 0;; ++attempt) {
            try {
                next = continuation_step_ss(point, dir, params, dp);
                break;
            } catch (const SingularJacobian&) {
                // Exact fold hit: back off to the previous point and
                // re-approach with a halved increment.
                if (attempt >= 40 || curve.points.size() < 2)
                    throw NonConvergence(
                        "trace_branch_ss: fold could not be traversed at Da " +
                            std::to_string(point.p),
                        0.0);
                curve.points.pop_back();
                point = curve.points.back();
                dp *= 0.5;
            }
        }

        if (step % settings.refine_every == 0) {
            const Mat2 j = jacobian_ss(next.state, dir, next.p, params);
            if (std::abs(j.det()) >= settings.det_threshold) {
                try {
                    const CascadeState corrected =
                        newton_refine_ss(next.state, dir, next.p, params, settings.refine_tol,
                                         settings.refine_max_iter);
                    next = make_branch_point(corrected, dir, next.p, params);
                } catch (const NonConvergence&) {
                    // Fixed-parameter correction is ill-posed close to a
                    // fold; keep the predictor point and move on.
                }
            }
        }

        point = next;
        curve.points.push_back(point);
        if (point.p < settings.p_min || point.p > settings.p_max) break;

        stall_lo = std::min(stall_lo, point.p);
        stall_hi = std::max(stall_hi, point.p);
        if (++stall_block >= 10'000) {
            if (stall_hi - stall_lo < 10.0 * settings.dp)
                throw NonConvergence("trace_branch_ss: parameter stalled near Da " +
                                         std::to_string(point.p),
                                     stall_hi - stall_lo);
            stall_block = 0;
            stall_lo = stall_hi = point.p;
        }
    }
    return curve;
}

}  // namespace cascade
