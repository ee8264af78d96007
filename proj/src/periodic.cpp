#include "cascade/periodic.hpp"

#include <algorithm>
#include <cmath>

#include "cascade/errors.hpp"
#include "cascade/runtime.hpp"

namespace cascade {

namespace {

constexpr double kSingularDet = 1e-14;

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

CascadeState clamp_box(const CascadeState& s) { return {clamp01(s.alpha1), clamp01(s.alpha2)}; }

IntegratorSettings quiet(const IntegratorSettings& settings) {
    IntegratorSettings s = settings;
    s.record_every = 0;
    return s;
}

}  // namespace

double ShootingResidual::max_abs() const { return std::max(std::abs(f1), std::abs(f2)); }

CascadeState period_map(const CascadeState& state0, FlowDirection dir, double da,
                        const ModelParams& params, double tau_rf,
                        const IntegratorSettings& settings) {
    return integrate_cycle(state0, dir, da, params, tau_rf, quiet(settings)).end_state;
}

ShootingResidual residual_periodic(const CascadeState& state0, FlowDirection dir, double da,
                                   const ModelParams& params, double tau_rf,
                                   const IntegratorSettings& settings) {
    const CascadeState end = period_map(state0, dir, da, params, tau_rf, settings);
    return {end.alpha1 - state0.alpha2, end.alpha2 - state0.alpha1};
}

ShootingJacobian shooting_jacobian(const CascadeState& state0, FlowDirection dir, double da,
                                   const ModelParams& params, double tau_rf,
                                   const IntegratorSettings& settings, const ShootSettings& shoot) {
    ShootingJacobian jac;
    const double h = shoot.fd_alpha;

    auto res = [&](const CascadeState& s, double p) {
        return residual_periodic(s, dir, p, params, tau_rf, settings);
    };

    // Columns in the start state; falls back to one-sided differences when a
    // perturbation would leave the box.
    for (int col = 0; col < 2; ++col) {
        const double base = col == 0 ? state0.alpha1 : state0.alpha2;
        double up = base + h, down = base - h, span = 2.0 * h;
        if (up > 1.0) {
            up = base;
            span = h;
            jac.one_sided = true;
        } else if (down < 0.0) {
            down = base;
            span = h;
            jac.one_sided = true;
        }
        CascadeState s_up = state0, s_down = state0;
        (col == 0 ? s_up.alpha1 : s_up.alpha2) = up;
        (col == 0 ? s_down.alpha1 : s_down.alpha2) = down;
        const ShootingResidual r_up = res(s_up, da);
        const ShootingResidual r_down = res(s_down, da);
        const double d1 = (r_up.f1 - r_down.f1) / span;
        const double d2 = (r_up.f2 - r_down.f2) / span;
        if (col == 0) {
            jac.a.a11 = d1;
            jac.a.a21 = d2;
        } else {
            jac.a.a12 = d1;
            jac.a.a22 = d2;
        }
    }

    double hd = shoot.fd_da > 0.0 ? shoot.fd_da : 1e-8 * std::max(da, 1e-3);
    double da_up = da + hd, da_down = da - hd, span = 2.0 * hd;
    if (da_down < 0.0) {
        da_down = da;
        span = hd;
        jac.one_sided = true;
    }
    const ShootingResidual r_up = res(state0, da_up);
    const ShootingResidual r_down = res(state0, da_down);
    jac.b = {(r_up.f1 - r_down.f1) / span, (r_up.f2 - r_down.f2) / span};
    return jac;
}

Mat2 flow_map_derivative(const ShootingJacobian& jac) {
    // F(s) = Phi(s) - P s with P the component swap, so D Phi = A + P.
    return {jac.a.a11, jac.a.a12 + 1.0, jac.a.a21 + 1.0, jac.a.a22};
}

bool floquet_stable(const ShootingJacobian& jac) {
    const Mat2 dphi = flow_map_derivative(jac);
    // Full-period derivative at a symmetric orbit: (P DPhi P) DPhi.
    const Mat2 conjugated{dphi.a22, dphi.a21, dphi.a12, dphi.a11};
    return spectral_radius(conjugated * dphi) < 1.0;
}

namespace {

PeriodicPoint make_periodic_point(const CascadeState& s, FlowDirection dir, double da,
                                  const ModelParams& params, double tau_rf,
                                  const IntegratorSettings& settings,
                                  const ShootingJacobian& jac) {
    PeriodicPoint point;
    point.da = da;
    point.start_state = s;
    point.summary = integrate_cycle(s, dir, da, params, tau_rf, quiet(settings)).summary;
    point.det_sign = sign_of(jac.a.det());
    point.floquet_stable = floquet_stable(jac);
    return point;
}

}  // namespace

ShootResult newton_shoot(const CascadeState& guess, FlowDirection dir, double da,
                         const ModelParams& params, double tau_rf,
                         const IntegratorSettings& settings, const ShootSettings& shoot) {
    CascadeState s = clamp_box(guess);
    ShootingResidual f = residual_periodic(s, dir, da, params, tau_rf, settings);

    for (int it = 0; it < shoot.max_iter; ++it) {
        if (f.max_abs() < shoot.tol) {
            const ShootingJacobian jac = shooting_jacobian(s, dir, da, params, tau_rf, settings, shoot);
            ShootResult result;
            result.point = make_periodic_point(s, dir, da, params, tau_rf, settings, jac);
            result.jacobian = jac;
            result.iterations = it;
            return result;
        }
        const ShootingJacobian jac = shooting_jacobian(s, dir, da, params, tau_rf, settings, shoot);
        if (std::abs(jac.a.det()) < kSingularDet)
            throw SingularJacobian("newton_shoot: singular shooting Jacobian at Da " +
                                   std::to_string(da));
        const Vec2 step = solve(jac.a, {f.f1, f.f2});
        double lambda = 1.0;
        CascadeState trial;
        ShootingResidual ft;
        for (;;) {
            trial = clamp_box({s.alpha1 - lambda * step.v1, s.alpha2 - lambda * step.v2});
            ft = residual_periodic(trial, dir, da, params, tau_rf, settings);
            if (ft.max_abs() < f.max_abs() || ft.max_abs() < shoot.tol || lambda < 1.0 / 1024.0)
                break;
            lambda *= 0.5;
        }
        s = trial;
        f = ft;
    }
    if (f.max_abs() < shoot.tol) {
        const ShootingJacobian jac = shooting_jacobian(s, dir, da, params, tau_rf, settings, shoot);
        ShootResult result;
        result.point = make_periodic_point(s, dir, da, params, tau_rf, settings, jac);
        result.jacobian = jac;
        result.iterations = shoot.max_iter;
        return result;
    }
    throw NonConvergence("newton_shoot: no convergence after " + std::to_string(shoot.max_iter) +
                             " iterations at Da " + std::to_string(da),
                         f.max_abs());
}

PeriodicPoint continuation_step_periodic(const PeriodicPoint& point, FlowDirection dir,
                                         const ModelParams& params, double tau_rf, double d_da,
                                         const IntegratorSettings& settings,
                                         const ShootSettings& shoot) {
    const ShootingJacobian jac =
        shooting_jacobian(point.start_state, dir, point.da, params, tau_rf, settings, shoot);
    const double det = jac.a.det();
    if (std::abs(det) < kSingularDet)
        throw SingularJacobian("continuation_step_periodic: singular shooting Jacobian at Da " +
                               std::to_string(point.da));
    const Vec2 tangent = solve(jac.a, jac.b);
    const double signed_dp = sign_of(det) * d_da;
    const CascadeState next = clamp_box({point.start_state.alpha1 - tangent.v1 * signed_dp,
                                         point.start_state.alpha2 - tangent.v2 * signed_dp});
    const double da_next = point.da + signed_dp;
    const ShootingJacobian jac_next =
        shooting_jacobian(next, dir, da_next, params, tau_rf, settings, shoot);
    return make_periodic_point(next, dir, da_next, params, tau_rf, settings, jac_next);
}

PeriodicBranch trace_branch_periodic(const PeriodicPoint& start, FlowDirection dir,
                                     const ModelParams& params, double tau_rf,
                                     const ContinuationSettings& settings,
                                     const IntegratorSettings& integ, const ShootSettings& shoot) {
    PeriodicBranch branch;
    branch.beg.kind = CurveKind::beg;
    branch.end.kind = CurveKind::end;
    branch.av.kind = CurveKind::av;

    auto emit = [&](const PeriodicPoint& point) {
        branch.points.push_back(point);
        BranchPoint bp;
        bp.p = point.da;
        bp.state = point.start_state;
        bp.det_sign = point.det_sign;
        bp.stable = point.floquet_stable;
        bp.alpha_out = point.summary.alpha_beg;
        branch.beg.points.push_back(bp);
        bp.alpha_out = point.summary.alpha_end;
        branch.end.points.push_back(bp);
        bp.alpha_out = point.summary.alpha_avg;
        branch.av.points.push_back(bp);
    };
    auto pop_last = [&] {
        branch.points.pop_back();
        branch.beg.points.pop_back();
        branch.end.points.pop_back();
        branch.av.points.pop_back();
    };

    // The walk carries the shooting Jacobian forward: the matrix evaluated
    // at point k both tags that point and supplies its predictor step.
    CascadeState s = newton_shoot(start.start_state, dir, start.da, params, tau_rf, integ, shoot)
                         .point.start_state;
    double da = start.da;

    // Anchor the determinant-sign rule so the first step heads into the
    // wider side of the parameter window; folds still reverse the walk.
    int orient = 0;

    double stall_lo = da, stall_hi = da;
    long stall_block = 0;
    double retry_scale = 1.0;

    for (long step = 0; step <= settings.max_steps; ++step) {
        const ShootingJacobian jac = shooting_jacobian(s, dir, da, params, tau_rf, integ, shoot);
        const double det = jac.a.det();
        PeriodicPoint point = make_periodic_point(s, dir, da, params, tau_rf, integ, jac);

        if (std::abs(det) < kSingularDet) {
            // Exact fold hit: back off to the previous point and re-approach
            // with a halved increment.
            if (branch.points.empty() || retry_scale < 1e-12)
                throw NonConvergence("trace_branch_periodic: fold could not be traversed at Da " +
                                         std::to_string(da),
                                     std::abs(det));
            s = branch.points.back().start_state;
            da = branch.points.back().da;
            pop_last();
            retry_scale *= 0.5;
            continue;
        }
        emit(point);

        if (da < settings.p_min || da > settings.p_max) break;

        if (orient == 0) {
            const bool prefer_up = da - settings.p_min <= settings.p_max - da;
            orient = point.det_sign == (prefer_up ? 1 : -1) ? 1 : -1;
        }

        double d_da = orient * settings.dp * retry_scale;
        retry_scale = 1.0;
        const Vec2 tangent = solve(jac.a, jac.b);
        const double signed_dp = sign_of(det) * d_da;
        s = clamp_box({s.alpha1 - tangent.v1 * signed_dp, s.alpha2 - tangent.v2 * signed_dp});
        da += signed_dp;

        if ((step + 1) % settings.refine_every == 0 && std::abs(det) >= settings.det_threshold) {
            try {
                s = newton_shoot(s, dir, da, params, tau_rf, integ, shoot).point.start_state;
            } catch (const NumericalError&) {
                // Keep the predictor point when near-fold refinement fails.
            }
        }

        stall_lo = std::min(stall_lo, da);
        stall_hi = std::max(stall_hi, da);
        if (++stall_block >= 10'000) {
            if (stall_hi - stall_lo < 10.0 * settings.dp)
                throw NonConvergence("trace_branch_periodic: parameter stalled near Da " +
                                         std::to_string(da),
                                     stall_hi - stall_lo);
            stall_block = 0;
            stall_lo = stall_hi = da;
        }
    }
    return branch;
}

SettleResult settle_to_attractor(const CascadeState& state0, double da, const ModelParams& params,
                                 double tau_rf, const IntegratorSettings& settings,
                                 const SettleSettings& settle) {
    const IntegratorSettings qs = quiet(settings);
    auto cycle = [&](const CascadeState& s, FlowDirection dir) {
        return integrate_cycle(s, dir, da, params, tau_rf, qs);
    };
    return detail::settle_loop(cycle, clamp_box(state0), settle);
}

std::vector<SettleResult> find_attractors(double da, const ModelParams& params, double tau_rf,
                                          const IntegratorSettings& settings, int grid_n,
                                          const SettleSettings& settle) {
    std::vector<CascadeState> seeds;
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j < grid_n; ++j) {
            const double a = grid_n == 1 ? 0.5 : 0.1 + 0.8 * i / (grid_n - 1);
            const double b = grid_n == 1 ? 0.5 : 0.1 + 0.8 * j / (grid_n - 1);
            seeds.push_back({a, b});
        }

    std::vector<SettleResult> settled(seeds.size());
    parallel_for(static_cast<int>(seeds.size()), [&](int i) {
        settled[i] = settle_to_attractor(seeds[i], da, params, tau_rf, settings, settle);
    });

    std::vector<SettleResult> distinct;
    for (const SettleResult& r : settled) {
        if (!r.converged) continue;
        const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](const SettleResult& d) {
            return std::abs(d.average - r.average) <= 1e-4;
        });
        if (!seen) distinct.push_back(r);
    }
    std::sort(distinct.begin(), distinct.end(),
              [](const SettleResult& a, const SettleResult& b) { return a.average < b.average; });
    return distinct;
}

}  // namespace cascade
