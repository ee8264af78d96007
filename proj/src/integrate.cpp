#include "cascade/integrate.hpp"

#include <cmath>
#include <stdexcept>

namespace cascade {

namespace {

CascadeState eval_rhs(CyclePhase phase, const CascadeState& s, FlowDirection dir, double da,
                      const ModelParams& params) {
    return phase == CyclePhase::series ? rhs_series(s, dir, da, params)
                                       : rhs_relaxation(s, dir, da, params);
}

CascadeState rk4_step(CyclePhase phase, const CascadeState& s, FlowDirection dir, double da,
                      const ModelParams& params, double h) {
    const CascadeState k1 = eval_rhs(phase, s, dir, da, params);
    const CascadeState s2{s.alpha1 + 0.5 * h * k1.alpha1, s.alpha2 + 0.5 * h * k1.alpha2};
    const CascadeState k2 = eval_rhs(phase, s2, dir, da, params);
    const CascadeState s3{s.alpha1 + 0.5 * h * k2.alpha1, s.alpha2 + 0.5 * h * k2.alpha2};
    const CascadeState k3 = eval_rhs(phase, s3, dir, da, params);
    const CascadeState s4{s.alpha1 + h * k3.alpha1, s.alpha2 + h * k3.alpha2};
    const CascadeState k4 = eval_rhs(phase, s4, dir, da, params);
    return {s.alpha1 + h / 6.0 * (k1.alpha1 + 2.0 * k2.alpha1 + 2.0 * k3.alpha1 + k4.alpha1),
            s.alpha2 + h / 6.0 * (k1.alpha2 + 2.0 * k2.alpha2 + 2.0 * k3.alpha2 + k4.alpha2)};
}

}  // namespace

StepGrid make_grid(double duration, double requested_step) {
    if (!(duration > 0.0))
        throw std::invalid_argument("make_grid: cannot fit a step into duration " +
                                    std::to_string(duration));
    const double base = requested_step > 0.0 ? requested_step : duration / 2000.0;
    long n = static_cast<long>(std::ceil(duration / base - 1e-9));
    if (n < 2) n = 2;
    if (n % 2 != 0) ++n;  // Simpson parity
    if (n > 100'000'000L)
        throw std::invalid_argument("make_grid: step too small for duration, would need " +
                                    std::to_string(n) + " steps");
    return {static_cast<int>(n), duration / static_cast<double>(n)};
}

IntegrateResult integrate(CyclePhase phase, const CascadeState& state0, FlowDirection dir,
                          double da, const ModelParams& params, double duration,
                          const IntegratorSettings& settings, double tau0, bool record_initial) {
    const StepGrid grid = make_grid(duration, settings.step);

    IntegrateResult result;
    CascadeState s = state0;
    double simpson = 0.0;

    auto node_weight = [&](int k) {
        if (k == 0 || k == grid.steps) return 1.0;
        return k % 2 == 1 ? 4.0 : 2.0;
    };
    auto maybe_record = [&](int k, const CascadeState& state) {
        if (settings.record_every <= 0) return;
        const bool boundary = k == 0 || k == grid.steps;
        if (!boundary && k % settings.record_every != 0) return;
        if (k == 0 && !record_initial) return;
        result.trajectory.samples.push_back(
            {tau0 + k * grid.h, state, alpha_out(state, dir, phase), dir, phase});
    };

    simpson += node_weight(0) * alpha_out(s, dir, phase);
    maybe_record(0, s);
    for (int k = 1; k <= grid.steps; ++k) {
        s = rk4_step(phase, s, dir, da, params, grid.h);
        simpson += node_weight(k) * alpha_out(s, dir, phase);
        maybe_record(k, s);
    }

    result.end_state = s;
    result.alpha_out_integral = simpson * grid.h / 3.0;
    return result;
}

CycleResult integrate_cycle(const CascadeState& state0, FlowDirection dir, double da,
                            const ModelParams& params, double tau_rf,
                            const IntegratorSettings& settings, double tau0,
                            bool record_initial) {
    IntegratorSettings cycle_settings = settings;
    if (cycle_settings.step <= 0.0) cycle_settings.step = tau_rf / 2000.0;

    IntegrateResult r = integrate(CyclePhase::series, state0, dir, da, params, tau_rf,
                                  cycle_settings, tau0, record_initial);
    CycleResult out;
    out.end_state = r.end_state;
    out.trajectory = std::move(r.trajectory);
    out.summary.alpha_beg = alpha_out(state0, dir, CyclePhase::series);
    out.summary.alpha_end = alpha_out(r.end_state, dir, CyclePhase::series);
    out.summary.alpha_avg = r.alpha_out_integral / tau_rf;
    out.summary.end_state = r.end_state;
    return out;
}

CycleResult integrate_relax_cycle(const CascadeState& state0, FlowDirection dir, double da,
                                  const ModelParams& params, double tau_rf, double tau_rel,
                                  const IntegratorSettings& settings, double tau0,
                                  bool record_initial) {
    if (!(tau_rf > 0.0))
        throw std::invalid_argument("integrate_relax_cycle: tau_rf must be positive");
    if (tau_rel < 0.0 || tau_rel > tau_rf)
        throw std::invalid_argument("integrate_relax_cycle: tau_rel must lie in [0, tau_rf]");

    if (tau_rel == 0.0)
        return integrate_cycle(state0, dir, da, params, tau_rf, settings, tau0, record_initial);

    IntegratorSettings phase_settings = settings;
    if (phase_settings.step <= 0.0) phase_settings.step = tau_rf / 2000.0;

    IntegrateResult relax = integrate(CyclePhase::relaxing, state0, dir, da, params, tau_rel,
                                      phase_settings, tau0, record_initial);

    CycleResult out;
    out.summary.alpha_beg = alpha_out(state0, dir, CyclePhase::relaxing);

    if (tau_rel == tau_rf) {
        out.end_state = relax.end_state;
        out.trajectory = std::move(relax.trajectory);
        out.summary.alpha_end = alpha_out(relax.end_state, dir, CyclePhase::relaxing);
        out.summary.alpha_avg = relax.alpha_out_integral / tau_rf;
        out.summary.end_state = relax.end_state;
        return out;
    }

    // The sample at tau_rel is recorded once, tagged with the series phase
    // that takes over there.
    IntegrateResult series = integrate(CyclePhase::series, relax.end_state, dir, da, params,
                                       tau_rf - tau_rel, phase_settings, tau0 + tau_rel, true);
    out.end_state = series.end_state;
    out.trajectory = std::move(relax.trajectory);
    if (!out.trajectory.samples.empty() && !series.trajectory.samples.empty() &&
        out.trajectory.samples.back().tau >= series.trajectory.samples.front().tau)
        out.trajectory.samples.pop_back();
    out.trajectory.samples.insert(out.trajectory.samples.end(), series.trajectory.samples.begin(),
                                  series.trajectory.samples.end());
    out.summary.alpha_end = alpha_out(series.end_state, dir, CyclePhase::series);
    out.summary.alpha_avg = (relax.alpha_out_integral + series.alpha_out_integral) / tau_rf;
    out.summary.end_state = series.end_state;
    return out;
}

}  // namespace cascade
