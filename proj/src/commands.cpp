#include "cascade/commands.hpp"

#include <cstdio>
#include <string>
#include <vector>

#include "cascade/errors.hpp"
#include "cascade/io.hpp"
#include "cascade/periodic.hpp"
#include "cascade/relaxation.hpp"
#include "cascade/steady.hpp"

namespace cascade {

namespace {

MetaBlock base_meta(const RunConfig& config, const std::string& command) {
    MetaBlock meta;
    meta.add("command", command);
    meta.add("gamma", config.params.gamma);
    meta.add("beta", config.params.beta);
    meta.add("order", config.params.order);
    return meta;
}

void append_range_meta(MetaBlock& meta, const RunConfig& config) {
    meta.add("da_min", config.da_range->first);
    meta.add("da_max", config.da_range->second);
    meta.add("dp", config.dp);
}

void append_integrator_meta(MetaBlock& meta, const RunConfig& config) {
    meta.add("step", config.step);
    meta.add("record_every", static_cast<long>(config.record_every));
}

ContinuationSettings continuation_settings(const RunConfig& config) {
    ContinuationSettings s;
    s.dp = config.dp;
    s.p_min = config.da_range->first;
    s.p_max = config.da_range->second;
    return s;
}

void require_out(const RunConfig& config) {
    if (config.out.empty()) throw UsageError("missing --out path");
}

// Continuation failures leave a sidecar log next to the requested output.
template <typename Fn>
auto with_sidecar_log(const std::string& out_path, Fn&& fn) {
    try {
        return fn();
    } catch (const NumericalError& e) {
        write_file_atomic(out_path + ".log", std::string("aborted: ") + e.what() + "\n");
        throw;
    }
}

std::vector<SvgSeries> diagram_series(const std::vector<DiagramCurve>& curves) {
    std::vector<SvgSeries> series;
    for (const DiagramCurve& curve : curves) {
        SvgSeries s;
        s.name = curve_kind_name(curve.kind);
        for (const BranchPoint& p : curve.points) s.points.push_back({p.p, p.alpha_out});
        series.push_back(std::move(s));
    }
    return series;
}

}  // namespace

void cmd_steady(const RunConfig& config) {
    config.params.validate();
    config.require_da_range();
    require_out(config);

    const ContinuationSettings settings = continuation_settings(config);

    const DiagramCurve curve = with_sidecar_log(config.out, [&] {
        // The branch through the origin is the one reachable from fresh feed;
        // the oracle supplies its representative at the lower range end.
        const std::vector<CascadeState> states =
            find_steady_states_oracle(settings.p_min, FlowDirection::forward, config.params);
        CascadeState start = states.front();
        for (const CascadeState& s : states)
            if (alpha_out(s, FlowDirection::forward, CyclePhase::series) <
                alpha_out(start, FlowDirection::forward, CyclePhase::series))
                start = s;
        const BranchPoint begin =
            make_branch_point(start, FlowDirection::forward, settings.p_min, config.params);
        return trace_branch_ss(begin, FlowDirection::forward, config.params, settings);
    });

    MetaBlock meta = base_meta(config, "steady");
    append_range_meta(meta, config);
    meta.add("points", static_cast<long>(curve.points.size()));

    write_diagram_csv(config.out, {curve}, meta);
    if (config.svg)
        write_svg_plot(*config.svg, diagram_series({curve}), "Da", "alpha_out");
    std::printf("wrote %s (%zu points)\n", config.out.c_str(), curve.points.size());
}

void cmd_periodic(const RunConfig& config) {
    config.params.validate();
    config.require_da_range();
    require_out(config);
    if (!config.tau_rf.has_value()) throw UsageError("periodic requires --tau-rf");
    const double tau_rf = *config.tau_rf;
    if (!(tau_rf > 0.0)) throw UsageError("--tau-rf must be positive");

    const ContinuationSettings settings = continuation_settings(config);
    const IntegratorSettings integ = config.integrator();

    SettleSettings settle;
    settle.max_cycles = static_cast<int>(config.settle_cycles);

    const PeriodicBranch branch = with_sidecar_log(config.out, [&] {
        const SettleResult settled =
            settle_to_attractor(config.seed, settings.p_min, config.params, tau_rf, integ, settle);
        if (!settled.converged)
            throw NonConvergence("periodic: settling did not converge at Da " +
                                     std::to_string(settings.p_min) +
                                     "; choose a different da-min or seed",
                                 0.0);
        const ShootResult shot = newton_shoot(settled.start_state, FlowDirection::forward,
                                              settings.p_min, config.params, tau_rf, integ);
        return trace_branch_periodic(shot.point, FlowDirection::forward, config.params, tau_rf,
                                     settings, integ);
    });

    MetaBlock meta = base_meta(config, "periodic");
    meta.add("tau_rf", tau_rf);
    append_range_meta(meta, config);
    append_integrator_meta(meta, config);
    meta.add("seed_alpha1", config.seed.alpha1);
    meta.add("seed_alpha2", config.seed.alpha2);
    meta.add("points", static_cast<long>(branch.points.size()));

    const std::vector<DiagramCurve> curves{branch.beg, branch.end, branch.av};
    write_diagram_csv(config.out, curves, meta);
    if (config.svg) write_svg_plot(*config.svg, diagram_series(curves), "Da", "alpha_out");
    std::printf("wrote %s (%zu points per curve)\n", config.out.c_str(), branch.points.size());
}

void cmd_simulate(const RunConfig& config) {
    config.params.validate();
    config.require_single_da();
    require_out(config);
    const double da = *config.da;
    const IntegratorSettings integ = config.integrator();
    const OperatingMode mode = config.mode();

    Trajectory trajectory;
    std::string mode_name;
    if (const auto* constant = std::get_if<ConstantFlowMode>(&mode)) {
        mode_name = "constant";
        CascadeState s = config.seed;
        for (long j = 0; j < config.cycles; ++j) {
            // Constant flow has no cycle; time is chunked in residence times.
            IntegrateResult r = integrate(CyclePhase::series, s, constant->dir, da, config.params,
                                          1.0, integ, static_cast<double>(j), j == 0);
            s = r.end_state;
            trajectory.samples.insert(trajectory.samples.end(), r.trajectory.samples.begin(),
                                      r.trajectory.samples.end());
        }
    } else if (const auto* reverse = std::get_if<ReverseFlowMode>(&mode)) {
        mode_name = "reverse";
        CascadeState s = config.seed;
        for (long j = 0; j < config.cycles; ++j) {
            CycleResult cycle =
                integrate_cycle(s, direction_for_cycle(static_cast<int>(j)), da, config.params,
                                reverse->tau_rf, integ, j * reverse->tau_rf, j == 0);
            s = cycle.end_state;
            trajectory.samples.insert(trajectory.samples.end(), cycle.trajectory.samples.begin(),
                                      cycle.trajectory.samples.end());
        }
    } else {
        mode_name = "relaxation";
        const auto& relax = std::get<RelaxationModeCfg>(mode);
        if (!relax.tau_rel.has_value())
            throw UsageError("simulate requires an explicit --tau-rel (use relax-scan to search)");
        const RelaxationPolicy policy{relax.tau_rf, *relax.tau_rel};
        trajectory = simulate_relaxation(config.seed, da, config.params, policy, integ,
                                         static_cast<int>(config.cycles))
                         .trajectory;
    }

    MetaBlock meta = base_meta(config, "simulate");
    meta.add("mode", mode_name);
    meta.add("da", da);
    if (config.tau_rf) meta.add("tau_rf", *config.tau_rf);
    if (config.tau_rel) meta.add("tau_rel", *config.tau_rel);
    meta.add("cycles", config.cycles);
    meta.add("seed_alpha1", config.seed.alpha1);
    meta.add("seed_alpha2", config.seed.alpha2);
    append_integrator_meta(meta, config);

    write_timeseries_csv(config.out, trajectory, meta);
    if (config.svg) {
        SvgSeries series{"alpha_out", {}};
        for (const TrajectorySample& s : trajectory.samples)
            series.points.push_back({s.tau, s.alpha_out});
        write_svg_plot(*config.svg, {series}, "tau", "alpha_out");
    }
    std::printf("wrote %s (%zu samples)\n", config.out.c_str(), trajectory.samples.size());
}

void cmd_relax_scan(const RunConfig& config) {
    config.params.validate();
    config.require_single_da();
    require_out(config);
    if (!config.tau_rf.has_value()) throw UsageError("relax-scan requires --tau-rf");
    const double tau_rf = *config.tau_rf;
    if (!(tau_rf > 0.0)) throw UsageError("--tau-rf must be positive");

    SettleSettings settle;
    settle.max_cycles = static_cast<int>(config.settle_cycles);
    const ScanResult scan = with_sidecar_log(config.out, [&] {
        return scan_tau_rel(*config.da, config.params, tau_rf, config.scan_step,
                            config.integrator(), settle);
    });

    MetaBlock meta = base_meta(config, "relax-scan");
    meta.add("da", *config.da);
    meta.add("tau_rf", tau_rf);
    meta.add("scan_step", config.scan_step);
    append_integrator_meta(meta, config);

    write_scan_csv(config.out, scan, meta);
    if (config.svg) {
        SvgSeries series{"settled average", {}};
        for (const ScanEntry& e : scan.table)
            if (e.settled) series.points.push_back({e.tau_rel, e.average});
        write_svg_plot(*config.svg, {series}, "tau_rel", "alpha_out average");
    }

    std::printf("wrote %s (%zu grid points)\n", config.out.c_str(), scan.table.size());
    std::printf("best tau_rel = %s  settled average = %s\n",
                format_double(scan.best_tau_rel).c_str(),
                format_double(scan.best_average).c_str());
    std::printf("gain vs reverse-only  = %s\n",
                scan.gain_vs_reverse ? format_double(*scan.gain_vs_reverse).c_str() : "n/a");
    std::printf("gain vs constant flow = %s\n",
                scan.gain_vs_constant ? format_double(*scan.gain_vs_constant).c_str() : "n/a");
    if (!scan.cold_check_consistent)
        std::printf("note: cold-start check at the optimum settled to %s\n",
                    format_double(scan.cold_check_average).c_str());
}

}  // namespace cascade
