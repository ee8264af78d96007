// Dimensionless model of a cascade of two identical adiabatic CSTRs:
// kinetic function, its derivatives, and the right-hand sides for the
// series (flow-through) and relaxation (outlet reactor cut off) regimes.
// Conversion degree is the only state; the adiabatic energy balance makes
// the dimensionless temperature equal to it, so no temperature field exists.
#pragma once

#include <stdexcept>

namespace cascade {

// Kinetic and thermal constants of the dimensionless model.
// gamma: activation-energy number, beta: adiabatic-temperature-rise number,
// order: reaction order n. The Damkohler number is passed separately as the
// continuation parameter.
struct ModelParams {
    double gamma = 15.0;
    double beta = 0.65;
    double order = 1.5;

    void validate() const;
};

// Conversion degrees of the two reactors; both live in [0, 1].
struct CascadeState {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
};

inline CascadeState swapped(const CascadeState& s) { return {s.alpha2, s.alpha1}; }

// Feed direction through the cascade. forward: feed enters reactor 1 and the
// product leaves reactor 2; reversed: the mirror image.
enum class FlowDirection { forward, reversed };

inline FlowDirection flipped(FlowDirection d) {
    return d == FlowDirection::forward ? FlowDirection::reversed : FlowDirection::forward;
}

// 0 for forward, 1 for reversed; the IO switch variable of the balance equations.
inline int io_value(FlowDirection d) { return d == FlowDirection::reversed ? 1 : 0; }

inline FlowDirection direction_for_cycle(int cycle_index) {
    return cycle_index % 2 == 0 ? FlowDirection::forward : FlowDirection::reversed;
}

// Phase of a reverse-flow cycle. During `relaxing` the outlet reactor is
// isolated and the product is drawn from the fed reactor directly.
enum class CyclePhase { series, relaxing };

// Raw quantities from which the dimensionless groups are formed.
struct PhysicalQuantities {
    double activation_energy = 0.0;   // kJ/kmol
    double gas_constant = 0.0;        // kJ/(kmol K)
    double feed_temperature = 0.0;    // K
    double heat_of_reaction = 0.0;    // kJ/kmol, exothermic positive
    double feed_concentration = 0.0;  // kmol/m^3
    double density = 0.0;             // kg/m^3
    double heat_capacity = 0.0;       // kJ/(kg K)
    double volumetric_flow = 0.0;     // m^3/s
    double reactor_volume = 0.0;      // m^3
    double rate_constant = 0.0;       // 1/s (m^3/kmol)^(n-1)
    double order = 0.0;               // reaction order, dimensionless
};

struct DimensionlessGroups {
    ModelParams params;
    double da = 0.0;
};

// Reaction-rate contribution Da (1-a)^n exp(gamma beta a / (1 + beta a)).
// Conversions within 1e-12 of [0,1] are clamped before evaluation; anything
// farther out is a hard error (the vector field never leaves the box, so a
// larger excursion means a broken caller).
double phi(double alpha, double da, const ModelParams& params);

// d phi / d alpha. Singular at alpha = 1 when order < 1; reported as a
// domain error instead of returning infinity.
double dphi_dalpha(double alpha, double da, const ModelParams& params);

// d phi / d Da = phi / Da, evaluated without the Da factor.
double dphi_dda(double alpha, const ModelParams& params);

// Series regime: d a1/dt = IO a2 + phi(a1) - a1, d a2/dt = (1-IO) a1 + phi(a2) - a2.
// Fresh feed enters the fed reactor at zero conversion.
CascadeState rhs_series(const CascadeState& s, FlowDirection dir, double da,
                        const ModelParams& params);

// Relaxation regime: the outlet reactor runs as a closed batch (phi only),
// the fed reactor keeps its fresh-feed balance.
CascadeState rhs_relaxation(const CascadeState& s, FlowDirection dir, double da,
                            const ModelParams& params);

// Conversion read at the system outlet. Series phase follows the flow
// direction; relaxation phase reads the fed reactor, which is the only one
// being drained.
double alpha_out(const CascadeState& s, FlowDirection dir, CyclePhase phase);

// Forms gamma, beta, n and Da from raw quantities. The feed rate of reaction
// is taken as k C_A0^n, so Da = V_R k C_A0^(n-1) / F.
DimensionlessGroups derive_dimensionless(const PhysicalQuantities& phys);

}  // namespace cascade
