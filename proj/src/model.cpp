#include "cascade/model.hpp"

#include <cmath>
#include <string>

namespace cascade {

namespace {

constexpr double kBoxSlack = 1e-12;

double require_unit_interval(double alpha, const char* who) {
    if (alpha < 0.0) {
        if (alpha >= -kBoxSlack) return 0.0;
        throw std::domain_error(std::string(who) + ": conversion " + std::to_string(alpha) +
                                " below 0 beyond round-off slack");
    }
    if (alpha > 1.0) {
        if (alpha <= 1.0 + kBoxSlack) return 1.0;
        throw std::domain_error(std::string(who) + ": conversion " + std::to_string(alpha) +
                                " above 1 beyond round-off slack");
    }
    return alpha;
}

double require_nonnegative_da(double da, const char* who) {
    if (da < 0.0)
        throw std::domain_error(std::string(who) + ": Damkohler number must be nonnegative, got " +
                                std::to_string(da));
    return da;
}

double arrhenius_factor(double alpha, const ModelParams& p) {
    return std::exp(p.gamma * p.beta * alpha / (1.0 + p.beta * alpha));
}

}  // namespace

void ModelParams::validate() const {
    if (!(gamma > 0.0)) throw std::invalid_argument("ModelParams: gamma must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("ModelParams: beta must be positive");
    if (!(order > 0.0)) throw std::invalid_argument("ModelParams: order must be positive");
}

double phi(double alpha, double da, const ModelParams& params) {
    alpha = require_unit_interval(alpha, "phi");
    require_nonnegative_da(da, "phi");
    return da * std::pow(1.0 - alpha, params.order) * arrhenius_factor(alpha, params);
}

double dphi_dalpha(double alpha, double da, const ModelParams& params) {
    alpha = require_unit_interval(alpha, "dphi_dalpha");
    require_nonnegative_da(da, "dphi_dalpha");
    if (params.order < 1.0 && alpha == 1.0)
        throw std::domain_error("dphi_dalpha: derivative singular at alpha = 1 for order < 1");
    const double one_minus = 1.0 - alpha;
    const double denom = 1.0 + params.beta * alpha;
    const double bracket = -params.order + one_minus * params.gamma * params.beta / (denom * denom);
    return da * std::pow(one_minus, params.order - 1.0) * bracket * arrhenius_factor(alpha, params);
}

double dphi_dda(double alpha, const ModelParams& params) {
    alpha = require_unit_interval(alpha, "dphi_dda");
    return std::pow(1.0 - alpha, params.order) * arrhenius_factor(alpha, params);
}

CascadeState rhs_series(const CascadeState& s, FlowDirection dir, double da,
                        const ModelParams& params) {
    const double phi1 = phi(s.alpha1, da, params);
    const double phi2 = phi(s.alpha2, da, params);
    if (dir == FlowDirection::forward)
        return {phi1 - s.alpha1, s.alpha1 + phi2 - s.alpha2};
    return {s.alpha2 + phi1 - s.alpha1, phi2 - s.alpha2};
}

CascadeState rhs_relaxation(const CascadeState& s, FlowDirection dir, double da,
                            const ModelParams& params) {
    const double phi1 = phi(s.alpha1, da, params);
    const double phi2 = phi(s.alpha2, da, params);
    if (dir == FlowDirection::forward)
        return {phi1 - s.alpha1, phi2};  // reactor 1 fed, reactor 2 batch
    return {phi1, phi2 - s.alpha2};      // reactor 2 fed, reactor 1 batch
}

double alpha_out(const CascadeState& s, FlowDirection dir, CyclePhase phase) {
    if (phase == CyclePhase::series)
        return dir == FlowDirection::reversed ? s.alpha1 : s.alpha2;
    return dir == FlowDirection::reversed ? s.alpha2 : s.alpha1;
}

DimensionlessGroups derive_dimensionless(const PhysicalQuantities& phys) {
    auto check = [](double v, const char* name) {
        if (!(v > 0.0))
            throw std::invalid_argument(std::string("derive_dimensionless: ") + name +
                                        " must be strictly positive");
        return v;
    };
    const double e = check(phys.activation_energy, "activation_energy");
    const double r = check(phys.gas_constant, "gas_constant");
    const double t0 = check(phys.feed_temperature, "feed_temperature");
    const double dh = check(phys.heat_of_reaction, "heat_of_reaction");
    const double c0 = check(phys.feed_concentration, "feed_concentration");
    const double rho = check(phys.density, "density");
    const double cp = check(phys.heat_capacity, "heat_capacity");
    const double flow = check(phys.volumetric_flow, "volumetric_flow");
    const double vol = check(phys.reactor_volume, "reactor_volume");
    const double k = check(phys.rate_constant, "rate_constant");
    const double n = check(phys.order, "order");

    DimensionlessGroups out;
    out.params.gamma = e / (r * t0);
    out.params.beta = dh * c0 / (t0 * rho * cp);
    out.params.order = n;
    // Da = V_R (-r0) / (F C_A0) with (-r0) = k C_A0^n at feed conditions.
    out.da = vol * k * std::pow(c0, n - 1.0) / flow;
    out.params.validate();
    return out;
}

}  // namespace cascade
