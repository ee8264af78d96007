#include <doctest.h>

#include <cmath>
#include <random>

#include "cascade/model.hpp"

using namespace cascade;

namespace {

const ModelParams kDefaults{};

// Independent evaluation of the kinetic rate, written from scratch so the
// production expression is checked against a second formulation.
double phi_reference(double alpha, double da, const ModelParams& p) {
    const double arr = p.gamma * p.beta * alpha / (1.0 + p.beta * alpha);
    return da * std::exp(p.order * std::log1p(-alpha) + arr);
}

}  // namespace

TEST_CASE("phi at the box corners") {
    CHECK(phi(0.0, 0.028, kDefaults) == doctest::Approx(0.028).epsilon(1e-15));
    CHECK(phi(1.0, 0.05, kDefaults) == 0.0);
    CHECK(phi(1.0, 12.0, kDefaults) == 0.0);
}

TEST_CASE("phi matches an independently written expression") {
    for (double alpha : {0.1, 0.25, 0.5, 0.75, 0.9, 0.99}) {
        const double expected = phi_reference(alpha, 0.022, kDefaults);
        CHECK(phi(alpha, 0.022, kDefaults) == doctest::Approx(expected).epsilon(1e-12));
    }
    // Regression anchor for the mid-box value.
    CHECK(phi(0.5, 0.022, kDefaults) ==
          doctest::Approx(0.022 * std::pow(0.5, 1.5) * std::exp(4.875 / 1.325)).epsilon(1e-14));
}

TEST_CASE("phi is nonnegative across the box") {
    for (double da : {0.0, 0.01, 0.05, 0.1})
        for (int i = 0; i <= 200; ++i) CHECK(phi(i / 200.0, da, kDefaults) >= 0.0);
}

TEST_CASE("phi domain handling") {
    CHECK(phi(-1e-13, 0.03, kDefaults) == doctest::Approx(0.03).epsilon(1e-15));
    CHECK(phi(1.0 + 1e-13, 0.03, kDefaults) == 0.0);
    CHECK_THROWS_AS(phi(-1e-9, 0.03, kDefaults), std::domain_error);
    CHECK_THROWS_AS(phi(1.0 + 1e-9, 0.03, kDefaults), std::domain_error);
    CHECK_THROWS_AS(phi(0.5, -0.01, kDefaults), std::domain_error);
}

TEST_CASE("dphi_dalpha closed-form spot values") {
    // At alpha = 0 the expression collapses to Da (gamma beta - n).
    CHECK(dphi_dalpha(0.0, 0.01, kDefaults) == doctest::Approx(0.0825).epsilon(1e-14));
    // Order above 1 kills the derivative at full conversion.
    CHECK(dphi_dalpha(1.0, 0.7, kDefaults) == 0.0);
}

TEST_CASE("dphi_dalpha singular for sub-linear kinetics at full conversion") {
    ModelParams p = kDefaults;
    p.order = 0.5;
    CHECK_THROWS_AS(dphi_dalpha(1.0, 0.02, p), std::domain_error);
    CHECK(std::isfinite(dphi_dalpha(0.999999, 0.02, p)));
}

TEST_CASE("dphi_dalpha matches central finite differences of phi") {
    // Grid stops at 0.99: the third derivative of (1-a)^1.5 is unbounded at
    // a = 1, so the finite-difference oracle itself diverges there.
    const double h = 1e-6;
    for (double da : {0.01, 0.028, 0.05}) {
        for (int i = 0; i < 100; ++i) {
            const double alpha = h + (0.99 - h) * i / 99.0;
            const double fd =
                (phi(alpha + h, da, kDefaults) - phi(alpha - h, da, kDefaults)) / (2.0 * h);
            const double exact = dphi_dalpha(alpha, da, kDefaults);
            // Relative tolerance with a unit floor; the bracket crosses zero
            // inside the box, where a pure relative bound is meaningless.
            CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
        }
    }
}

TEST_CASE("dphi_dda is phi scaled by Da") {
    CHECK(dphi_dda(0.0, kDefaults) == 1.0);
    CHECK(dphi_dda(1.0, kDefaults) == 0.0);
    for (double alpha : {0.05, 0.3, 0.6, 0.95}) {
        const double da = 0.05;
        const double ratio = phi(alpha, da, kDefaults) / da;
        CHECK(dphi_dda(alpha, kDefaults) == doctest::Approx(ratio).epsilon(1e-14));
    }
}

TEST_CASE("rhs_series spot values") {
    const CascadeState origin{0.0, 0.0};
    const CascadeState r = rhs_series(origin, FlowDirection::forward, 0.03, kDefaults);
    CHECK(r.alpha1 == doctest::Approx(0.03).epsilon(1e-15));
    CHECK(r.alpha2 == doctest::Approx(0.03).epsilon(1e-15));

    const CascadeState full{1.0, 1.0};
    const CascadeState rf = rhs_series(full, FlowDirection::forward, 0.7, kDefaults);
    CHECK(rf.alpha1 == -1.0);
    CHECK(rf.alpha2 == 0.0);
}

TEST_CASE("rhs_series swap equivariance") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> da_dist(0.0, 0.1);
    for (int i = 0; i < 1000; ++i) {
        const CascadeState s{unit(rng), unit(rng)};
        const double da = da_dist(rng);
        const FlowDirection dir = (i % 2 == 0) ? FlowDirection::forward : FlowDirection::reversed;
        const CascadeState lhs = rhs_series(swapped(s), flipped(dir), da, kDefaults);
        const CascadeState rhs = swapped(rhs_series(s, dir, da, kDefaults));
        CHECK(lhs.alpha1 == rhs.alpha1);
        CHECK(lhs.alpha2 == rhs.alpha2);
    }
}

TEST_CASE("rhs_relaxation isolates the outlet reactor") {
    const CascadeState origin{0.0, 0.0};
    const CascadeState r0 = rhs_relaxation(origin, FlowDirection::reversed, 0.03, kDefaults);
    CHECK(r0.alpha1 == doctest::Approx(0.03).epsilon(1e-15));
    CHECK(r0.alpha2 == doctest::Approx(0.03).epsilon(1e-15));

    // A fully converted batch reactor is stationary.
    const CascadeState s{1.0, 0.4};
    const CascadeState r = rhs_relaxation(s, FlowDirection::reversed, 0.9, kDefaults);
    CHECK(r.alpha1 == 0.0);
    CHECK(r.alpha2 == doctest::Approx(phi(0.4, 0.9, kDefaults) - 0.4).epsilon(1e-14));

    // The cut-off reactor's conversion can only grow.
    const CascadeState mid{0.2, 0.9};
    CHECK(rhs_relaxation(mid, FlowDirection::reversed, 0.0265, kDefaults).alpha1 > 0.0);
}

TEST_CASE("alpha_out readout per phase and direction") {
    const CascadeState s{0.1, 0.9};
    CHECK(alpha_out(s, FlowDirection::forward, CyclePhase::series) == 0.9);
    CHECK(alpha_out(s, FlowDirection::reversed, CyclePhase::series) == 0.1);
    CHECK(alpha_out(s, FlowDirection::reversed, CyclePhase::relaxing) == 0.9);
    CHECK(alpha_out(s, FlowDirection::forward, CyclePhase::relaxing) == 0.1);
}

TEST_CASE("vector field never points out of the box") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> da_dist(0.0, 0.1);
    for (int i = 0; i < 10000; ++i) {
        const double da = da_dist(rng);
        const FlowDirection dir = (i % 2 == 0) ? FlowDirection::forward : FlowDirection::reversed;
        const double edge = unit(rng);
        CascadeState s;
        switch (i % 4) {
            case 0: s = {0.0, edge}; break;
            case 1: s = {1.0, edge}; break;
            case 2: s = {edge, 0.0}; break;
            default: s = {edge, 1.0}; break;
        }
        for (const CascadeState& rate : {rhs_series(s, dir, da, kDefaults),
                                         rhs_relaxation(s, dir, da, kDefaults)}) {
            if (s.alpha1 == 0.0) CHECK(rate.alpha1 >= 0.0);
            if (s.alpha1 == 1.0) CHECK(rate.alpha1 <= 0.0);
            if (s.alpha2 == 0.0) CHECK(rate.alpha2 >= 0.0);
            if (s.alpha2 == 1.0) CHECK(rate.alpha2 <= 0.0);
        }
    }
}

TEST_CASE("ModelParams validation") {
    CHECK_NOTHROW(kDefaults.validate());
    ModelParams bad = kDefaults;
    bad.gamma = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = kDefaults;
    bad.beta = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = kDefaults;
    bad.order = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("derive_dimensionless recovers the canonical groups") {
    PhysicalQuantities phys;
    phys.gas_constant = 8.314;
    phys.feed_temperature = 300.0;
    phys.activation_energy = 15.0 * 8.314 * 300.0;  // makes gamma exactly 15
    phys.density = 1000.0;
    phys.heat_capacity = 4.18;
    phys.feed_concentration = 2.0;
    phys.heat_of_reaction = 0.65 * 300.0 * 1000.0 * 4.18 / 2.0;  // makes beta exactly 0.65
    phys.order = 1.5;
    // Da = V k C^(n-1) / F; fix everything but the volume and solve for Da = 0.028.
    phys.rate_constant = 1e-3;
    phys.volumetric_flow = 5e-4;
    phys.reactor_volume = 0.028 * phys.volumetric_flow /
                          (phys.rate_constant * std::sqrt(phys.feed_concentration));

    const DimensionlessGroups groups = derive_dimensionless(phys);
    CHECK(groups.params.gamma == doctest::Approx(15.0).epsilon(1e-15));
    CHECK(groups.params.beta == doctest::Approx(0.65).epsilon(1e-15));
    CHECK(groups.params.order == 1.5);
    CHECK(groups.da == doctest::Approx(0.028).epsilon(1e-14));
}

TEST_CASE("derive_dimensionless rejects nonpositive inputs") {
    PhysicalQuantities phys;
    CHECK_THROWS_AS(derive_dimensionless(phys), std::invalid_argument);
}
