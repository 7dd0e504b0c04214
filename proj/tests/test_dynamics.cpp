#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "vsir/dynamics.hpp"
#include "vsir/heteroclinic.hpp"
#include "vsir/periodic_orbit.hpp"
#include "vsir/portraits.hpp"

using namespace vsir;

namespace {

ModelParams fig(double p = 0.0)
{
    ModelParams P = reference_params();
    P.p = p;
    return P;
}

} // namespace

TEST(Omega, RegionCBelowStableManifoldGoesToE2)
{
    const RegionPreset pr = region_preset(RegionLabel::C, published_het_curve());
    const ModelParams P = pr.params();
    EXPECT_EQ(P.beta, 0.91);
    const auto w = omega_limit_estimate({0.9, 0.02}, P, 5000.0);
    EXPECT_EQ(w.limit, OmegaLimit::E2);
}

TEST(Omega, RegionBInfectionDisappears)
{
    const RegionPreset pr = region_preset(RegionLabel::B, published_het_curve());
    const ModelParams P = pr.params();
    EXPECT_EQ(P.A, 1.0);
    EXPECT_EQ(P.removal(), 1.0);
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int k = 0; k < 20; ++k) {
        const State x0{u(rng) * P.A, u(rng) * (invariant_region_bound(P) - P.A)};
        const auto w = omega_limit_estimate(x0, P, 5000.0);
        EXPECT_TRUE(w.limit == OmegaLimit::E1 || w.limit == OmegaLimit::boundary_axis) << to_string(w.limit);
    }
}

TEST(Omega, AxisStart)
{
    const auto w = omega_limit_estimate({0.0, 0.4}, fig(), 100.0);
    EXPECT_EQ(w.limit, OmegaLimit::boundary_axis);
    // along the axis the field is the boundary field: I decays exponentially
    IntegratorOptions o;
    const Trajectory tr = integrate({0.0, 0.4}, fig(), 40.0, o);
    EXPECT_LT(tr.final_state().I, 1e-6);
}

TEST(Omega, UnvaccinatedFocusAttracts)
{
    const auto w = omega_limit_estimate({0.6, 0.3}, fig(), 5000.0);
    EXPECT_EQ(w.limit, OmegaLimit::E2);
}

TEST(Omega, ReversedRunNearUnstableCycleIsCycle)
{
    const Base b = reference_base();
    const double phet = shooting_het_curve(b)(3.0);
    const double p = 0.5 * (phet + p_h(b, 3.0));
    PeriodicOptions po;
    po.p_het = phet;
    const PeriodicOrbit orb = find_periodic_orbit(3.0, p, b, po);
    const ModelParams P = reduced_to_params({3.0, p, b});
    IntegratorOptions o;
    o.reversed = true;
    o.tol = 1e-11;
    Events ev;
    ev.section = Section{orb.section_point.S, +1, 0};
    const double horizon = 40 * orb.period;
    const Trajectory tr = integrate(orb.section_point, P, horizon, o, ev);
    EXPECT_EQ(omega_from_trajectory(tr, horizon, P), OmegaLimit::cycle);
}

TEST(Omega, SlowSpiralIsNotACycle)
{
    // E2 is a weak focus just below p_H: returns are periodic in time but shrink
    const Base b = reference_base();
    const double p = p_h(b, 3.0) - 0.004;
    const ModelParams P = reduced_to_params({3.0, p, b});
    const State e2 = endemic(P).location;
    IntegratorOptions o;
    o.record = false;
    const double horizon = 400.0;
    const Trajectory tr = integrate(e2 + State{0.0, 0.01}, P, horizon, o, omega_events(P));
    EXPECT_NE(omega_from_trajectory(tr, horizon, P), OmegaLimit::cycle);
}

TEST(Manifold, UnstableBranchOfE1EntersInterior)
{
    const ModelParams P = fig();
    const Equilibrium e1 = disease_free(P)[1];
    ASSERT_EQ(e1.stability, StabilityClass::saddle);
    const State seed = manifold_seed(e1, ManifoldBranch::unstable, ManifoldSide::plus, 1e-6, P);
    EXPECT_GT(seed.I, 0.0);
    EXPECT_GT(vector_field(seed, P).I, 0.0);
    IntegratorOptions o;
    const Trajectory tr = manifold_shoot(e1, ManifoldBranch::unstable, ManifoldSide::plus, 1e-6, P, 5.0, o);
    EXPECT_GT(tr.samples[1].x.I, seed.I);
    EXPECT_FALSE(tr.reversed);
}

TEST(Manifold, StableBranchOfE0RunsBackward)
{
    const Base b = reference_base();
    const double r0 = 2.6;
    const ModelParams P = reduced_to_params({r0, p_t(b, r0) - 0.01, b});
    const Equilibrium e0 = disease_free(P)[0];
    ASSERT_EQ(e0.stability, StabilityClass::saddle);
    const Trajectory tr = manifold_shoot(e0, ManifoldBranch::stable, ManifoldSide::plus, 1e-6, P, 300.0);
    EXPECT_TRUE(tr.reversed);
    EXPECT_GT(tr.final_state().I, 1e-6);
    EXPECT_GT(norm(tr.final_state() - e0.location), 1e-4);
}

TEST(Manifold, OffsetIsLinear)
{
    const ModelParams P = fig();
    const Equilibrium e1 = disease_free(P)[1];
    const State a = manifold_seed(e1, ManifoldBranch::unstable, ManifoldSide::plus, 1e-6, P);
    const State h = manifold_seed(e1, ManifoldBranch::unstable, ManifoldSide::plus, 5e-7, P);
    EXPECT_NEAR(norm(a - e1.location), 2.0 * norm(h - e1.location), 1e-15);
    const State m = manifold_seed(e1, ManifoldBranch::unstable, ManifoldSide::minus, 1e-6, P);
    EXPECT_LT(m.I, 0.0);
}

TEST(Manifold, Errors)
{
    const ModelParams P = fig();
    const Equilibrium e2 = endemic(P);
    EXPECT_THROW(manifold_seed(e2, ManifoldBranch::stable, ManifoldSide::plus, 1e-6, P), validation_error);
    const Equilibrium e1 = disease_free(P)[1];
    EXPECT_THROW(manifold_seed(e1, ManifoldBranch::stable, ManifoldSide::plus, 1e-3, P), validation_error);
    EXPECT_THROW(manifold_seed(e1, ManifoldBranch::stable, ManifoldSide::plus, 1e-9, P), validation_error);
}

TEST(Manifold, StableBranchOfE1IsTheAxis)
{
    // at p = 0 the stable eigenvector of E1 is horizontal: the fallback orients it by S
    const ModelParams P = fig();
    const Equilibrium e1 = disease_free(P)[1];
    const State seed = manifold_seed(e1, ManifoldBranch::stable, ManifoldSide::plus, 1e-6, P);
    EXPECT_EQ(seed.I, 0.0);
    EXPECT_GT(seed.S, e1.location.S);
}
