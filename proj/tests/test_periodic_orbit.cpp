#include <cmath>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "vsir/periodic_orbit.hpp"
#include "vsir/portraits.hpp"

using namespace vsir;

namespace {

constexpr double het_r0_3 = 0.299775;

const PeriodicOrbit& orbit_at(double p)
{
    static std::map<double, PeriodicOrbit> cache;
    auto it = cache.find(p);
    if (it == cache.end()) it = cache.emplace(p, find_periodic_orbit(3.0, p, reference_base())).first;
    return it->second;
}

} // namespace

TEST(PeriodicOrbit, UnstableAndClosed)
{
    for (double p : {0.3251, 0.3504, 0.3757}) {
        const PeriodicOrbit& o = orbit_at(p);
        EXPECT_GT(o.floquet, 1.0) << p;
        EXPECT_LE(o.residual, 1e-8) << p;
        EXPECT_GT(o.period, 0.0);
        EXPECT_NEAR(o.section_point.S, o.center.S, 1e-14);
        EXPECT_GT(o.section_point.I, o.center.I);
        EXPECT_NEAR(norm(o.loop.final_state() - o.section_point), 0.0, 1e-6);
    }
}

TEST(PeriodicOrbit, FrozenValues)
{
    const PeriodicOrbit& o = orbit_at(0.3504);
    EXPECT_NEAR(o.period, 14.05, 0.01);
    EXPECT_NEAR(o.floquet, 1.71, 0.01);
    EXPECT_NEAR(o.amplitude, 0.285, 0.001);
}

TEST(PeriodicOrbit, FamilyLimits)
{
    // period grows toward the heteroclinic end, amplitude vanishes toward the Hopf end
    const std::vector<double> ps{0.3082, 0.3251, 0.3504, 0.3757};
    for (std::size_t i = 1; i < ps.size(); ++i) {
        EXPECT_LT(orbit_at(ps[i]).period, orbit_at(ps[i - 1]).period);
        EXPECT_LT(orbit_at(ps[i]).amplitude, orbit_at(ps[i - 1]).amplitude);
    }
    const double ph = p_h(reference_base(), 3.0);
    const Equilibrium e2 = endemic(ReducedPoint{3.0, 0.3757, reference_base()});
    EXPECT_NEAR(orbit_at(0.3757).period, 2.0 * M_PI / std::abs(e2.eigenvalues[0].imag()), 1.0);
    EXPECT_GT(orbit_at(0.3082).period, 20.0);
    EXPECT_LT(orbit_at(0.3757).amplitude, 0.5 * orbit_at(0.3504).amplitude);
    EXPECT_GT(ph, 0.3757);
}

TEST(PeriodicOrbit, Separatrix)
{
    const PeriodicOrbit& o = orbit_at(0.3504);
    const ModelParams P = reduced_to_params({3.0, 0.3504, reference_base()});
    const Equilibrium e2 = endemic(P);
    const double horizon = 30.0 / std::abs(e2.eigenvalues[0].real());
    const auto& pts = o.loop.samples;
    ASSERT_GE(pts.size(), 8u);
    for (int k = 0; k < 8; ++k) {
        const State x = pts[k * (pts.size() - 1) / 8].x;
        const State in = o.center + 0.8 * (x - o.center);
        const State out = o.center + 1.2 * (x - o.center);
        EXPECT_EQ(portrait_run(in, P, horizon, 1e-10).omega, OmegaLimit::E2) << k;
        const OmegaLimit w = portrait_run(out, P, horizon, 1e-10).omega;
        EXPECT_NE(w, OmegaLimit::E2) << k;
        EXPECT_NE(w, OmegaLimit::cycle) << k;
    }
}

TEST(PeriodicOrbit, RegionErrors)
{
    const Base b = reference_base();
    EXPECT_THROW(find_periodic_orbit(1.9, 0.3, b), validation_error);
    EXPECT_THROW(find_periodic_orbit(3.0, 0.39, b), validation_error);
    PeriodicOptions o;
    o.p_het = het_r0_3;
    EXPECT_THROW(find_periodic_orbit(3.0, 0.29, b, o), validation_error);
}

TEST(PeriodicOrbit, NoCycleBelowHeteroclinic) { EXPECT_THROW(find_periodic_orbit(3.0, 0.25, reference_base()), numerical_error); }
