#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "vsir/dynamics.hpp"
#include "vsir/equilibria.hpp"
#include "vsir/ode.hpp"

using namespace vsir;

namespace {

ModelParams fig(double p = 0.0)
{
    ModelParams P = reference_params();
    P.p = p;
    return P;
}

} // namespace

TEST(Integrate, EquilibriumIsFixed)
{
    const ModelParams P = fig(0.3);
    const State e2 = endemic(P).location;
    const Trajectory tr = integrate(e2, P, 500.0);
    for (const auto& s : tr.samples) EXPECT_LE(norm(s.x - e2), 10 * tr.tol);
    EXPECT_EQ(tr.terminal.kind, TerminalKind::time_horizon);
}

TEST(Integrate, E1StationaryWithoutVaccination)
{
    const Trajectory tr = integrate({1.1, 0.0}, fig(), 50.0);
    EXPECT_EQ(tr.final_state(), (State{1.1, 0.0}));
}

TEST(Integrate, BelowThresholdConvergesToE1)
{
    const Base b = reference_base();
    const ModelParams P = reduced_to_params({0.8, 0.0, b});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Events ev;
    ev.equilibria = admissible_targets(P);
    for (int k = 0; k < 10; ++k) {
        const State x0{u(rng) * P.A, u(rng)};
        IntegratorOptions o;
        o.record = false;
        const Trajectory tr = integrate(x0, P, 5000.0, o, ev);
        EXPECT_EQ(tr.terminal.kind, TerminalKind::converged_to_equilibrium);
        EXPECT_EQ(*tr.terminal.equilibrium, EquilibriumId::E1);
    }
}

TEST(Integrate, MatchesAnalyticBoundaryDecay)
{
    const ModelParams P = fig();
    const Trajectory tr = integrate({0.0, 1.0}, P, 10.0);
    EXPECT_TRUE(tr.reached_axis());
    for (const auto& s : tr.samples) {
        EXPECT_EQ(s.x.S, 0.0);
        EXPECT_NEAR(s.x.I, std::exp(-0.7 * s.t), 1e-9);
    }
}

TEST(Integrate, LogisticAxisSolution)
{
    // on I = 0 with p = 0 the S equation is logistic: S(t) = A S0 / (S0 + (A - S0) e^{-A t})
    const ModelParams P = fig();
    const double S0 = 0.1;
    const Trajectory tr = integrate({S0, 0.0}, P, 15.0);
    for (const auto& s : tr.samples) {
        const double exact = 1.1 * S0 / (S0 + (1.1 - S0) * std::exp(-1.1 * s.t));
        EXPECT_NEAR(s.x.S, exact, 1e-8);
        EXPECT_EQ(s.x.I, 0.0);
    }
}

TEST(Integrate, OrderScaling)
{
    const ModelParams P = fig();
    for (double tol : {1e-6, 1e-8, 1e-10}) {
        IntegratorOptions a, b;
        a.tol = tol;
        b.tol = tol / 32.0;
        const State xa = integrate({0.3, 0.4}, P, 10.0, a).final_state();
        const State xb = integrate({0.3, 0.4}, P, 10.0, b).final_state();
        EXPECT_LE(norm(xa - xb), 64 * tol) << "tol=" << tol;
    }
}

TEST(Integrate, TimeReversal)
{
    const ModelParams P = fig(0.2);
    const double tol = 1e-10;
    IntegratorOptions o;
    o.tol = tol;
    const State x0{0.6, 0.3};
    const Trajectory fwd = integrate(x0, P, 10.0, o);
    o.reversed = true;
    const Trajectory back = integrate(fwd.final_state(), P, 10.0, o);
    EXPECT_LE(norm(back.final_state() - x0), 100 * tol);
}

TEST(Integrate, QuadrantAndMonotoneTime)
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double tol = 1e-9;
    for (int k = 0; k < 200; ++k) {
        const ModelParams P = reduced_to_params({1.0 + 3.0 * u(rng), 0.8 * u(rng), reference_base()});
        IntegratorOptions o;
        o.tol = tol;
        const Trajectory tr = integrate({u(rng) * P.A, 2.0 * u(rng)}, P, 100.0, o);
        for (std::size_t i = 0; i < tr.samples.size(); ++i) {
            EXPECT_GE(tr.samples[i].x.S, -10 * tol);
            EXPECT_GE(tr.samples[i].x.I, -10 * tol);
            if (i) {
                EXPECT_GT(tr.samples[i].t, tr.samples[i - 1].t);
            }
        }
    }
}

TEST(Integrate, SectionLocalisation)
{
    const ModelParams P = fig(0.3);
    const double S2 = endemic(P).location.S;
    Events ev;
    ev.section = Section{S2, 0, 0};
    const Trajectory tr = integrate({0.9, 0.05}, P, 200.0, {}, ev);
    ASSERT_GE(tr.crossings.size(), 4u);
    for (const auto& c : tr.crossings) {
        EXPECT_LE(std::abs(c.x.S - S2), 1e-10);
        EXPECT_LE(norm(c.x - tr.at(c.t)), 1e-8);
    }
    for (std::size_t i = 1; i < tr.crossings.size(); ++i) {
        EXPECT_NE(tr.crossings[i].direction, tr.crossings[i - 1].direction);
    }
}

TEST(Integrate, SectionDirectionAndStop)
{
    const ModelParams P = fig(0.3);
    const double S2 = endemic(P).location.S;
    Events ev;
    ev.section = Section{S2, -1, 2};
    const Trajectory tr = integrate({0.9, 0.05}, P, 200.0, {}, ev);
    EXPECT_EQ(tr.terminal.kind, TerminalKind::crossed_section);
    ASSERT_EQ(tr.crossings.size(), 2u);
    for (const auto& c : tr.crossings) EXPECT_EQ(c.direction, -1);
    EXPECT_EQ(tr.final_time(), tr.crossings.back().t);
}

TEST(Integrate, DenseOutputAccuracy)
{
    const ModelParams P = fig(0.3);
    const Trajectory tr = integrate({0.9, 0.05}, P, 30.0);
    IntegratorOptions fine;
    fine.tol = 1e-13;
    for (double t : {1.2345, 7.5, 19.01, 29.9}) {
        const State ref = integrate({0.9, 0.05}, P, t, fine).final_state();
        EXPECT_LE(norm(tr.at(t) - ref), 1e-6) << "t=" << t;
    }
}

TEST(Integrate, ReversedFromAxisLeavesDomain)
{
    IntegratorOptions o;
    o.reversed = true;
    const Trajectory tr = integrate({0.0, 0.5}, fig(), 1.0, o);
    EXPECT_EQ(tr.terminal.kind, TerminalKind::left_domain);
}

TEST(Integrate, StopOnAxis)
{
    IntegratorOptions o;
    o.stop_on_axis = true;
    const Trajectory tr = integrate({0.05, 2.0}, fig(0.6), 500.0, o);
    EXPECT_TRUE(tr.reached_axis());
    EXPECT_EQ(tr.final_state().S, 0.0);
    EXPECT_LT(tr.final_time(), 500.0);
}

TEST(Integrate, Validation)
{
    const ModelParams P = fig();
    IntegratorOptions o;
    o.tol = 1e-14;
    EXPECT_THROW(integrate({0.5, 0.5}, P, 1.0, o), validation_error);
    o.tol = 1e-2;
    EXPECT_THROW(integrate({0.5, 0.5}, P, 1.0, o), validation_error);
    EXPECT_THROW(integrate({-0.1, 0.5}, P, 1.0), validation_error);
    EXPECT_THROW(integrate({0.5, -0.1}, P, 1.0), validation_error);
    EXPECT_THROW(integrate({1.2, 0.5}, P, 1.0), validation_error);
    EXPECT_THROW(integrate({0.5, 0.5}, P, 0.0), validation_error);
}

TEST(Integrate, StatsRecorded)
{
    const Trajectory tr = integrate({0.5, 0.5}, fig(), 20.0);
    EXPECT_GT(tr.stats.accepted, 0u);
    EXPECT_GE(tr.stats.rhs_evals, 6 * tr.stats.accepted);
    EXPECT_LE(tr.stats.max_error, 1.0);
}

TEST(Integrate, StepCapRespected)
{
    IntegratorOptions o;
    o.h_max = 0.25;
    const Trajectory tr = integrate({0.5, 0.5}, fig(), 20.0, o);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) EXPECT_LE(tr.samples[i].t - tr.samples[i - 1].t, 0.25 + 1e-12);
}

TEST(FlowInvariance, RandomTrajectoriesStayInRegion)
{
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> u(0.05, 2.0);
    std::uniform_real_distribution<double> f(0.0, 1.0);
    for (int k = 0; k < 300; ++k) {
        ModelParams P{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), f(rng)};
        const double bound = invariant_region_bound(P);
        const double S0 = f(rng) * P.A;
        const double I0 = f(rng) * (bound - S0);
        const double phi0 = S0 + I0;
        const double s = P.removal();
        const Trajectory tr = integrate({S0, I0}, P, 100.0);
        for (const auto& smp : tr.samples) {
            EXPECT_TRUE(in_invariant_region(smp.x, P, 1e-6));
            const double env = phi0 * std::exp(-s * smp.t) + bound * (1.0 - std::exp(-s * smp.t));
            EXPECT_LE(smp.x.S + smp.x.I, env + 1e-6);
        }
    }
}
