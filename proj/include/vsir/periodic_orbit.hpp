/*
 * Copyright (C) 2026 The vsir Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "vsir/atlas.hpp"
#include "vsir/dynamics.hpp"

namespace vsir {

struct PeriodicOptions {
    double tol = 1e-12;               ///< integrator tolerance
    double return_tol = 1e-9;         ///< successive returns must agree to this
    int max_returns = 400;            ///< plain/accelerated return-map iterations before bisection
    double horizon = 5000.0;          ///< per-return integration budget
    double floquet_step = 1e-6;       ///< centred-difference step for the multiplier
    std::optional<double> p_het;      ///< when set, p must exceed it
};

struct PeriodicOrbit {
    State section_point;  ///< (S2, I*) on the upper half of S = S2
    double period = 0.0;
    double floquet = 0.0; ///< derivative of the forward return map at I*
    double residual = 0.0; ///< |P(I*) - I*| of the reversed return map
    double amplitude = 0.0; ///< largest distance from E2 along the loop
    Trajectory loop;      ///< one forward revolution starting at section_point
    State center;         ///< E2
};

namespace detail {

struct ReturnMap {
    const ModelParams& P;
    double S2;
    bool reversed;
    const PeriodicOptions& opt;

    /// Next crossing of S = S2 with I above E2, or nothing if the orbit escapes first.
    std::optional<Crossing> operator()(double I) const
    {
        IntegratorOptions io;
        io.tol = opt.tol;
        io.reversed = reversed;
        io.record = false;
        io.stop_on_axis = true;
        io.domain_bound = 1e3;
        Events ev;
        // upper half of the section: forward dS/dt < 0, reversed dS/dt > 0
        ev.section = Section{S2, reversed ? +1 : -1, 1};
        const Trajectory tr = integrate({S2, I}, P, opt.horizon, io, ev);
        if (tr.terminal.kind != TerminalKind::crossed_section) return std::nullopt;
        return tr.terminal.crossing;
    }
};

} // namespace detail

/**
 * @brief Unstable periodic orbit around E2 in region E.
 *
 * The reversed field makes the cycle attracting: returns to the section S = S2 are iterated
 * (Steffensen-accelerated once they contract) until successive returns agree, then a secant step
 * on P(I) - I polishes the fixed point. If the iteration stalls, the fixed point is bracketed
 * between an inside point (P(I) > I) and an outside point and bisected. The Floquet multiplier is
 * the centred-difference derivative of the forward-time return map.
 */
inline PeriodicOrbit find_periodic_orbit(double r0, double p, const Base& base, const PeriodicOptions& opt = {})
{
    if (!(r0 > 2.0)) throw validation_error("find_periodic_orbit: not in region E (requires r0 > 2)");
    const double ph = p_h(base, r0);
    if (!(p < ph)) throw validation_error("find_periodic_orbit: not in region E (p must be below p_H)");
    if (opt.p_het && !(p > *opt.p_het)) {
        throw validation_error("find_periodic_orbit: not in region E (p must exceed p_het)");
    }
    const ReducedPoint q{r0, p, base};
    const ModelParams P = reduced_to_params(q);
    const Equilibrium e2 = endemic(q);
    if (e2.stability != StabilityClass::sink_focus) {
        throw validation_error(std::string("find_periodic_orbit: not in region E (E2 is ") + to_string(e2.stability) + ")");
    }
    const double S2 = e2.location.S;
    const double I2 = e2.location.I;
    const detail::ReturnMap rev{P, S2, true, opt};
    const detail::ReturnMap fwd{P, S2, false, opt};

    auto G = [&](double I) -> std::optional<double> {
        const auto c = rev(I);
        if (!c) return std::nullopt;
        return c->x.I - I;
    };

    // return-map iteration from just above the focus
    double I = I2 + 1e-3 * I2;
    std::optional<double> fixed;
    double inside = I2; // largest I known to spiral outward
    std::optional<double> outside;
    double prev_step = 0.0;
    for (int k = 0; k < opt.max_returns; ++k) {
        const auto c = rev(I);
        if (!c) {
            outside = outside ? std::min(*outside, I) : I;
            break;
        }
        const double next = c->x.I;
        const double step = next - I;
        if (step > 0.0) inside = std::max(inside, I);
        else outside = outside ? std::min(*outside, I) : I;
        if (std::abs(step) <= opt.return_tol) {
            fixed = next;
            break;
        }
        const double ratio = prev_step != 0.0 ? step / prev_step : 0.0;
        prev_step = step;
        if (ratio > 0.0 && ratio < 0.9) {
            // contracting geometrically: Aitken extrapolation of I, next, P(next)
            const auto c2 = rev(next);
            if (c2) {
                const double next2 = c2->x.I;
                const double denom = next2 - 2.0 * next + I;
                if (denom != 0.0) {
                    const double acc = I - (next - I) * (next - I) / denom;
                    if (acc > I2 && (!outside || acc < *outside)) {
                        I = acc;
                        prev_step = 0.0;
                        continue;
                    }
                }
                I = next2;
                continue;
            }
        }
        I = next;
    }

    if (!fixed) {
        // bracket [inside, outside] and bisect on the sign of P(I) - I
        if (!outside) {
            double probe = std::max(inside, I);
            for (int k = 0; k < 60 && !outside; ++k) {
                probe = I2 + 1.5 * (probe - I2);
                const auto g = G(probe);
                if (!g || *g < 0.0) outside = probe;
                else inside = probe;
            }
            if (!outside) throw numerical_error("find_periodic_orbit: could not bracket the cycle");
        }
        double lo = inside, hi = *outside;
        for (int k = 0; k < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++k) {
            const double mid = 0.5 * (lo + hi);
            const auto g = G(mid);
            if (g && *g > 0.0) lo = mid;
            else hi = mid;
        }
        fixed = 0.5 * (lo + hi);
    }

    // secant polish on G(I) = P(I) - I
    double x0 = *fixed;
    double x1 = x0 + 1e-7 * std::max(1.0, x0);
    auto g0 = G(x0);
    auto g1 = G(x1);
    for (int k = 0; k < 20 && g0 && g1 && std::abs(*g1) > 1e-13; ++k) {
        if (*g1 == *g0) break;
        const double x2 = x1 - *g1 * (x1 - x0) / (*g1 - *g0);
        if (!(x2 > I2)) break;
        x0 = x1;
        g0 = g1;
        x1 = x2;
        g1 = G(x1);
    }
    double Istar = *fixed;
    if (g1 && (!G(Istar) || std::abs(*g1) <= std::abs(*G(Istar)))) Istar = x1;

    PeriodicOrbit orbit;
    orbit.center = e2.location;
    orbit.section_point = {S2, Istar};
    const auto gstar = G(Istar);
    if (!gstar) throw numerical_error("find_periodic_orbit: reversed integration escapes (mislabeled region?)");
    orbit.residual = std::abs(*gstar);
    if (!(orbit.residual <= 1e-6 * std::max(1.0, Istar))) {
        throw numerical_error("find_periodic_orbit: return map has no fixed point (residual " + std::to_string(orbit.residual)
                              + ")");
    }

    const double h = opt.floquet_step;
    const auto up = fwd(Istar + h);
    const auto down = fwd(Istar - h);
    if (!up || !down) throw numerical_error("find_periodic_orbit: forward return map undefined near the cycle");
    orbit.floquet = (up->x.I - down->x.I) / (2.0 * h);

    IntegratorOptions io;
    io.tol = opt.tol;
    io.record = true;
    io.domain_bound = 1e3;
    Events ev;
    ev.section = Section{S2, -1, 1};
    orbit.loop = integrate(orbit.section_point, P, opt.horizon, io, ev);
    if (orbit.loop.terminal.kind != TerminalKind::crossed_section) {
        throw numerical_error("find_periodic_orbit: forward loop did not close");
    }
    orbit.period = orbit.loop.terminal.crossing->t;
    for (const auto& s : orbit.loop.samples) {
        orbit.amplitude = std::max(orbit.amplitude, norm(s.x - e2.location));
    }
    return orbit;
}

} // namespace vsir
