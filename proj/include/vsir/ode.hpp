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
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vsir/equilibria.hpp"
#include "vsir/error.hpp"
#include "vsir/model.hpp"

namespace vsir {

struct IntegratorOptions {
    double tol = 1e-10;          ///< atol = rtol = tol
    bool reversed = false;       ///< integrate the negated field; reported time runs forward
    double h_max = 0.0;          ///< 0: limited only by the horizon
    std::size_t max_steps = 5'000'000;
    bool record = true;          ///< keep every accepted step (otherwise only endpoints and crossings)
    bool stop_on_axis = false;   ///< terminate when the trajectory reaches S = 0
    double domain_bound = 1e6;   ///< |S| or |I| beyond this counts as leaving the domain
};

/// Poincare section S = value. direction: +1 / -1 restricts the sign of dS/dt in integration time.
struct Section {
    double value = 0.0;
    int direction = 0;
    std::size_t stop_after = 1; ///< terminal at this crossing count; 0 records crossings without stopping
};

struct EquilibriumTarget {
    EquilibriumId id = EquilibriumId::E0;
    State location;
};

struct Events {
    std::vector<EquilibriumTarget> equilibria;
    std::optional<Section> section;
    double convergence_radius = 1e-8;
    double field_tol = 1e-10;
};

enum class TerminalKind { time_horizon, converged_to_equilibrium, crossed_section, left_domain, step_failure };

inline const char* to_string(TerminalKind k)
{
    switch (k) {
    case TerminalKind::time_horizon: return "time-horizon";
    case TerminalKind::converged_to_equilibrium: return "converged-to-equilibrium";
    case TerminalKind::crossed_section: return "crossed-section";
    case TerminalKind::left_domain: return "left-domain";
    case TerminalKind::step_failure: return "step-failure";
    }
    return "?";
}

struct Crossing {
    double t = 0.0;
    State x;
    int direction = 0; ///< sign of dS/dt in integration time
    double value = 0.0;
};

struct TerminalEvent {
    TerminalKind kind = TerminalKind::time_horizon;
    std::optional<EquilibriumId> equilibrium;
    std::optional<Crossing> crossing;
    std::string detail;
};

struct Sample {
    double t = 0.0;
    State x;
    State dx; ///< field at x in integration time, for Hermite interpolation
};

struct IntegrationStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
    double max_error = 0.0; ///< largest accepted scaled error estimate
    std::optional<double> axis_time; ///< when the trajectory reached S = 0
};

/// Hermite cubic through (t0, x0, f0) and (t1, x1, f1) evaluated at t.
inline State hermite(double t0, State x0, State f0, double t1, State x1, State f1, double t)
{
    const double h = t1 - t0;
    const double u = (t - t0) / h;
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1;
    const double h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2;
    const double h11 = u3 - u2;
    return h00 * x0 + (h10 * h) * f0 + h01 * x1 + (h11 * h) * f1;
}

struct Trajectory {
    std::vector<Sample> samples;
    std::vector<Crossing> crossings;
    TerminalEvent terminal;
    IntegrationStats stats;
    double tol = 0.0;
    bool reversed = false;

    const Sample& back() const { return samples.back(); }
    State final_state() const { return samples.back().x; }
    double final_time() const { return samples.back().t; }
    bool reached_axis() const { return stats.axis_time.has_value(); }

    /// Dense output between recorded samples.
    State at(double t) const
    {
        if (samples.empty()) throw numerical_error("empty trajectory");
        if (t <= samples.front().t) return samples.front().x;
        if (t >= samples.back().t) return samples.back().x;
        auto it = std::upper_bound(samples.begin(), samples.end(), t, [](double v, const Sample& s) { return v < s.t; });
        const Sample& b = *it;
        const Sample& a = *(it - 1);
        return hermite(a.t, a.x, a.dx, b.t, b.x, b.dx, t);
    }
};

namespace detail {

// Dormand-Prince 5(4) tableau
struct DP54 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                            a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
};

class Stepper {
public:
    Stepper(const ModelParams& P, const IntegratorOptions& opt) : P_(P), opt_(opt), sign_(opt.reversed ? -1.0 : 1.0) {}

    bool on_axis = false;
    std::size_t evals = 0;

    State rhs(State x)
    {
        ++evals;
        State f = on_axis ? State{0.0, -P_.removal() * x.I} : vector_field(x, P_);
        return sign_ * f;
    }

    /// One DP5 step; returns the fifth-order solution, FSAL derivative and scaled error.
    struct Result {
        State x;
        State f;
        double err;
    };

    Result step(State x, State k1, double h)
    {
        using T = DP54;
        const State k2 = rhs(x + (h * T::a21) * k1);
        const State k3 = rhs(x + h * (T::a31 * k1 + T::a32 * k2));
        const State k4 = rhs(x + h * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3));
        const State k5 = rhs(x + h * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4));
        const State k6 = rhs(x + h * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 + T::a65 * k5));
        State xn = x + h * (T::a71 * k1 + T::a73 * k3 + T::a74 * k4 + T::a75 * k5 + T::a76 * k6);
        if (on_axis) xn.S = 0.0;
        const State k7 = rhs(xn);
        const State e = h * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 + T::e6 * k6 + T::e7 * k7);
        const double tol = opt_.tol;
        const double sS = tol + tol * std::max(std::abs(x.S), std::abs(xn.S));
        const double sI = tol + tol * std::max(std::abs(x.I), std::abs(xn.I));
        const double err = std::sqrt(0.5 * ((e.S / sS) * (e.S / sS) + (e.I / sI) * (e.I / sI)));
        return {xn, k7, err};
    }

    double initial_step(State x, State f, double span)
    {
        const double tol = opt_.tol;
        auto wnorm = [&](State v, State ref) {
            const double sS = tol + tol * std::abs(ref.S);
            const double sI = tol + tol * std::abs(ref.I);
            return std::sqrt(0.5 * ((v.S / sS) * (v.S / sS) + (v.I / sI) * (v.I / sI)));
        };
        const double d0 = wnorm(x, x);
        const double d1 = wnorm(f, x);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, span);
        const State f1 = rhs(x + h0 * f);
        const double d2 = wnorm(f1 - f, x) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
        return std::min({100.0 * h0, h1, span});
    }

private:
    const ModelParams& P_;
    const IntegratorOptions& opt_;
    double sign_;
};

/// Root of S(t) = value inside a step, refined with true Runge-Kutta substeps from the step start.
inline std::pair<double, State> locate_s_level(Stepper& st, double t0, State x0, State f0, double t1, State x1,
                                               State f1, double value)
{
    double lo = t0, hi = t1;
    double glo = x0.S - value;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = hermite(t0, x0, f0, t1, x1, f1, mid).S - value;
        if ((gm < 0.0) == (glo < 0.0) && gm != 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    double tc = 0.5 * (lo + hi);
    State xc = hermite(t0, x0, f0, t1, x1, f1, tc);
    // safeguarded Newton on the exact single-step map removes the interpolation error
    double a = t0, b = t1;
    const bool rising = x1.S > x0.S;
    const double eps = 1e-14 * std::max(1.0, std::abs(value));
    for (int it = 0; it < 60; ++it) {
        const double h = tc - t0;
        if (!(h > 0.0)) break;
        const auto r = st.step(x0, f0, h);
        xc = r.x;
        const double res = xc.S - value;
        if (std::abs(res) <= eps) break;
        if ((res < 0.0) == rising) a = tc;
        else b = tc;
        double tn = r.f.S != 0.0 ? tc - res / r.f.S : a - 1.0;
        if (!(tn > a && tn < b)) tn = 0.5 * (a + b);
        if (tn == tc || b - a <= 1e-16 * std::max(1.0, std::abs(b))) break;
        tc = tn;
    }
    return {tc, xc};
}

} // namespace detail

/**
 * @brief Adaptive Dormand-Prince 5(4) integration of the planar field with event handling.
 *
 * Step control is proportional-integral on the mixed norm err / (tol + tol |x|). When S drops
 * below 1e-12 in forward time the state is placed on S = 0 and the boundary field takes over.
 * Events: equilibrium convergence (distance and field magnitude), an S-section, domain exit.
 */
inline Trajectory integrate(State x0, const ModelParams& P, double t_end, const IntegratorOptions& opt = {},
                            const Events& events = {})
{
    P.validate();
    if (!(opt.tol >= 1e-13 && opt.tol <= 1e-3)) {
        throw validation_error("integrator tolerance must lie in [1e-13, 1e-3]");
    }
    if (!is_finite(x0) || x0.S < 0.0 || x0.I < 0.0) {
        throw validation_error("initial condition must lie in the closed first quadrant");
    }
    if (!opt.reversed && x0.S > P.A * (1.0 + 1e-12)) {
        throw validation_error("initial condition requires S <= A");
    }
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw validation_error("integration horizon must be positive and finite");
    }

    constexpr double axis_floor = 1e-12;
    Trajectory tr;
    tr.tol = opt.tol;
    tr.reversed = opt.reversed;

    detail::Stepper st(P, opt);
    double t = 0.0;
    State x = x0;
    if (x.S == 0.0 && !opt.reversed) {
        st.on_axis = true;
        tr.stats.axis_time = 0.0;
    }
    State f = st.rhs(x);
    tr.samples.push_back({t, x, f});

    auto finish = [&](TerminalKind kind) {
        tr.terminal.kind = kind;
        if (!opt.record && (tr.samples.empty() || tr.samples.back().t != t)) {
            tr.samples.push_back({t, x, f});
        }
        tr.stats.rhs_evals = st.evals;
        return tr;
    };

    auto check_equilibria = [&]() -> bool {
        for (const auto& target : events.equilibria) {
            if (norm(x - target.location) <= events.convergence_radius && norm(f) <= events.field_tol) {
                tr.terminal.equilibrium = target.id;
                return true;
            }
        }
        return false;
    };

    if (x.S == 0.0 && opt.reversed) {
        tr.terminal.detail = "reversed flow from the S = 0 axis";
        return finish(TerminalKind::left_domain);
    }
    if (st.on_axis && opt.stop_on_axis) {
        return finish(TerminalKind::time_horizon);
    }
    if (check_equilibria()) {
        return finish(TerminalKind::converged_to_equilibrium);
    }

    const double h_cap = opt.h_max > 0.0 ? opt.h_max : t_end;
    // close to an armed equilibrium the step is held at 1 / |J| so the approach is resolved
    // instead of settling into error-controlled noise at the explicit stability limit
    std::vector<double> target_cap;
    for (const auto& target : events.equilibria) {
        const Mat2 J = jacobian(target.location, P);
        const double rho = std::max(std::abs(J.a) + std::abs(J.b), std::abs(J.c) + std::abs(J.d));
        target_cap.push_back(rho > 0.0 ? 1.0 / rho : t_end);
    }
    auto near_cap = [&]() {
        double cap = h_cap;
        for (std::size_t k = 0; k < target_cap.size(); ++k) {
            if (norm(x - events.equilibria[k].location) <= 1e3 * events.convergence_radius) {
                cap = std::min(cap, target_cap[k]);
            }
        }
        return cap;
    };
    double h = std::min(h_cap, st.initial_step(x, f, t_end));
    double facold = 1e-4;
    bool last_rejected = false;
    std::size_t section_hits = 0;
    constexpr double safe = 0.9, beta_pi = 0.04, expo1 = 0.2 - beta_pi * 0.75;

    while (true) {
        if (t >= t_end) return finish(TerminalKind::time_horizon);
        if (tr.stats.accepted + tr.stats.rejected >= opt.max_steps) {
            tr.terminal.detail = "maximum step count reached";
            return finish(TerminalKind::step_failure);
        }
        h = std::min({h, near_cap(), t_end - t});
        if (h < 1e-14 * std::max(1.0, t)) {
            tr.terminal.detail = "step size underflow";
            return finish(TerminalKind::step_failure);
        }

        const auto res = st.step(x, f, h);
        if (!is_finite(res.x) || !std::isfinite(res.err)) {
            ++tr.stats.rejected;
            h *= 0.1;
            last_rejected = true;
            continue;
        }
        const double fac11 = std::pow(res.err, expo1);
        if (res.err > 1.0) {
            ++tr.stats.rejected;
            h /= std::min(5.0, fac11 / safe);
            last_rejected = true;
            continue;
        }

        // accepted; candidate end of the step
        double t_new = t + h;
        State x_new = res.x;
        State f_new = res.f;
        bool hit_axis = false;
        if (!st.on_axis && x_new.S < axis_floor) {
            if (opt.reversed) {
                if (x_new.S < 0.0) {
                    auto [tc, xc] = detail::locate_s_level(st, t, x, f, t_new, x_new, f_new, 0.0);
                    t_new = tc;
                    x_new = xc;
                }
                x_new.S = 0.0;
                ++tr.stats.accepted;
                t = t_new;
                x = x_new;
                f = st.rhs(x);
                tr.samples.push_back({t, x, f});
                tr.terminal.detail = "reversed flow reached the S = 0 axis";
                return finish(TerminalKind::left_domain);
            }
            if (x_new.S < 0.0) {
                auto [tc, xc] = detail::locate_s_level(st, t, x, f, t_new, x_new, f_new, 0.0);
                t_new = tc;
                x_new = xc;
            }
            x_new.S = 0.0;
            hit_axis = true;
        }

        bool section_terminal = false;
        if (events.section) {
            const Section& sec = *events.section;
            const double g0 = x.S - sec.value;
            const double g1 = x_new.S - sec.value;
            const bool sign_change = g0 != 0.0 && (g1 == 0.0 || (g0 < 0.0) != (g1 < 0.0));
            const int dir = g1 > g0 ? 1 : -1;
            if (sign_change && (sec.direction == 0 || sec.direction == dir)) {
                auto [tc, xc] = detail::locate_s_level(st, t, x, f, t + h, res.x, res.f, sec.value);
                Crossing c{tc, xc, dir, sec.value};
                tr.crossings.push_back(c);
                ++section_hits;
                if (sec.stop_after > 0 && section_hits >= sec.stop_after) {
                    t_new = tc;
                    x_new = xc;
                    hit_axis = false;
                    section_terminal = true;
                    tr.terminal.crossing = c;
                }
            }
        }

        ++tr.stats.accepted;
        tr.stats.max_error = std::max(tr.stats.max_error, res.err);
        double fac = fac11 / std::pow(facold, beta_pi);
        fac = std::clamp(fac / safe, 0.1, 5.0);
        facold = std::max(res.err, 1e-4);
        double h_next = h / fac;
        if (last_rejected) h_next = std::min(h_next, h);
        last_rejected = false;

        t = t_new;
        x = x_new;
        if (hit_axis) {
            st.on_axis = true;
            tr.stats.axis_time = t;
            f = st.rhs(x);
        } else if (section_terminal) {
            f = st.rhs(x);
        } else {
            f = f_new;
        }
        if (opt.record || section_terminal) tr.samples.push_back({t, x, f});
        h = h_next;

        if (!opt.reversed && x.S > P.A * (1.0 + 1e-6) + 1e-6) {
            throw numerical_error("trajectory exceeded S = A; the carrying capacity bound was violated");
        }
        if (section_terminal) return finish(TerminalKind::crossed_section);
        if (hit_axis && opt.stop_on_axis) return finish(TerminalKind::time_horizon);
        if (std::abs(x.S) > opt.domain_bound || std::abs(x.I) > opt.domain_bound) {
            tr.terminal.detail = "state left the bounding box";
            return finish(TerminalKind::left_domain);
        }
        if (check_equilibria()) return finish(TerminalKind::converged_to_equilibrium);
    }
}

} // namespace vsir
