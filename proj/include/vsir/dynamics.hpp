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
#include <string>
#include <vector>

#include "vsir/equilibria.hpp"
#include "vsir/ode.hpp"

namespace vsir {

enum class OmegaLimit { E0, E1, E2, cycle, boundary_axis, undecided };

inline const char* to_string(OmegaLimit w)
{
    switch (w) {
    case OmegaLimit::E0: return "E0";
    case OmegaLimit::E1: return "E1";
    case OmegaLimit::E2: return "E2";
    case OmegaLimit::cycle: return "cycle";
    case OmegaLimit::boundary_axis: return "boundary-axis";
    case OmegaLimit::undecided: return "undecided";
    }
    return "?";
}

struct OmegaResult {
    OmegaLimit limit = OmegaLimit::undecided;
    Trajectory trajectory;
};

/// Equilibria in the closed first quadrant, as integrator convergence targets.
inline std::vector<EquilibriumTarget> admissible_targets(const ModelParams& P)
{
    std::vector<EquilibriumTarget> out;
    for (const auto& e : all_equilibria(P)) {
        if (e.exists()) out.push_back({e.id, e.location});
    }
    return out;
}

/// Classifies a finished integration: convergence event, axis contact, then late section returns.
/// A cycle needs at least three returns to S = S2 inside the last 20% of the horizon whose
/// successive gaps agree to 1% and whose distances from E2 stay within 1% (a slowly converging
/// focus has regular gaps but shrinking returns).
inline OmegaLimit omega_from_trajectory(const Trajectory& tr, double horizon, const ModelParams& P)
{
    switch (tr.terminal.kind) {
    case TerminalKind::step_failure:
        throw numerical_error("omega_limit_estimate: integration failed (" + tr.terminal.detail + ")");
    case TerminalKind::converged_to_equilibrium:
        switch (*tr.terminal.equilibrium) {
        case EquilibriumId::E0: return OmegaLimit::E0;
        case EquilibriumId::E1: return OmegaLimit::E1;
        case EquilibriumId::E2: return OmegaLimit::E2;
        }
        break;
    default: break;
    }
    if (tr.reached_axis()) return OmegaLimit::boundary_axis;
    std::vector<const Crossing*> late;
    for (const auto& c : tr.crossings) {
        if (c.t >= 0.8 * horizon) late.push_back(&c);
    }
    if (late.size() < 3) return OmegaLimit::undecided;
    for (std::size_t i = 2; i < late.size(); ++i) {
        const double g1 = late[i - 1]->t - late[i - 2]->t;
        const double g2 = late[i]->t - late[i - 1]->t;
        if (std::abs(g2 - g1) > 0.01 * std::max(g1, g2)) return OmegaLimit::undecided;
    }
    const double I2 = endemic(P).location.I;
    const double first = late.front()->x.I - I2;
    const double last = late.back()->x.I - I2;
    if (std::abs(last - first) > 0.01 * std::max(std::abs(first), std::abs(last))) return OmegaLimit::undecided;
    return OmegaLimit::cycle;
}

/// Step cap for omega-limit runs. Without it the step grows near a weakly damped focus until
/// |lambda h| sits on the edge of the stability region and the spiral stops shrinking.
inline constexpr double omega_h_max = 2.0;

/// Events used for omega-limit runs: every admissible equilibrium plus returns to S = S2.
inline Events omega_events(const ModelParams& P)
{
    Events ev;
    ev.equilibria = admissible_targets(P);
    const Equilibrium e2 = endemic(P);
    if (e2.location.S > 0.0) ev.section = Section{e2.location.S, -1, 0};
    return ev;
}

/**
 * Integrates up to the horizon with convergence events armed for every admissible equilibrium.
 * A trajectory that reaches S = 0 is reported as boundary-axis (I then decays exponentially).
 */
inline OmegaResult omega_limit_estimate(State x0, const ModelParams& P, double horizon, double tol = 1e-10)
{
    IntegratorOptions opt;
    opt.tol = tol;
    opt.stop_on_axis = true;
    opt.record = false;
    opt.h_max = omega_h_max;

    OmegaResult out;
    out.trajectory = integrate(x0, P, horizon, opt, omega_events(P));
    out.limit = omega_from_trajectory(out.trajectory, horizon, P);
    return out;
}

enum class ManifoldBranch { stable, unstable };
enum class ManifoldSide { plus, minus };

/// Launch point eq + offset v, v the unit eigenvector of the requested branch oriented to I > 0
/// (or S > 0 when the eigenvector lies on the axis) for the plus side.
inline State manifold_seed(const Equilibrium& eq, ManifoldBranch branch, ManifoldSide side, double offset,
                           const ModelParams& P)
{
    if (eq.stability != StabilityClass::saddle) {
        throw validation_error(std::string("manifold_shoot: ") + to_string(eq.id) + " is not a saddle");
    }
    if (!(offset >= 1e-8 && offset <= 1e-4)) {
        throw validation_error("manifold_shoot: offset must lie in [1e-8, 1e-4]");
    }
    const double lambda = branch == ManifoldBranch::unstable ? eq.eigenvalues[1].real() : eq.eigenvalues[0].real();
    State v = eigenvector_2x2(jacobian(eq.location, P), lambda);
    constexpr double axis_tol = 1e-14;
    const double key = std::abs(v.I) > axis_tol ? v.I : v.S;
    if (key < 0.0) v = -v;
    if (side == ManifoldSide::minus) v = -v;
    return eq.location + offset * v;
}

/// Integrates one branch of a saddle's invariant manifold; stable branches run in reversed time.
inline Trajectory manifold_shoot(const Equilibrium& eq, ManifoldBranch branch, ManifoldSide side, double offset,
                                 const ModelParams& P, double t_end, IntegratorOptions opt = {}, const Events& ev = {})
{
    const State seed = manifold_seed(eq, branch, side, offset, P);
    opt.reversed = branch == ManifoldBranch::stable;
    return integrate(seed, P, t_end, opt, ev);
}

} // namespace vsir
