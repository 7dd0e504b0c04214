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
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "vsir/atlas.hpp"
#include "vsir/dynamics.hpp"
#include "vsir/parallel.hpp"
#include "vsir/power_fit.hpp"

namespace vsir {

struct ShootingOptions {
    double offset = 1e-7;   ///< distance of the manifold seed from the saddle
    double tol = 1e-11;     ///< integrator tolerance
    double horizon = 2000.0;
};

struct SplitResult {
    double value = 0.0; ///< I_u - I_s on the section
    double I_u = 0.0;   ///< unstable manifold of E1 at its first crossing
    double I_s = 0.0;   ///< stable manifold of E0 at its first crossing
    double section = 0.0;
};

/**
 * @brief Signed distance between W^u(E1) and W^s(E0) on the section S = S2.
 *
 * W^u(E1) is followed forward and W^s(E0) backward to their first crossings of S = S2 with
 * dS/dt < 0 (original time). Positive when the unstable manifold passes outside the stable one.
 */
inline SplitResult splitting(double r0, double p, const Base& base, const ShootingOptions& opt = {})
{
    if (!(r0 > 2.0)) throw curve_domain_error("splitting requires r0 > 2");
    if (!(p > 0.0) || !(p < p_t(base, r0))) throw curve_domain_error("splitting requires 0 < p < p_T(r0)");
    const ReducedPoint q{r0, p, base};
    const ModelParams P = reduced_to_params(q);
    const auto dfe = disease_free(P);
    if (dfe.size() != 2) throw numerical_error("splitting: disease-free equilibria missing");
    const Equilibrium e2 = endemic(q);
    const double S2 = e2.location.S;

    IntegratorOptions io;
    io.tol = opt.tol;
    io.record = false;
    io.stop_on_axis = true;
    io.domain_bound = 1e3;

    Events fwd;
    fwd.section = Section{S2, -1, 1};
    fwd.equilibria = {{EquilibriumId::E2, e2.location}};
    const Trajectory u =
        manifold_shoot(dfe[1], ManifoldBranch::unstable, ManifoldSide::plus, opt.offset, P, opt.horizon, io, fwd);
    // reversed time flips the sign of dS/dt
    Events bwd;
    bwd.section = Section{S2, +1, 1};
    const Trajectory s =
        manifold_shoot(dfe[0], ManifoldBranch::stable, ManifoldSide::plus, opt.offset, P, opt.horizon, io, bwd);

    if (u.terminal.kind != TerminalKind::crossed_section || s.terminal.kind != TerminalKind::crossed_section) {
        throw numerical_error("splitting: no-crossing at r0=" + std::to_string(r0) + " p=" + std::to_string(p)
                              + " (unstable: " + to_string(u.terminal.kind) + ", stable: " + to_string(s.terminal.kind)
                              + ")");
    }
    SplitResult r;
    r.I_u = u.terminal.crossing->x.I;
    r.I_s = s.terminal.crossing->x.I;
    r.value = r.I_u - r.I_s;
    r.section = S2;
    return r;
}

struct HetSolution {
    double r0 = 0.0;
    double p = 0.0;        ///< bracket midpoint
    double residual = 0.0; ///< |splitting| at p
    double lo = 0.0, hi = 0.0;
    double split_lo = 0.0, split_hi = 0.0;
    int iterations = 0;
};

/// Bisection on splitting(r0, .) until the bracket is no wider than tol_p.
inline HetSolution find_het_p(double r0, double lo, double hi, const Base& base, double tol_p = 1e-6,
                              const ShootingOptions& opt = {})
{
    if (!(lo < hi)) throw validation_error("find_het_p: empty bracket");
    double s_lo = splitting(r0, lo, base, opt).value;
    double s_hi = splitting(r0, hi, base, opt).value;
    if ((s_lo < 0.0) == (s_hi < 0.0)) {
        throw validation_error("find_het_p: splitting has the same sign at both bracket ends");
    }
    HetSolution sol;
    sol.r0 = r0;
    while (hi - lo > tol_p) {
        const double mid = 0.5 * (lo + hi);
        const double s = splitting(r0, mid, base, opt).value;
        if ((s < 0.0) == (s_lo < 0.0)) {
            lo = mid;
            s_lo = s;
        } else {
            hi = mid;
            s_hi = s;
        }
        ++sol.iterations;
    }
    sol.lo = lo;
    sol.hi = hi;
    sol.split_lo = s_lo;
    sol.split_hi = s_hi;
    sol.p = 0.5 * (lo + hi);
    sol.residual = std::abs(splitting(r0, sol.p, base, opt).value);
    return sol;
}

/**
 * Sign-change bracket for the heteroclinic p at r0, found by scanning (0, p_T) on a uniform grid.
 * The first change from negative to positive splitting is returned; points where a manifold
 * misses the section are skipped.
 */
inline std::pair<double, double> het_bracket(double r0, const Base& base, const ShootingOptions& opt = {},
                                             int samples = 24)
{
    const double pt = p_t(base, r0);
    std::optional<std::pair<double, double>> prev;
    for (int k = 1; k <= samples; ++k) {
        const double p = pt * k / (samples + 1.0);
        double s = 0.0;
        try {
            s = splitting(r0, p, base, opt).value;
        } catch (const numerical_error&) {
            continue;
        }
        if (prev && prev->second < 0.0 && s >= 0.0) return {prev->first, p};
        prev = std::pair{p, s};
    }
    throw numerical_error("het_bracket: no sign change of the splitting in (0, p_T) at r0=" + std::to_string(r0));
}

struct HetRow {
    double r0 = 0.0;
    double p_het = 0.0;
    double residual = 0.0;
    bool ok = false;
    std::string error;
};

inline std::vector<HetRow> build_het_table(const std::vector<double>& r0_list, const Base& base, double tol_p = 1e-6,
                                           const ShootingOptions& opt = {}, unsigned jobs = 1)
{
    std::vector<HetRow> rows(r0_list.size());
    parallel_for(r0_list.size(), jobs, [&](std::size_t i) {
        HetRow& row = rows[i];
        row.r0 = r0_list[i];
        try {
            const auto [lo, hi] = het_bracket(row.r0, base, opt);
            const HetSolution sol = find_het_p(row.r0, lo, hi, base, tol_p, opt);
            row.p_het = sol.p;
            row.residual = sol.residual;
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return rows;
}

struct TablePoint {
    double r0 = 0.0;
    double p = 0.0;
};

/// The 13 published (R0, p) points on the heteroclinic curve.
inline const std::vector<TablePoint>& published_het_table()
{
    static const std::vector<TablePoint> table{
        {2.0725, 0.793486}, {2.2000, 0.686625}, {2.2698, 0.636156}, {2.4237, 0.541135}, {2.6000, 0.453994},
        {2.6981, 0.413374}, {2.8039, 0.374719}, {2.9184, 0.338027}, {3.0426, 0.303294}, {3.1778, 0.270517},
        {3.3256, 0.239692}, {3.4878, 0.210816}, {3.6667, 0.183883},
    };
    return table;
}

inline PowerFit fit_table(const std::vector<TablePoint>& pts)
{
    std::vector<double> x, y;
    for (const auto& t : pts) {
        x.push_back(t.r0);
        y.push_back(t.p);
    }
    return power_fit(x, y);
}

/// Heteroclinic curve from the power law fitted to the published table.
inline HetCurve published_het_curve()
{
    const PowerFit f = fit_table(published_het_table());
    return HetCurve::power_law(f.a, f.b, f.c, "fit of published table");
}

/// Heteroclinic curve evaluated by shooting + bisection at each requested r0.
inline HetCurve shooting_het_curve(const Base& base, double tol_p = 1e-6, const ShootingOptions& opt = {})
{
    return {"shooting", [base, tol_p, opt](double r0) {
                const auto [lo, hi] = het_bracket(r0, base, opt);
                return find_het_p(r0, lo, hi, base, tol_p, opt).p;
            }};
}

} // namespace vsir
