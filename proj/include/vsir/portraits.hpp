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
#include <vector>

#include "vsir/atlas.hpp"
#include "vsir/dynamics.hpp"
#include "vsir/heteroclinic.hpp"
#include "vsir/parallel.hpp"
#include "vsir/periodic_orbit.hpp"

namespace vsir {

/// Representative parameters for one region of the diagram.
struct RegionPreset {
    RegionLabel label = RegionLabel::A;
    Base base;
    double r0 = 0.0;
    double p = 0.0;
    std::string note;

    ModelParams params() const { return reduced_to_params({r0, p, base}); }
};

namespace detail {

inline ModelParams params_of(double A, double beta, double m, double mu, double d, double g)
{
    ModelParams P;
    P.A = A;
    P.beta = beta;
    P.m = m;
    P.mu = mu;
    P.d = d;
    P.g = g;
    P.p = 0.0;
    return P;
}

} // namespace detail

/**
 * Defaults: A = 1.1, beta = 1.3, m = sigma = g = 0.35 with p chosen
 * between the curves that bound the region at that R0; region B uses A = 1, sigma = g = 0.5 and
 * region C uses beta = 0.91. The heteroclinic p (regions D and E) comes from the supplied curve.
 */
inline RegionPreset region_preset(RegionLabel label, const HetCurve& het, R0Carrier carrier = R0Carrier::transmission)
{
    RegionPreset pr;
    pr.label = label;
    pr.base = reference_base(carrier);
    pr.r0 = r0_of(reference_params());
    const Base& b = pr.base;
    auto mid = [](double lo, double hi) { return 0.5 * (lo + hi); };
    switch (label) {
    case RegionLabel::A:
        pr.p = 0.9;
        pr.note = "p above p_SN";
        break;
    case RegionLabel::B:
    {
        const ModelParams P = detail::params_of(1.0, 1.3, 0.35, 0.25, 0.25, 0.5);
        pr.base = Base::from(P, carrier);
        pr.r0 = r0_of(P);
        pr.p = mid(p_t(pr.base, pr.r0), p_sn(pr.base));
        pr.note = "A=1, sigma=g=0.5, p between p_T and p_SN";
        break;
    }
    case RegionLabel::C:
    {
        const ModelParams P = detail::params_of(1.1, 0.91, 0.35, 0.2, 0.15, 0.35);
        pr.base = Base::from(P, carrier);
        pr.r0 = r0_of(P);
        pr.p = mid(p_bt2(pr.base, pr.r0), p_t(pr.base, pr.r0));
        pr.note = "beta=0.91, p between p_Bt and p_T";
        break;
    }
    case RegionLabel::D:
        pr.p = 0.6;
        pr.note = "p below p_het";
        break;
    case RegionLabel::E:
        pr.p = mid(het(pr.r0), p_h(b, pr.r0));
        pr.note = "p between p_het and p_H";
        break;
    case RegionLabel::F:
        pr.p = mid(p_h(b, pr.r0), p_bt2(b, pr.r0));
        pr.note = "p between p_H and p_Bt";
        break;
    case RegionLabel::G:
        pr.p = mid(p_bt2(b, pr.r0), p_t(b, pr.r0));
        pr.note = "p between p_Bt and p_T";
        break;
    case RegionLabel::H:
        pr.p = mid(p_t(b, pr.r0), p_sn(b));
        pr.note = "p between p_T and p_SN";
        break;
    case RegionLabel::boundary: throw validation_error("no preset for the boundary label");
    }
    return pr;
}

/**
 * n starting points spread evenly (by arc length) over the boundary of the invariant region M,
 * pulled 2% toward its centroid so every start is interior.
 */
inline std::vector<State> invariant_region_fan(const ModelParams& P, std::size_t n)
{
    const double A = P.A;
    const double bound = invariant_region_bound(P);
    const std::vector<State> corners{{0.0, 0.0}, {A, 0.0}, {A, bound - A}, {0.0, bound}};
    State centroid{};
    for (const auto& c : corners) centroid = centroid + 0.25 * c;
    std::vector<double> edge_len;
    double perimeter = 0.0;
    for (std::size_t k = 0; k < corners.size(); ++k) {
        edge_len.push_back(norm(corners[(k + 1) % corners.size()] - corners[k]));
        perimeter += edge_len.back();
    }
    std::vector<State> out;
    for (std::size_t i = 0; i < n; ++i) {
        double s = perimeter * (i + 0.5) / static_cast<double>(n);
        std::size_t k = 0;
        while (k + 1 < corners.size() && s > edge_len[k]) s -= edge_len[k++];
        const State a = corners[k];
        const State b = corners[(k + 1) % corners.size()];
        const State x = a + (s / edge_len[k]) * (b - a);
        out.push_back(centroid + 0.98 * (x - centroid));
    }
    return out;
}

struct PortraitRun {
    State x0;
    Trajectory trajectory;
    OmegaLimit omega = OmegaLimit::undecided;
    double final_I = 0.0;
};

struct PortraitOptions {
    std::size_t fan = 8;
    double horizon = 1000.0; ///< extended to 30 / |Re lambda| when E2 is a weak sink
    double tol = 1e-10;
    unsigned jobs = 1;
    bool with_cycle = true; ///< region E: locate the unstable cycle and test a start on each side
};

struct Portrait {
    RegionPreset preset;
    RegionInfo info;
    std::vector<Equilibrium> equilibria;
    std::vector<PortraitRun> runs;
    std::optional<PeriodicOrbit> cycle;
    std::optional<PortraitRun> inside;  ///< start between E2 and the cycle
    std::optional<PortraitRun> outside; ///< start beyond the cycle
};

/// Integrates x0 up to the horizon; trajectories that hit S = 0 continue on the boundary field.
inline PortraitRun portrait_run(State x0, const ModelParams& P, double horizon, double tol)
{
    IntegratorOptions io;
    io.tol = tol;
    io.h_max = omega_h_max;
    PortraitRun run;
    run.x0 = x0;
    run.trajectory = integrate(x0, P, horizon, io, omega_events(P));
    run.omega = omega_from_trajectory(run.trajectory, horizon, P);
    run.final_I = run.trajectory.final_state().I;
    return run;
}

inline Portrait make_portrait(const RegionPreset& preset, const CurveSet& curves, const PortraitOptions& opt = {})
{
    Portrait out;
    out.preset = preset;
    const ModelParams P = preset.params();
    out.info = classify_region_info(preset.r0, preset.p, curves);
    out.equilibria = all_equilibria(P);
    double horizon = opt.horizon;
    const Equilibrium e2 = endemic(P);
    if (e2.exists() && is_sink(e2.stability)) {
        horizon = std::max(horizon, 30.0 / std::abs(e2.eigenvalues[1].real()));
    }
    const auto starts = invariant_region_fan(P, opt.fan);
    out.runs.resize(starts.size());
    parallel_for(starts.size(), opt.jobs,
                 [&](std::size_t i) { out.runs[i] = portrait_run(starts[i], P, horizon, opt.tol); });
    if (opt.with_cycle && preset.label == RegionLabel::E) {
        PeriodicOptions po;
        po.p_het = curves.het(preset.r0);
        out.cycle = find_periodic_orbit(preset.r0, preset.p, preset.base, po);
        const State c = out.cycle->center;
        const State x = out.cycle->section_point;
        out.inside = portrait_run(c + 0.5 * (x - c), P, horizon, opt.tol);
        out.outside = portrait_run(c + 1.1 * (x - c), P, horizon, opt.tol);
    }
    return out;
}

} // namespace vsir
