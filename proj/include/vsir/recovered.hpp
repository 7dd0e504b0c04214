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

#include <array>
#include <cmath>
#include <vector>

#include "vsir/ode.hpp"

namespace vsir {

struct RecoveredSample {
    double t = 0.0;
    double R = 0.0;
};

/**
 * @brief Recovered compartment along a planar trajectory: dR/dt = p m + g I(t) - mu R.
 *
 * Exact exponential propagation of the linear part; the forcing g I(t) is integrated with
 * five-point Gauss-Legendre on the trajectory's Hermite dense output, subdividing so that
 * mu * (sub-interval) <= 0.5.
 */
inline std::vector<RecoveredSample> recover_recovered(const Trajectory& traj, double R_initial, const ModelParams& P)
{
    P.validate();
    if (traj.reversed) {
        throw validation_error("recover_recovered needs a forward-time trajectory");
    }
    if (traj.samples.empty()) {
        throw validation_error("recover_recovered: empty trajectory");
    }
    if (traj.terminal.kind == TerminalKind::step_failure) {
        throw numerical_error("recover_recovered: trajectory ended in step failure");
    }
    static constexpr std::array<double, 5> nodes{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                                 0.9061798459386640};
    static constexpr std::array<double, 5> weights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                   0.4786286704993665, 0.2369268850561891};
    const double mu = P.mu;
    const double inflow = P.p * P.m;

    std::vector<RecoveredSample> out;
    out.reserve(traj.samples.size());
    double R = R_initial;
    out.push_back({traj.samples.front().t, R});
    for (std::size_t k = 0; k + 1 < traj.samples.size(); ++k) {
        const Sample& a = traj.samples[k];
        const Sample& b = traj.samples[k + 1];
        const double h = b.t - a.t;
        const int pieces = std::max(1, static_cast<int>(std::ceil(mu * h / 0.5)));
        const double hp = h / pieces;
        for (int j = 0; j < pieces; ++j) {
            const double t0 = a.t + j * hp;
            double forcing = 0.0;
            for (std::size_t q = 0; q < nodes.size(); ++q) {
                const double tau = 0.5 * hp * (nodes[q] + 1.0);
                const double I = hermite(a.t, a.x, a.dx, b.t, b.x, b.dx, t0 + tau).I;
                forcing += weights[q] * std::exp(-mu * (hp - tau)) * P.g * I;
            }
            forcing *= 0.5 * hp;
            R = std::exp(-mu * hp) * R - inflow * std::expm1(-mu * hp) / mu + forcing;
        }
        out.push_back({b.t, R});
    }
    return out;
}

} // namespace vsir
