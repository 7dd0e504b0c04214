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

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsir/curves.hpp"
#include "vsir/linalg.hpp"
#include "vsir/model.hpp"

namespace vsir {

enum class EquilibriumId { E0, E1, E2 };

enum class StabilityClass {
    saddle,
    sink_node,
    sink_focus,
    source_node,
    source_focus,
    non_hyperbolic,
    nonexistent,
};

inline const char* to_string(EquilibriumId id)
{
    switch (id) {
    case EquilibriumId::E0: return "E0";
    case EquilibriumId::E1: return "E1";
    case EquilibriumId::E2: return "E2";
    }
    return "?";
}

inline const char* to_string(StabilityClass c)
{
    switch (c) {
    case StabilityClass::saddle: return "saddle";
    case StabilityClass::sink_node: return "sink-node";
    case StabilityClass::sink_focus: return "sink-focus";
    case StabilityClass::source_node: return "source-node";
    case StabilityClass::source_focus: return "source-focus";
    case StabilityClass::non_hyperbolic: return "non-hyperbolic";
    case StabilityClass::nonexistent: return "nonexistent";
    }
    return "?";
}

inline bool is_sink(StabilityClass c) { return c == StabilityClass::sink_node || c == StabilityClass::sink_focus; }
inline bool is_source(StabilityClass c) { return c == StabilityClass::source_node || c == StabilityClass::source_focus; }

struct Equilibrium {
    EquilibriumId id = EquilibriumId::E0;
    State location;
    Eigenvalues eigenvalues{};
    StabilityClass stability = StabilityClass::nonexistent;

    /// False for formal equilibria outside the closed first quadrant.
    bool exists() const { return stability != StabilityClass::nonexistent; }
};

/// Relative tolerance used for "zero real part" and "zero imaginary part".
inline constexpr double classification_tol = 1e-9;

inline StabilityClass classify(const Eigenvalues& eigs)
{
    auto zero = [](double part, std::complex<double> l) {
        return std::abs(part) <= classification_tol * (1.0 + std::abs(l));
    };
    for (const auto& l : eigs) {
        if (zero(l.real(), l)) return StabilityClass::non_hyperbolic;
    }
    const double r1 = eigs[0].real();
    const double r2 = eigs[1].real();
    if ((r1 < 0.0) != (r2 < 0.0)) return StabilityClass::saddle;
    const bool real = zero(eigs[0].imag(), eigs[0]) && zero(eigs[1].imag(), eigs[1]);
    if (r1 < 0.0) return real ? StabilityClass::sink_node : StabilityClass::sink_focus;
    return real ? StabilityClass::source_node : StabilityClass::source_focus;
}

/// [[-beta I + A - 2S, -beta S], [beta I, beta S - (sigma + g)]]
inline Mat2 jacobian(State x, const ModelParams& P)
{
    return {-P.beta * x.I + P.A - 2.0 * x.S, -P.beta * x.S, P.beta * x.I, P.beta * x.S - P.removal()};
}

namespace detail {

inline Equilibrium make_equilibrium(EquilibriumId id, State x, const ModelParams& P)
{
    Equilibrium e{id, x, eigenvalues_2x2(jacobian(x, P)), StabilityClass::nonexistent};
    e.stability = classify(e.eigenvalues);
    return e;
}

} // namespace detail

/// E0 and E1 on the axis I = 0; empty when A^2 < 4 p m.
inline std::vector<Equilibrium> disease_free(const ModelParams& P)
{
    const double disc = P.A * P.A - 4.0 * P.p * P.m;
    // relative slack so that p = A^2/(4m), evaluated in floating point, is a collision and not a gap
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * P.A * P.A;
    if (disc < -slack) {
        return {};
    }
    if (std::abs(disc) <= slack) {
        const State mid{0.5 * P.A, 0.0};
        auto e0 = detail::make_equilibrium(EquilibriumId::E0, mid, P);
        auto e1 = detail::make_equilibrium(EquilibriumId::E1, mid, P);
        e0.stability = e1.stability = StabilityClass::non_hyperbolic;
        return {e0, e1};
    }
    const double root = std::sqrt(disc);
    // 2pm / (A + root) is the cancellation-free form of (A - root) / 2
    const State s0{2.0 * P.p * P.m / (P.A + root), 0.0};
    const State s1{0.5 * (P.A + root), 0.0};
    return {detail::make_equilibrium(EquilibriumId::E0, s0, P), detail::make_equilibrium(EquilibriumId::E1, s1, P)};
}

/// Endemic equilibrium ((sigma+g)/beta, (-pm beta^2 + A (sigma+g) beta - (sigma+g)^2) / (beta^2 (sigma+g))).
/// The formal point is always returned; it is tagged nonexistent unless I2 > 0.
inline Equilibrium endemic(const ModelParams& P)
{
    const double s = P.removal();
    const double b = P.beta;
    const State x{s / b, (-P.p * P.m * b * b + P.A * s * b - s * s) / (b * b * s)};
    auto e = detail::make_equilibrium(EquilibriumId::E2, x, P);
    if (!(x.I > 0.0)) e.stability = StabilityClass::nonexistent;
    return e;
}

/// Same point written in the (R0, p) chart: S2 = A/R0, I2 = m (p_T(R0) - p) / (sigma + g).
/// On the curves this form produces exact zeros where the parameter form leaves rounding residue.
inline Equilibrium endemic(const ReducedPoint& q)
{
    const ModelParams P = reduced_to_params(q);
    const double s = P.removal();
    const double pt = (q.base.A * q.base.A / q.base.m) * ((q.r0 - 1.0) / (q.r0 * q.r0));
    const State x{q.base.A / q.r0, P.m * (pt - q.p) / s};
    auto e = detail::make_equilibrium(EquilibriumId::E2, x, P);
    if (!(x.I > 0.0)) e.stability = StabilityClass::nonexistent;
    return e;
}

/// E0, E1 (when they exist) followed by the formal E2.
inline std::vector<Equilibrium> all_equilibria(const ModelParams& P)
{
    auto out = disease_free(P);
    out.push_back(endemic(P));
    return out;
}

inline nlohmann::json to_json(const Equilibrium& e)
{
    nlohmann::json eig = nlohmann::json::array();
    for (const auto& l : e.eigenvalues) {
        eig.push_back({{"re", l.real()}, {"im", l.imag()}});
    }
    return {{"id", to_string(e.id)}, {"S", e.location.S}, {"I", e.location.I}, {"eig", eig}, {"class", to_string(e.stability)}};
}

} // namespace vsir
