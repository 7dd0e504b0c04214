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

// Closed-form bifurcation maps of the (R0, p) plane.

#include <algorithm>
#include <cmath>

#include "vsir/error.hpp"
#include "vsir/model.hpp"

namespace vsir {

/// Saddle-node curve: E0 and E1 collide at p = A^2 / (4m), independently of R0.
inline double p_sn(const Base& b) { return (b.A * b.A / b.m) * 0.25; }

/// Transcritical curve (A^2/m)(R0 - 1)/R0^2; E2 leaves the first quadrant through it.
inline double p_t(const Base& b, double r0)
{
    if (!(r0 > 1.0)) {
        throw curve_domain_error("p_t is defined for r0 > 1");
    }
    return (b.A * b.A / b.m) * ((r0 - 1.0) / (r0 * r0));
}

/// Hopf curve A^2 / (m R0^2). Only meaningful for r0 >= 2; allow_below_two permits diagnostics.
inline double p_h(const Base& b, double r0, bool allow_below_two = false)
{
    if (!(r0 > 0.0) || (!allow_below_two && r0 < 2.0)) {
        throw curve_domain_error("p_h is defined for r0 >= 2");
    }
    return (b.A * b.A / b.m) / (r0 * r0);
}

struct BelyakovRoots {
    double p1 = 0.0; ///< lower root of Delta_2, may be negative
    double p2 = 0.0; ///< upper root of Delta_2: the Belyakov transition of E2
};

/// Roots in p of Delta_2 at a given R0: (1 - 2 beta -+ 2 sqrt(beta (R0 + beta - 2))) A^2 / (m R0^2).
inline BelyakovRoots belyakov_roots(double r0, const Base& b)
{
    if (!(r0 > 0.0)) {
        throw curve_domain_error("belyakov_roots requires r0 > 0");
    }
    const double beta = beta_at(b, r0);
    const double radicand = beta * (r0 + beta - 2.0);
    if (radicand < 0.0) {
        throw curve_domain_error("no real Belyakov transition: beta <= 2 - r0");
    }
    const double scale = (b.A * b.A / b.m) / (r0 * r0);
    const double root = 2.0 * std::sqrt(radicand);
    return {(1.0 - 2.0 * beta - root) * scale, (1.0 - 2.0 * beta + root) * scale};
}

inline double p_bt2(const Base& b, double r0) { return belyakov_roots(r0, b).p2; }

/// Delta_2(p) = m^2 beta^4 p^2 + 2 m beta^2 (2 beta - 1)(sigma+g)^2 p + (4 beta + 1)(sigma+g)^4 - 4 A (sigma+g)^3 beta^2.
/// Its sign is the sign of the discriminant of J(E2).
inline double delta2_eval(double p, const ModelParams& P)
{
    const double s = P.removal();
    const double b2 = P.beta * P.beta;
    const double s2 = s * s;
    return P.m * P.m * b2 * b2 * p * p + 2.0 * P.m * b2 * (2.0 * P.beta - 1.0) * s2 * p
        + (4.0 * P.beta + 1.0) * s2 * s2 - 4.0 * P.A * s2 * s * b2;
}

/// Magnitude of the largest term of Delta_2(p); residuals are compared against this.
inline double delta2_scale(double p, const ModelParams& P)
{
    const double s = P.removal();
    const double b2 = P.beta * P.beta;
    const double s2 = s * s;
    return std::max({std::abs(P.m * P.m * b2 * b2 * p * p), std::abs(2.0 * P.m * b2 * (2.0 * P.beta - 1.0) * s2 * p),
                     std::abs((4.0 * P.beta + 1.0) * s2 * s2), std::abs(4.0 * P.A * s2 * s * b2)});
}

/// Discriminant of J(E2) for the unvaccinated system: (4 beta + 1)(sigma+g)^2 - 4 A beta^2 (sigma+g).
inline double delta_p0(const ModelParams& P)
{
    const double s = P.removal();
    return (4.0 * P.beta + 1.0) * s * s - 4.0 * P.A * P.beta * P.beta * s;
}

struct Discriminant {
    double delta2 = 0.0;
    double delta_p0 = 0.0;
};

inline Discriminant discriminant(const ModelParams& P) { return {delta2_eval(P.p, P), delta_p0(P)}; }

} // namespace vsir
