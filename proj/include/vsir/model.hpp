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
#include <string>
#include <vector>

#include "vsir/error.hpp"

namespace vsir {

/// A point (S, I) of the planar phase space. Also used for tangent vectors.
struct State {
    double S = 0.0;
    double I = 0.0;

    friend State operator+(State a, State b) { return {a.S + b.S, a.I + b.I}; }
    friend State operator-(State a, State b) { return {a.S - b.S, a.I - b.I}; }
    friend State operator*(double k, State a) { return {k * a.S, k * a.I}; }
    friend State operator-(State a) { return {-a.S, -a.I}; }
    friend bool operator==(const State&, const State&) = default;
};

inline double norm(State x) { return std::hypot(x.S, x.I); }
inline bool is_finite(State x) { return std::isfinite(x.S) && std::isfinite(x.I); }

/**
 * @brief Full parameter set of the vaccinated logistic SIR model.
 *
 * The planar reduction only sees sigma = mu + d; mu is kept separately because the
 * recovered compartment decays at rate mu alone.
 */
struct ModelParams {
    double A = 0.0;    ///< carrying capacity scale of the susceptibles
    double beta = 0.0; ///< transmission rate
    double m = 0.0;    ///< birth rate
    double mu = 0.0;   ///< natural death rate
    double d = 0.0;    ///< disease induced death rate
    double g = 0.0;    ///< recovery rate
    double p = 0.0;    ///< vaccinated proportion of newborns

    double sigma() const { return mu + d; }
    /// Total removal rate of infectious individuals, sigma + g.
    double removal() const { return mu + d + g; }

    void validate() const
    {
        auto positive = [](double v, const char* name) {
            if (!std::isfinite(v) || !(v > 0.0)) {
                throw validation_error(std::string("parameter ") + name + " must be positive and finite");
            }
        };
        positive(A, "A");
        positive(beta, "beta");
        positive(m, "m");
        positive(mu, "mu");
        positive(d, "d");
        positive(g, "g");
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            throw validation_error("parameter p must lie in [0, 1]");
        }
    }

    /// Non-fatal diagnostics; p > 0 with R0 <= 1 is computable but outside the studied regime.
    std::vector<std::string> warnings() const
    {
        std::vector<std::string> out;
        if (p > 0.0 && A * beta / removal() <= 1.0) {
            out.emplace_back("p > 0 with R0 <= 1: outside the regime where vaccination is studied");
        }
        return out;
    }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Reference configuration: A = 1.1, beta = 1.3, m = sigma = g = 0.35, p = 0.
/// sigma is split as mu = 0.2, d = 0.15.
inline ModelParams reference_params()
{
    return ModelParams{.A = 1.1, .beta = 1.3, .m = 0.35, .mu = 0.2, .d = 0.15, .g = 0.35, .p = 0.0};
}

/// Which rate absorbs changes of R0 when moving in the (R0, p) plane.
enum class R0Carrier {
    transmission, ///< beta = R0 (sigma + g) / A, all other rates fixed
    removal,      ///< beta fixed; mu, d, g scaled together so that sigma + g = A beta / R0
};

inline const char* to_string(R0Carrier c) { return c == R0Carrier::transmission ? "transmission" : "removal"; }

inline R0Carrier parse_carrier(const std::string& s)
{
    if (s == "transmission" || s == "beta") return R0Carrier::transmission;
    if (s == "removal") return R0Carrier::removal;
    throw validation_error("unknown R0 carrier '" + s + "' (expected transmission or removal)");
}

/// Everything except (R0, p). beta is only consulted by the removal carrier.
struct Base {
    double A = 0.0;
    double m = 0.0;
    double mu = 0.0;
    double d = 0.0;
    double g = 0.0;
    double beta = 0.0;
    R0Carrier carrier = R0Carrier::transmission;

    double sigma() const { return mu + d; }

    static Base from(const ModelParams& P, R0Carrier carrier = R0Carrier::transmission)
    {
        return Base{P.A, P.m, P.mu, P.d, P.g, P.beta, carrier};
    }

    friend bool operator==(const Base&, const Base&) = default;
};

inline Base reference_base(R0Carrier carrier = R0Carrier::transmission)
{
    return Base::from(reference_params(), carrier);
}

/// A point of the bifurcation plane together with the base that fixes the remaining rates.
struct ReducedPoint {
    double r0 = 0.0;
    double p = 0.0;
    Base base;
};

/// Interior field: (S(A - S) - beta I S - p m, beta I S - (sigma + g) I).
inline State vector_field(State x, const ModelParams& P)
{
    if (!is_finite(x)) {
        throw validation_error("vector_field: non-finite state");
    }
    const double infection = P.beta * x.I * x.S;
    return {x.S * (P.A - x.S) - infection - P.p * P.m, infection - P.removal() * x.I};
}

/// Extension of the field to the invariant line S = 0.
inline State boundary_field(State x, const ModelParams& P)
{
    if (x.S != 0.0) {
        throw validation_error("boundary_field requires S = 0");
    }
    if (!std::isfinite(x.I)) {
        throw validation_error("boundary_field: non-finite state");
    }
    return {0.0, -P.removal() * x.I};
}

inline double r0_of(const ModelParams& P)
{
    P.validate();
    return P.A * P.beta / P.removal();
}

/// beta realised at a given R0 under the base's carrier.
inline double beta_at(const Base& base, double r0)
{
    if (base.carrier == R0Carrier::transmission) {
        return r0 * (base.sigma() + base.g) / base.A;
    }
    return base.beta;
}

/// sigma + g realised at a given R0 under the base's carrier.
inline double removal_at(const Base& base, double r0)
{
    if (base.carrier == R0Carrier::transmission) {
        return base.sigma() + base.g;
    }
    return base.A * base.beta / r0;
}

inline ModelParams reduced_to_params(const ReducedPoint& q)
{
    if (!std::isfinite(q.r0) || !(q.r0 > 0.0)) {
        throw validation_error("reduced point requires r0 > 0");
    }
    const Base& b = q.base;
    ModelParams P{.A = b.A, .beta = 0.0, .m = b.m, .mu = b.mu, .d = b.d, .g = b.g, .p = q.p};
    if (b.carrier == R0Carrier::transmission) {
        P.beta = q.r0 * (b.sigma() + b.g) / b.A;
    } else {
        if (!(b.beta > 0.0)) {
            throw validation_error("removal carrier requires a positive base beta");
        }
        const double scale = removal_at(b, q.r0) / (b.sigma() + b.g);
        P.beta = b.beta;
        P.mu *= scale;
        P.d *= scale;
        P.g *= scale;
    }
    P.validate();
    return P;
}

inline ReducedPoint params_to_reduced(const ModelParams& P, R0Carrier carrier = R0Carrier::transmission)
{
    return ReducedPoint{r0_of(P), P.p, Base::from(P, carrier)};
}

/// Upper bound of S + I on the positively invariant region.
inline double invariant_region_bound(const ModelParams& P)
{
    const double s = P.removal();
    return P.A * (s + P.A) / s;
}

/// Membership in {0 <= S <= A, 0 <= S + I <= bound}, each inequality relaxed by tol.
inline bool in_invariant_region(State x, const ModelParams& P, double tol = 0.0)
{
    const double bound = invariant_region_bound(P);
    return x.S >= -tol && x.I >= -tol && x.S <= P.A + tol && x.S + x.I >= -tol && x.S + x.I <= bound + tol;
}

} // namespace vsir
