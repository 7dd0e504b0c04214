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
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "vsir/curves.hpp"
#include "vsir/equilibria.hpp"
#include "vsir/error.hpp"

namespace vsir {

/// Heteroclinic bifurcation curve p_het(R0), defined for R0 > 2. Either a fitted law or a solver.
struct HetCurve {
    std::string name;
    std::function<double(double)> eval;

    double operator()(double r0) const
    {
        if (!(r0 > 2.0)) throw curve_domain_error("p_het is defined for r0 > 2");
        return eval(r0);
    }

    static HetCurve power_law(double a, double b, double c, std::string name = "power-law")
    {
        return {std::move(name), [a, b, c](double r0) { return a * std::pow(r0, b) + c; }};
    }
};

/// The five curves through the double-zero point for a fixed base.
struct CurveSet {
    Base base;
    HetCurve het;

    double sn(double = 0.0) const { return p_sn(base); }
    double t(double r0) const { return p_t(base, r0); }
    double h(double r0) const { return p_h(base, r0); }
    double bt2(double r0) const { return p_bt2(base, r0); }
    double het_p(double r0) const { return het(r0); }
    std::pair<double, double> dz() const { return {2.0, p_sn(base)}; }
};

struct OrderingReport {
    double r0 = 0.0;
    std::optional<double> p_h; ///< only reported for r0 >= 2
    double p_t = 0.0;
    double p_sn = 0.0;
    bool boundary = false; ///< r0 = 2: the three values coincide
};

/// p_H < p_T < p_SN for r0 > 2, p_T < p_SN for 1 < r0 < 2, equality at r0 = 2.
inline OrderingReport curve_ordering_check(double r0, const Base& b)
{
    OrderingReport rep;
    rep.r0 = r0;
    rep.p_t = p_t(b, r0);
    rep.p_sn = p_sn(b);
    if (r0 == 2.0) {
        rep.p_h = p_h(b, r0);
        rep.boundary = true;
        return rep;
    }
    if (r0 > 2.0) {
        rep.p_h = p_h(b, r0);
        if (!(*rep.p_h < rep.p_t && rep.p_t < rep.p_sn)) {
            throw numerical_error("ordering violated at r0=" + std::to_string(r0) + ": p_h=" + std::to_string(*rep.p_h)
                                  + " p_t=" + std::to_string(rep.p_t) + " p_sn=" + std::to_string(rep.p_sn));
        }
    } else if (!(rep.p_t < rep.p_sn)) {
        throw numerical_error("ordering violated at r0=" + std::to_string(r0) + ": p_t=" + std::to_string(rep.p_t)
                              + " p_sn=" + std::to_string(rep.p_sn));
    }
    return rep;
}

struct DzCertificate {
    double r0 = 2.0;
    double p = 0.0;
    State location;
    Mat2 jacobian;
    Mat2 expected; ///< [[0, -(sigma+g)], [0, 0]]
    Eigenvalues eigenvalues{};
    double jacobian_error = 0.0;    ///< max entrywise deviation from expected
    double max_eig_modulus = 0.0;
    double p_t = 0.0, p_h = 0.0, p_bt2 = 0.0; ///< curve values at r0 = 2, all equal to p
    bool ok = false;                ///< jacobian_error <= 1e-12 and max_eig_modulus <= 1e-10
};

inline DzCertificate dz_point(const Base& b)
{
    DzCertificate c;
    c.r0 = 2.0;
    c.p = p_sn(b);
    const ReducedPoint q{c.r0, c.p, b};
    const ModelParams P = reduced_to_params(q);
    const Equilibrium e2 = endemic(q);
    c.location = e2.location;
    c.jacobian = jacobian(e2.location, P);
    c.expected = Mat2{0.0, -P.removal(), 0.0, 0.0};
    c.jacobian_error = std::max({std::abs(c.jacobian.a - c.expected.a), std::abs(c.jacobian.b - c.expected.b),
                                 std::abs(c.jacobian.c - c.expected.c), std::abs(c.jacobian.d - c.expected.d)});
    c.eigenvalues = e2.eigenvalues;
    c.max_eig_modulus = std::max(std::abs(c.eigenvalues[0]), std::abs(c.eigenvalues[1]));
    c.p_t = p_t(b, 2.0);
    c.p_h = p_h(b, 2.0);
    c.p_bt2 = p_bt2(b, 2.0);
    c.ok = c.jacobian_error <= 1e-12 && c.max_eig_modulus <= 1e-10;
    return c;
}

struct HopfCertificate {
    double r0 = 0.0;
    double p = 0.0;
    double trace = 0.0;          ///< trace of J(E2) at p = p_H(r0)
    Eigenvalues eigenvalues{};
    double transversality = 0.0; ///< closed-form coefficient A / (2 r0^2)
    double dre_dr0 = 0.0;        ///< measured d Re(lambda) / d r0 at fixed p (central difference)
};

/**
 * Trace and transversality at the Hopf curve. dre_dr0 is an independent finite-difference
 * measurement; analytically it is pm/(2A) + A/(2 r0^2), i.e. A / r0^2 on the curve, so it has the
 * sign of the closed-form coefficient and twice its magnitude.
 */
inline HopfCertificate hopf_certificate(double r0, const Base& b)
{
    HopfCertificate c;
    c.r0 = r0;
    c.p = p_h(b, r0);
    const ReducedPoint q{r0, c.p, b};
    const ModelParams P = reduced_to_params(q);
    const Equilibrium e2 = endemic(q);
    c.trace = jacobian(e2.location, P).trace();
    c.eigenvalues = e2.eigenvalues;
    c.transversality = b.A / (2.0 * r0 * r0);
    const double dr = 1e-5 * r0;
    auto re = [&](double r) {
        const ReducedPoint qq{r, c.p, b};
        return jacobian(endemic(qq).location, reduced_to_params(qq)).trace() * 0.5;
    };
    c.dre_dr0 = (re(r0 + dr) - re(r0 - dr)) / (2.0 * dr);
    return c;
}

enum class RegionLabel { A, B, C, D, E, F, G, H, boundary };

inline const char* to_string(RegionLabel r)
{
    switch (r) {
    case RegionLabel::A: return "A";
    case RegionLabel::B: return "B";
    case RegionLabel::C: return "C";
    case RegionLabel::D: return "D";
    case RegionLabel::E: return "E";
    case RegionLabel::F: return "F";
    case RegionLabel::G: return "G";
    case RegionLabel::H: return "H";
    case RegionLabel::boundary: return "boundary";
    }
    return "?";
}

inline RegionLabel parse_region(const std::string& s)
{
    static constexpr const char* names = "ABCDEFGH";
    if (s.size() == 1) {
        for (int i = 0; i < 8; ++i) {
            if (s[0] == names[i]) return static_cast<RegionLabel>(i);
        }
    }
    throw validation_error("unknown region label '" + s + "'");
}

/// Half-width in p of the band around each curve that is labelled boundary.
inline constexpr double region_boundary_tol = 1e-6;

struct RegionInfo {
    RegionLabel label = RegionLabel::boundary;
    StabilityClass e0 = StabilityClass::nonexistent;
    StabilityClass e1 = StabilityClass::nonexistent;
    StabilityClass e2 = StabilityClass::nonexistent;
    bool cycle_expected = false; ///< region E: unstable periodic orbit around E2
    std::string nearest_curve;    ///< set for boundary labels
};

/**
 * @brief Labels a point of the (R0, p) plane from equilibrium existence and stability.
 *
 * A: no disease-free equilibria. B / H: no interior E2 with (saddle, sink) / (source, saddle)
 * disease-free pair. With interior E2: C stable node, F unstable focus, G unstable node; a stable
 * focus is E when r0 > 2 and p lies above the heteroclinic curve (the unstable cycle exists
 * between p_het and p_H) and D otherwise.
 */
inline RegionInfo classify_region_info(double r0, double p, const CurveSet& curves)
{
    if (!(r0 > 0.0) || !(p >= 0.0) || !std::isfinite(r0) || !std::isfinite(p)) {
        throw validation_error("classify_region requires r0 > 0 and p >= 0");
    }
    RegionInfo info;
    const Base& b = curves.base;
    auto near = [&](double value, const char* name) {
        if (std::abs(p - value) <= region_boundary_tol) {
            info.nearest_curve = name;
            return true;
        }
        return false;
    };
    const double pt = (b.A * b.A / b.m) * ((r0 - 1.0) / (r0 * r0));
    if (near(p_sn(b), "SN") || near(pt, "T")) return info;
    if (r0 >= 2.0 && near(p_h(b, r0), "H")) return info;
    if (p < pt) {
        const double beta = beta_at(b, r0);
        if (beta * (r0 + beta - 2.0) >= 0.0) {
            const auto roots = belyakov_roots(r0, b);
            if (near(roots.p2, "Bt") || near(roots.p1, "Bt1")) return info;
        }
        if (r0 > 2.0 && near(curves.het(r0), "Het")) return info;
    }

    const ReducedPoint q{r0, p, b};
    const ModelParams P = reduced_to_params(q);
    const auto dfe = disease_free(P);
    const Equilibrium e2 = endemic(q);
    info.e2 = e2.stability;
    if (dfe.empty()) {
        info.label = RegionLabel::A;
        return info;
    }
    info.e0 = dfe[0].stability;
    info.e1 = dfe[1].stability;

    auto unreachable = [&]() -> RegionInfo {
        throw numerical_error(std::string("classify_region: unexpected stability combination at r0=") + std::to_string(r0)
                              + " p=" + std::to_string(p) + " (E0 " + to_string(info.e0) + ", E1 " + to_string(info.e1)
                              + ", E2 " + to_string(info.e2) + ")");
    };

    if (!e2.exists()) {
        if (info.e0 == StabilityClass::saddle && is_sink(info.e1)) info.label = RegionLabel::B;
        else if (is_source(info.e0) && info.e1 == StabilityClass::saddle) info.label = RegionLabel::H;
        else return unreachable();
        return info;
    }
    switch (e2.stability) {
    case StabilityClass::sink_node: info.label = RegionLabel::C; break;
    case StabilityClass::sink_focus:
        if (r0 > 2.0 && p > curves.het(r0)) {
            info.label = RegionLabel::E;
            info.cycle_expected = true;
        } else {
            info.label = RegionLabel::D;
        }
        break;
    case StabilityClass::source_focus: info.label = RegionLabel::F; break;
    case StabilityClass::source_node: info.label = RegionLabel::G; break;
    default: return unreachable();
    }
    return info;
}

inline RegionLabel classify_region(double r0, double p, const CurveSet& curves)
{
    return classify_region_info(r0, p, curves).label;
}

} // namespace vsir
