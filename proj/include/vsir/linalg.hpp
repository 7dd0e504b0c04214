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
#include <array>
#include <cmath>
#include <complex>

#include "vsir/model.hpp"

namespace vsir {

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    double trace() const { return a + d; }
    double det() const { return a * d - b * c; }
    State operator*(State v) const { return {a * v.S + b * v.I, c * v.S + d * v.I}; }
    friend bool operator==(const Mat2&, const Mat2&) = default;
};

using Eigenvalues = std::array<std::complex<double>, 2>;

/// Closed-form roots of the characteristic polynomial, ordered by real part then imaginary part.
inline Eigenvalues eigenvalues_2x2(const Mat2& M)
{
    const double half_tr = 0.5 * M.trace();
    const double half_diff = 0.5 * (M.a - M.d);
    // tr^2/4 - det written without cancellation between the diagonal terms
    const double disc = half_diff * half_diff + M.b * M.c;
    Eigenvalues out;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        const double q = half_tr + std::copysign(root, half_tr);
        double l1 = q;
        double l2 = (q != 0.0) ? M.det() / q : half_tr - std::copysign(root, half_tr);
        if (l2 < l1) std::swap(l1, l2);
        out = {std::complex<double>(l1, 0.0), std::complex<double>(l2, 0.0)};
    } else {
        const double w = std::sqrt(-disc);
        out = {std::complex<double>(half_tr, -w), std::complex<double>(half_tr, w)};
    }
    return out;
}

/// Unit eigenvector of M for a real eigenvalue; the larger of the two candidate null vectors is used.
inline State eigenvector_2x2(const Mat2& M, double lambda)
{
    const State from_row1{M.b, lambda - M.a};
    const State from_row2{lambda - M.d, M.c};
    const State v = norm(from_row1) >= norm(from_row2) ? from_row1 : from_row2;
    const double n = norm(v);
    if (!(n > 0.0)) {
        // M = lambda I: every direction is an eigenvector
        return {1.0, 0.0};
    }
    return (1.0 / n) * v;
}

} // namespace vsir
