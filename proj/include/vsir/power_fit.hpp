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
#include <span>
#include <vector>

#include "vsir/error.hpp"

namespace vsir {

/// y = a x^b + c fitted by least squares.
struct PowerFit {
    double a = 0.0, b = 0.0, c = 0.0;
    double rss = 0.0;       ///< residual sum of squares
    double corr = 0.0;      ///< coefficient of determination R^2 of the fit
    double pearson = 0.0;   ///< Pearson correlation between fitted and observed y
    double grad_norm = 0.0; ///< |grad rss| at the solution
    int iterations = 0;

    double operator()(double x) const { return a * std::pow(x, b) + c; }
};

namespace detail {

/// Solves the 3x3 system M z = r by Gaussian elimination with partial pivoting.
inline std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> M, std::array<double, 3> r)
{
    double scale = 0.0;
    for (const auto& row : M) {
        for (double v : row) scale = std::max(scale, std::abs(v));
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int i = col + 1; i < 3; ++i) {
            if (std::abs(M[i][col]) > std::abs(M[piv][col])) piv = i;
        }
        if (!(std::abs(M[piv][col]) > 1e-14 * scale)) {
            throw numerical_error("power_fit: singular normal equations");
        }
        std::swap(M[piv], M[col]);
        std::swap(r[piv], r[col]);
        for (int i = col + 1; i < 3; ++i) {
            const double f = M[i][col] / M[col][col];
            for (int j = col; j < 3; ++j) M[i][j] -= f * M[col][j];
            r[i] -= f * r[col];
        }
    }
    std::array<double, 3> z{};
    for (int i = 2; i >= 0; --i) {
        double s = r[i];
        for (int j = i + 1; j < 3; ++j) s -= M[i][j] * z[j];
        z[i] = s / M[i][i];
    }
    return z;
}

} // namespace detail

/**
 * @brief Fits y = a x^b + c with Levenberg-damped Gauss-Newton.
 *
 * Start: c0 = min(y) - 0.01, (a0, b0) from the log-log regression of (x, y - c0).
 * Damping lambda starts at 1e-3, x10 on a rejected step, /10 on an accepted one.
 * Stops when the step norm is <= 1e-12 or the gradient norm is <= 1e-10.
 */
inline PowerFit power_fit(std::span<const double> xs, std::span<const double> ys)
{
    const std::size_t n = xs.size();
    if (n != ys.size()) throw validation_error("power_fit: x and y differ in length");
    if (n < 4) throw validation_error("power_fit needs at least 4 points");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
            throw validation_error("power_fit needs finite data with x > 0");
        }
    }

    const double c0 = *std::min_element(ys.begin(), ys.end()) - 0.01;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(xs[i]);
        const double ly = std::log(ys[i] - c0);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (!(std::abs(denom) > 1e-14 * std::max(1.0, n * sxx))) {
        throw numerical_error("power_fit: singular normal equations (all x equal)");
    }
    std::array<double, 3> theta{};
    theta[1] = (n * sxy - sx * sy) / denom;
    theta[0] = std::exp((sy - theta[1] * sx) / n);
    theta[2] = c0;

    auto rss_of = [&](const std::array<double, 3>& th) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = ys[i] - (th[0] * std::pow(xs[i], th[1]) + th[2]);
            s += r * r;
        }
        return s;
    };
    // J^T J and J^T r for the model residuals r_i = y_i - f(x_i)
    auto normal = [&](const std::array<double, 3>& th, std::array<std::array<double, 3>, 3>& JtJ,
                      std::array<double, 3>& Jtr) {
        JtJ = {};
        Jtr = {};
        for (std::size_t i = 0; i < n; ++i) {
            const double xb = std::pow(xs[i], th[1]);
            const std::array<double, 3> J{xb, th[0] * xb * std::log(xs[i]), 1.0};
            const double r = ys[i] - (th[0] * xb + th[2]);
            for (int a = 0; a < 3; ++a) {
                Jtr[a] += J[a] * r;
                for (int b = 0; b < 3; ++b) JtJ[a][b] += J[a] * J[b];
            }
        }
    };

    double lambda = 1e-3;
    double rss = rss_of(theta);
    PowerFit fit;
    constexpr int max_iter = 500;
    bool converged = false;
    std::array<std::array<double, 3>, 3> JtJ{};
    std::array<double, 3> Jtr{};
    int it = 0;
    for (; it < max_iter; ++it) {
        normal(theta, JtJ, Jtr);
        // grad rss = -2 J^T r
        const double gnorm = 2.0 * std::sqrt(Jtr[0] * Jtr[0] + Jtr[1] * Jtr[1] + Jtr[2] * Jtr[2]);
        if (gnorm <= 1e-10) {
            converged = true;
            break;
        }
        // singular J^T J means the data cannot separate the three parameters
        detail::solve3(JtJ, Jtr);
        bool accepted = false;
        double step_norm = 0.0;
        for (int tries = 0; tries < 60 && !accepted; ++tries) {
            auto M = JtJ;
            for (int k = 0; k < 3; ++k) M[k][k] += lambda;
            const auto delta = detail::solve3(M, Jtr);
            const std::array<double, 3> trial{theta[0] + delta[0], theta[1] + delta[1], theta[2] + delta[2]};
            const double trial_rss = rss_of(trial);
            step_norm = std::sqrt(delta[0] * delta[0] + delta[1] * delta[1] + delta[2] * delta[2]);
            if (std::isfinite(trial_rss) && trial_rss <= rss) {
                theta = trial;
                rss = trial_rss;
                lambda = std::max(lambda / 10.0, 1e-15);
                accepted = true;
            } else {
                lambda *= 10.0;
            }
            if (step_norm <= 1e-12) break;
        }
        if (step_norm <= 1e-12) {
            converged = true;
            ++it;
            break;
        }
        if (!accepted) {
            throw numerical_error("power_fit: damping could not reduce the residual");
        }
    }
    if (!converged) {
        throw numerical_error("power_fit: no convergence after 500 iterations");
    }

    normal(theta, JtJ, Jtr);
    fit.a = theta[0];
    fit.b = theta[1];
    fit.c = theta[2];
    fit.rss = rss;
    fit.iterations = it;
    fit.grad_norm = 2.0 * std::sqrt(Jtr[0] * Jtr[0] + Jtr[1] * Jtr[1] + Jtr[2] * Jtr[2]);

    double ybar = 0.0, fbar = 0.0;
    std::vector<double> fitted(n);
    for (std::size_t i = 0; i < n; ++i) {
        fitted[i] = fit(xs[i]);
        ybar += ys[i];
        fbar += fitted[i];
    }
    ybar /= n;
    fbar /= n;
    double sst = 0.0, sff = 0.0, syf = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sst += (ys[i] - ybar) * (ys[i] - ybar);
        sff += (fitted[i] - fbar) * (fitted[i] - fbar);
        syf += (ys[i] - ybar) * (fitted[i] - fbar);
    }
    fit.corr = sst > 0.0 ? 1.0 - rss / sst : 1.0;
    fit.pearson = (sst > 0.0 && sff > 0.0) ? syf / std::sqrt(sst * sff) : 1.0;
    return fit;
}

} // namespace vsir
