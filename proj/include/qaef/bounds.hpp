// Copyright 2026 The qaef Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Error-budget calculators: truncation of the Fourier sum, shot noise of a
 * Hadamard-test estimate and the magnifications that minimise it.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace qaef {

namespace detail {

inline void check_window(double a, long T) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("bounds: a must lie in (0, 1)");
    if (T < 1) throw std::invalid_argument("bounds: T must be >= 1");
}

}  // namespace detail

/// (2/a) exp(-a^2 T^2): bound on |S_inf(x) - S_T(x)| for any x.
inline double cutoff_bound(double a, long T) {
    detail::check_window(a, T);
    const double aT = a * static_cast<double>(T);
    return 2.0 / a * std::exp(-aT * aT);
}

/// (2/a) erfc(aT), never larger than cutoff_bound().
inline double erfc_bound(double a, long T) {
    detail::check_window(a, T);
    return 2.0 / a * std::erfc(a * static_cast<double>(T));
}

/// Smallest T >= 1 with cutoff_bound(a, T) <= eps_c.
inline long min_T(double a, double eps_c) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("min_T: a must lie in (0, 1)");
    if (!(eps_c > 0.0)) throw std::invalid_argument("min_T: eps_c must be positive");
    if (eps_c >= 2.0 / a) return 1;
    long T = std::max(1L, static_cast<long>(std::ceil(std::sqrt(std::log(2.0 / (a * eps_c))) / a)));
    // Correct for rounding in the closed form.
    while (cutoff_bound(a, T) > eps_c) ++T;
    while (T > 1 && cutoff_bound(a, T - 1) <= eps_c) --T;
    return T;
}

/// (1 - alpha^2) / n_shot: variance of 2 P0 - 1 with P0 = (1 + alpha)/2.
inline double shot_variance(double alpha, long n_shot) {
    if (!(std::abs(alpha) <= 1.0)) throw std::invalid_argument("shot_variance: |alpha| must be <= 1");
    if (n_shot < 1) throw std::invalid_argument("shot_variance: n_shot must be >= 1");
    return (1.0 - alpha * alpha) / static_cast<double>(n_shot);
}

struct MagnificationCandidate {
    int m = 0;
    long N = 0;             ///< nearest integer to 2 m t theta / pi
    double residual = 0.0;  ///< |2 m t theta - N pi|
};

/// Integers m in [1, m_max] ranked by how close 2 m t theta is to a
/// multiple of pi, where cos^2(2 m t theta) = 1 and the shot variance of the
/// real part vanishes. Candidates with residual above `tolerance` are
/// dropped; ties keep ascending m.
inline std::vector<MagnificationCandidate> optimal_magnifications(double theta, long t, int m_max,
                                                                  double tolerance = std::numbers::pi / 2) {
    if (!(theta > 0.0)) throw std::invalid_argument("optimal_magnifications: theta must be positive");
    if (t < 1) throw std::invalid_argument("optimal_magnifications: t must be >= 1");
    std::vector<MagnificationCandidate> out;
    for (int m = 1; m <= m_max; ++m) {
        const double phase = 2.0 * m * static_cast<double>(t) * theta;
        const long N = std::lround(phase / std::numbers::pi);
        const double r = std::abs(phase - static_cast<double>(N) * std::numbers::pi);
        if (r <= tolerance) out.push_back({m, N, r});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.residual < y.residual; });
    return out;
}

struct BoundsReport {
    double a = 0.0;
    long T = 0;
    double cutoff = 0.0;
    double erfc = 0.0;
    std::map<double, long> min_T_for;

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["a"] = a;
        j["T"] = T;
        j["cutoff_bound"] = cutoff;
        j["erfc_bound"] = erfc;
        nlohmann::json targets = nlohmann::json::array();
        for (const auto& [eps, t] : min_T_for) targets.push_back({{"eps_c", eps}, {"min_T", t}});
        j["min_T_for"] = targets;
        return j;
    }
};

inline BoundsReport bounds_report(double a, long T, const std::vector<double>& eps_targets = {}) {
    BoundsReport r{a, T, cutoff_bound(a, T), erfc_bound(a, T), {}};
    for (double e : eps_targets) r.min_T_for[e] = min_T(a, e);
    return r;
}

}  // namespace qaef
