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
 * Windowed Fourier sum S(x) = sum_{t=-T}^{T} f(t) exp(i x t), its closed
 * forms, peak location and angle extraction.
 *
 * Because t is an integer, S(x + 2 pi) = S(x). Peak positions are always
 * reported in [0, 2 pi); recovering theta from a magnification m > 1
 * therefore needs an unwrap, done by ladder_refine() over increasing m.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qaef/acquire.hpp"
#include "qaef/grover.hpp"

namespace qaef {

inline constexpr double TWO_PI = 2.0 * std::numbers::pi;

/// x mapped into [0, 2 pi).
inline double wrap_2pi(double x) {
    double w = std::fmod(x, TWO_PI);
    if (w < 0.0) w += TWO_PI;
    if (w >= TWO_PI) w -= TWO_PI;
    return w;
}

/// Distance between two angles on the circle.
inline double circular_distance(double x, double y) {
    const double d = wrap_2pi(x - y);
    return std::min(d, TWO_PI - d);
}

/// Uniform x grid, both ends included.
struct GridSpec {
    double x_min = 0.0;
    double x_max = 0.0;
    double step = 1e-3;

    /// `points` samples covering [0, 2 pi) with the last point one step
    /// short of 2 pi, so neighbours wrap around exactly.
    static GridSpec periodic(std::size_t points = 6283) {
        const double step = TWO_PI / static_cast<double>(points);
        return {0.0, step * static_cast<double>(points - 1), step};
    }

    [[nodiscard]] std::size_t size() const {
        return static_cast<std::size_t>(std::floor((x_max - x_min) / step + 1e-9)) + 1;
    }
    [[nodiscard]] double x(std::size_t i) const { return x_min + static_cast<double>(i) * step; }
    [[nodiscard]] bool is_periodic() const {
        return std::abs(static_cast<double>(size()) * step - TWO_PI) < 1e-9;
    }
    void validate() const {
        if (!(step > 0.0)) throw std::invalid_argument("grid: step must be positive");
        if (!(x_max >= x_min)) throw std::invalid_argument("grid: x_max < x_min");
    }
};

struct SpectrumPoint {
    double x;
    double s_re;
    double s_im;
};

struct SpectrumGrid {
    GridSpec grid;
    std::vector<SpectrumPoint> values;
    // Provenance, used to interpret peaks.
    int m = 1;
    AcquisitionMode mode = AcquisitionMode::exact_overlap;
    double a = 0.0;
    long T = 0;
    /// Peaks come in +-c pairs (every initial state except y_minus).
    bool mirror_pair = true;

    [[nodiscard]] bool probability() const { return mode == AcquisitionMode::direct_probability; }
};

/// Direct summation at every grid point, t in ascending order.
inline SpectrumGrid compute_spectrum(const SignalSeries& series, const GridSpec& grid) {
    grid.validate();
    if (series.samples.empty()) throw std::invalid_argument("compute_spectrum: empty series");
    SpectrumGrid out;
    out.grid = grid;
    out.m = series.config.m;
    out.mode = series.config.mode;
    out.a = series.config.window.a;
    out.T = series.T();
    out.mirror_pair = series.config.mode == AcquisitionMode::direct_probability ||
                      series.config.initial != InitialStateMode::y_minus_exact;
    const std::size_t n = grid.size();
    out.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x(i);
        cplx s{0.0};
        for (const SignalSample& smp : series.samples) s += smp.windowed * std::polar(1.0, x * static_cast<double>(smp.t));
        out.values.push_back({x, s.real(), s.imag()});
    }
    return out;
}

namespace detail {

inline double gauss(double y, double a) { return std::exp(-y * y / (4.0 * a * a)); }

/// sum_k g(x + 2 pi k) over every image that is not negligible.
template <class F>
double periodize(F&& g, double x, double reach) {
    const int kmax = static_cast<int>(std::ceil((std::abs(x) + reach) / TWO_PI)) + 1;
    double s = 0.0;
    for (int k = -kmax; k <= kmax; ++k) s += g(x + TWO_PI * k);
    return s;
}

}  // namespace detail

/// (sqrt(pi)/2a) [G(x + 2 m theta) + G(x - 2 m theta)], G(y) = exp(-y^2/4a^2).
/// Infinite-range sum for an initial state with equal weight on y_+ and y_-.
inline double analytic_spectrum_overlap(double theta, int m, double a, double x) {
    const double c = 2.0 * m * theta;
    return std::sqrt(std::numbers::pi) / (2.0 * a) * (detail::gauss(x + c, a) + detail::gauss(x - c, a));
}

/// (sqrt(pi)/4a) [G(x + 4 m theta) + G(x - 4 m theta) + 2 G(x)]: return
/// probability signal, which adds a theta-independent peak at x = 0.
inline double analytic_spectrum_probability(double theta, int m, double a, double x) {
    const double c = 4.0 * m * theta;
    return std::sqrt(std::numbers::pi) / (4.0 * a) *
           (detail::gauss(x + c, a) + detail::gauss(x - c, a) + 2.0 * detail::gauss(x, a));
}

/// (sqrt(pi)/a) G(x - 2 m theta): overlap signal started from y_-.
inline double analytic_spectrum_y_minus(double theta, int m, double a, double x) {
    return std::sqrt(std::numbers::pi) / a * detail::gauss(x - 2.0 * m * theta, a);
}

/// 2 pi-periodic versions: sums over every image x + 2 pi k. These equal the
/// infinite-range sum over integer t exactly (Poisson summation), so they
/// are what a computed S(x) on [0, 2 pi) is compared against.
inline double periodic_spectrum_overlap(double theta, int m, double a, double x) {
    return detail::periodize([&](double y) { return analytic_spectrum_overlap(theta, m, a, y); }, x,
                             std::abs(2.0 * m * theta) + 40.0 * a);
}
inline double periodic_spectrum_probability(double theta, int m, double a, double x) {
    return detail::periodize([&](double y) { return analytic_spectrum_probability(theta, m, a, y); }, x,
                             std::abs(4.0 * m * theta) + 40.0 * a);
}
inline double periodic_spectrum_y_minus(double theta, int m, double a, double x) {
    return detail::periodize([&](double y) { return analytic_spectrum_y_minus(theta, m, a, y); }, x,
                             std::abs(2.0 * m * theta) + 40.0 * a);
}

/// Every theta in [0, theta_max] whose peak (or mirror peak, if `mirror`)
/// lands at x modulo 2 pi: theta = (+-x + 2 pi k) / (factor m).
inline std::vector<double> theta_candidates(double x, int m, bool probability, bool mirror, double theta_max) {
    if (m == 0) throw std::invalid_argument("theta_candidates: m = 0 carries no angle");
    const double scale = (probability ? 4.0 : 2.0) * m;
    const double lo = std::min(0.0, scale * theta_max), hi = std::max(0.0, scale * theta_max);
    const double tol = 1e-12;
    std::vector<double> out;
    for (double sign : {1.0, -1.0}) {
        if (sign < 0 && !mirror) break;
        const double base = sign * x;
        const long kmin = static_cast<long>(std::floor((lo - base) / TWO_PI)) - 1;
        const long kmax = static_cast<long>(std::ceil((hi - base) / TWO_PI)) + 1;
        for (long k = kmin; k <= kmax; ++k) {
            const double theta = (base + TWO_PI * static_cast<double>(k)) / scale;
            if (theta >= -tol && theta <= theta_max + tol) out.push_back(std::clamp(theta, 0.0, theta_max));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              out.end());
    return out;
}

struct PeakEstimate {
    double x_peak = 0.0;  ///< in [0, 2 pi)
    double height = 0.0;
    double theta_hat = 0.0;  ///< x_peak / (2m) or x_peak / (4m), first branch only
    int m_used = 1;
    double half_width = 0.0;  ///< half width at half maximum from the local curvature
    /// x_peak / (2m) (or / (4m)) is not the only angle in [0, pi/2] with a
    /// peak at x_peak modulo 2 pi: theta needs an unwrap from ladder data.
    bool aliased = false;
};

class no_peak_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ambiguous_unwrap : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ladder_inconsistent : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double median(std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), v.end());
    const double hi = v[n / 2];
    if (n % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2));
    return (lo + hi) / 2.0;
}

}  // namespace detail

/// Threshold a local maximum of Re S must exceed: median + 5 MAD, capped at
/// half of the way from the median to the maximum so that broad peaks
/// (small T) that dominate the whole grid are still found.
inline double noise_floor(std::span<const SpectrumPoint> values) {
    std::vector<double> v;
    v.reserve(values.size());
    for (const auto& p : values) v.push_back(p.s_re);
    const double med = detail::median(v);
    std::vector<double> dev;
    dev.reserve(v.size());
    for (double x : v) dev.push_back(std::abs(x - med));
    const double mad = detail::median(dev);
    const double vmax = *std::max_element(v.begin(), v.end());
    return std::min(med + 5.0 * mad, med + 0.5 * (vmax - med));
}

/// Local maxima of Re S above noise_floor(), refined by a parabola through
/// the three samples around each maximum, strongest first. With
/// `exclude_zero`, peaks within 3a of x = 0 (the theta-free peak of return
/// probability signals) are dropped. Throws no_peak_error if nothing is left.
inline std::vector<PeakEstimate> find_peaks(const SpectrumGrid& spec, bool exclude_zero) {
    const auto& v = spec.values;
    const std::size_t n = v.size();
    if (n < 3) throw std::invalid_argument("find_peaks: grid needs at least 3 points");
    const double floor = noise_floor(v);
    const bool periodic = spec.grid.is_periodic();
    const double step = spec.grid.step;
    const double factor = spec.probability() ? 4.0 : 2.0;

    std::vector<PeakEstimate> peaks;
    for (std::size_t i = 0; i < n; ++i) {
        if (!periodic && (i == 0 || i + 1 == n)) continue;
        const std::size_t l = i == 0 ? n - 1 : i - 1;
        const std::size_t r = i + 1 == n ? 0 : i + 1;
        const double yl = v[l].s_re, y0 = v[i].s_re, yr = v[r].s_re;
        if (!(y0 > yl && y0 >= yr && y0 > floor)) continue;

        const double curv = yl - 2.0 * y0 + yr;
        const double delta = curv < 0.0 ? 0.5 * (yl - yr) / curv : 0.0;
        PeakEstimate p;
        p.x_peak = wrap_2pi(spec.grid.x(i) + delta * step);
        p.height = y0 - 0.25 * (yl - yr) * delta;
        if (exclude_zero && circular_distance(p.x_peak, 0.0) < 3.0 * spec.a) continue;
        p.m_used = spec.m;
        p.theta_hat = spec.m != 0 ? p.x_peak / (factor * std::abs(spec.m)) : 0.0;
        if (spec.m != 0) {
            const auto cands = theta_candidates(p.x_peak, spec.m, spec.probability(), spec.mirror_pair,
                                                std::numbers::pi / 2);
            p.aliased = cands.size() != 1 || std::abs(cands.front() - p.theta_hat) > 1e-12;
        }
        const double second = curv / (step * step);
        p.half_width = second < 0.0 ? std::sqrt(-p.height / second) * std::sqrt(2.0 * std::log(2.0)) : step;
        peaks.push_back(p);
    }
    if (peaks.empty()) throw no_peak_error("no peak above floor");
    std::stable_sort(peaks.begin(), peaks.end(),
                     [](const PeakEstimate& a, const PeakEstimate& b) { return a.height > b.height; });
    return peaks;
}

struct ThetaInterval {
    double lo = 0.0;
    double hi = 0.0;
    [[nodiscard]] double center() const { return (lo + hi) / 2.0; }
    [[nodiscard]] double half_width() const { return (hi - lo) / 2.0; }
};

struct ExtractOptions {
    bool mirror = true;
    std::optional<ThetaInterval> prior;
    double theta_max = std::numbers::pi / 2;
};

/// theta from the strongest peak: x/(2m) for overlap spectra, x/(4m) for
/// return-probability spectra, unwrapped modulo 2 pi. Without a prior the
/// unwrap must be unique, otherwise ambiguous_unwrap is thrown.
inline double extract_theta(std::span<const PeakEstimate> peaks, int m, bool probability,
                            const ExtractOptions& opt = {}) {
    if (peaks.empty()) throw std::invalid_argument("extract_theta: no peaks");
    const double x = peaks.front().x_peak;
    const auto cands = theta_candidates(x, m, probability, opt.mirror, opt.theta_max);
    if (cands.empty()) throw ambiguous_unwrap("extract_theta: no branch inside the principal range");
    if (opt.prior) {
        const double c = opt.prior->center();
        const auto best = *std::min_element(cands.begin(), cands.end(), [c](double a, double b) {
            return std::abs(a - c) < std::abs(b - c);
        });
        if (best < opt.prior->lo || best > opt.prior->hi)
            throw ambiguous_unwrap("extract_theta: no branch inside the prior interval");
        return best;
    }
    if (cands.size() > 1) throw ambiguous_unwrap("extract_theta: unwrap is ambiguous without ladder data");
    return cands.front();
}

namespace detail {

/// K(y) = sum_{t=-T}^{T} exp(-a^2 t^2) cos(y t): the spectrum of a single
/// unit-weight tone at the origin.
inline double window_kernel(double y, double a, long T) {
    double s = 1.0;
    for (long t = 1; t <= T; ++t) {
        const double at = a * static_cast<double>(t);
        s += 2.0 * std::exp(-at * at) * std::cos(y * static_cast<double>(t));
    }
    return s;
}

}  // namespace detail

/// Refines a peak that sits close to a symmetry point (0 or pi) of a
/// mirrored spectrum, where the +c and -c peaks overlap and a plain argmax
/// is pulled towards the symmetry point. Fits
///     Re S(x) ~ A [K(x - s - d) + K(x - s + d)]  (+ B K(x - s) at s = 0 for
///     return-probability spectra)
/// by least squares over d and returns s + d on the side of `x_peak`.
/// Peaks farther than 3 sqrt(2) a from 0 and pi are returned unchanged.
inline double refine_mirrored_peak(const SpectrumGrid& spec, double x_peak) {
    if (!spec.mirror_pair || !spec.grid.is_periodic()) return x_peak;
    const double sigma = std::sqrt(2.0) * spec.a;
    const double zone = 3.0 * sigma;
    const double s = circular_distance(x_peak, 0.0) <= circular_distance(x_peak, std::numbers::pi)
                         ? 0.0
                         : std::numbers::pi;
    if (circular_distance(x_peak, s) > zone) return x_peak;
    const bool central = spec.probability() && s == 0.0;

    const double step = spec.grid.step;
    const std::size_t n = spec.values.size();
    const long half_window = static_cast<long>(std::ceil((2.0 * zone + 5.0 * sigma) / step));
    const long J = static_cast<long>(std::ceil(2.0 * zone / step));
    const long i_center = static_cast<long>(std::lround(s / step));
    const long i_lo = i_center - half_window;
    const long W = 2 * half_window + 1;
    // Offset of the first window point from s; successive points add `step`.
    const double delta0 = spec.grid.x(0) + static_cast<double>(i_lo) * step - s;

    std::vector<double> y(static_cast<std::size_t>(W));
    for (long k = 0; k < W; ++k) {
        long idx = (i_lo + k) % static_cast<long>(n);
        if (idx < 0) idx += static_cast<long>(n);
        y[static_cast<std::size_t>(k)] = spec.values[static_cast<std::size_t>(idx)].s_re;
    }
    // Kernel on the lattice delta0 + l * step, l in [-J, W - 1 + J].
    std::vector<double> kern(static_cast<std::size_t>(W + 2 * J));
    for (long l = -J; l < W + J; ++l)
        kern[static_cast<std::size_t>(l + J)] =
            detail::window_kernel(delta0 + static_cast<double>(l) * step, spec.a, spec.T);
    auto K = [&](long l) { return kern[static_cast<std::size_t>(l + J)]; };

    std::vector<double> residual(static_cast<std::size_t>(J + 1));
    for (long j = 0; j <= J; ++j) {
        double g11 = 0, g12 = 0, g22 = 0, b1 = 0, b2 = 0, yy = 0;
        for (long k = 0; k < W; ++k) {
            const double g1 = K(k - j) + K(k + j);
            const double g2 = central ? K(k) : 0.0;
            const double v = y[static_cast<std::size_t>(k)];
            g11 += g1 * g1;
            g12 += g1 * g2;
            g22 += g2 * g2;
            b1 += g1 * v;
            b2 += g2 * v;
            yy += v * v;
        }
        double r;
        if (central) {
            const double det = g11 * g22 - g12 * g12;
            if (std::abs(det) < 1e-12 * g11 * g22) {
                r = yy - (b1 + b2) * (b1 + b2) / (g11 + 2 * g12 + g22);
            } else {
                const double A = (b1 * g22 - b2 * g12) / det;
                const double B = (b2 * g11 - b1 * g12) / det;
                r = yy - A * b1 - B * b2;
            }
        } else {
            r = yy - b1 * b1 / g11;
        }
        residual[static_cast<std::size_t>(j)] = r;
    }
    const auto best_it = std::min_element(residual.begin(), residual.end());
    const long jb = best_it - residual.begin();
    double d = static_cast<double>(jb);
    if (jb > 0 && jb < J) {
        const double rl = residual[static_cast<std::size_t>(jb - 1)], r0 = *best_it,
                     rr = residual[static_cast<std::size_t>(jb + 1)];
        const double curv = rl - 2.0 * r0 + rr;
        if (curv > 0.0) d += 0.5 * (rl - rr) / curv;
    }
    d *= step;
    const double side = wrap_2pi(x_peak - s) <= std::numbers::pi ? 1.0 : -1.0;
    return wrap_2pi(s + side * d);
}

struct LadderRung {
    int m = 1;
    double x_peak = 0.0;
    double theta = 0.0;
    double tolerance = 0.0;  ///< consistency half-width used for this rung
};

struct LadderResult {
    double theta = 0.0;
    double half_width = 0.0;  ///< grid_step / (2 m_max), or / (4 m_max) for probabilities
    /// Return-probability spectra cannot tell theta from pi/2 - theta; the
    /// second branch is reported here and theta is the one in [0, pi/4].
    std::optional<double> alternate;
    std::vector<LadderRung> rungs;
};

/// Acquires and analyses one spectrum per magnification in `schedule`
/// (which starts at m = 1, where theta is unambiguous up to the mirror
/// branch) and at each rung keeps the 2 pi branch consistent with the
/// previous estimate.
inline LadderResult ladder_refine(const Amplifier& amp, std::span<const int> schedule,
                                  const AcquisitionConfig& base, const GridSpec& grid = GridSpec::periodic(),
                                  double theta_max = std::numbers::pi / 2) {
    if (schedule.empty() || schedule.front() != 1) throw std::invalid_argument("ladder: schedule must start at m = 1");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i] <= schedule[i - 1]) throw std::invalid_argument("ladder: schedule must increase");
    const bool prob = base.mode == AcquisitionMode::direct_probability;
    const double factor = prob ? 4.0 : 2.0;

    // Each branch carries the sum of its squared normalised rung-to-rung
    // jumps; the best-scoring survivor wins.
    struct Branch {
        double theta;
        double score;
    };
    LadderResult result;
    std::vector<Branch> branches;
    double prev_tol = 0.0;
    for (int m : schedule) {
        AcquisitionConfig cfg = base;
        cfg.m = m;
        if (cfg.seed) cfg.seed = derive_seed(*base.seed, 1'000'000 + m);
        const SpectrumGrid spec = compute_spectrum(acquire_series(amp, cfg), grid);
        const auto peaks = find_peaks(spec, prob);
        const PeakEstimate& top = peaks.front();
        const double x = refine_mirrored_peak(spec, top.x_peak);
        const double tol_x = std::clamp(2.0 * top.half_width, 4.0 * grid.step, 1.0);
        const double tol = tol_x / (factor * m);
        const auto cands = theta_candidates(x, m, prob, spec.mirror_pair, theta_max);

        std::vector<Branch> next;
        if (branches.empty()) {
            for (double c : cands) next.push_back({c, 0.0});
        } else {
            // A mirror branch can sit within tolerance of the true one when
            // 2 m theta is close to 0 or pi; keep both until a later rung
            // separates them.
            for (const Branch& b : branches)
                for (double c : cands) {
                    const double z = (c - b.theta) / (prev_tol + tol);
                    if (std::abs(z) <= 1.0) next.push_back({c, b.score + z * z});
                }
        }
        std::sort(next.begin(), next.end(), [](const Branch& p, const Branch& q) { return p.theta < q.theta; });
        branches.clear();
        for (const Branch& b : next) {
            if (!branches.empty() && b.theta - branches.back().theta <= 1e-12) {
                branches.back().score = std::min(branches.back().score, b.score);
            } else {
                branches.push_back(b);
            }
        }
        if (branches.empty())
            throw ladder_inconsistent("ladder: no branch consistent with rung m = " + std::to_string(m));
        prev_tol = tol;
        const Branch& lead = *std::min_element(branches.begin(), branches.end(),
                                               [](const Branch& p, const Branch& q) { return p.score < q.score; });
        result.rungs.push_back({m, x, lead.theta, tol});
    }
    const int m_max = schedule.back();
    result.half_width = grid.step / (factor * m_max);
    const double best = result.rungs.back().theta;
    if (prob) {
        // theta and pi/2 - theta give identical spectra at every rung.
        result.theta = std::min(best, std::numbers::pi / 2 - best);
        if (std::abs(best - std::numbers::pi / 4) > result.half_width)
            result.alternate = std::numbers::pi / 2 - result.theta;
    } else {
        result.theta = best;
    }
    return result;
}

}  // namespace qaef
