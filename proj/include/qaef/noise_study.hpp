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

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qaef/acquire.hpp"
#include "qaef/noise.hpp"
#include "qaef/spectrum.hpp"

namespace qaef {

struct NoiseSummaryRow {
    double epsilon = 0.0;
    double x_peak = 0.0;
    double height = 0.0;
    /// Standard error of the height over trajectories; 0 for the noiseless row.
    double height_stderr = 0.0;
};

struct NoiseStudy {
    std::vector<SpectrumGrid> spectra;  ///< one per epsilon, same grid
    std::vector<NoiseSummaryRow> rows;
};

/// Re S_j(x) of one trajectory's half series f_j(t), t = 0..T, extended by
/// the same symmetry symmetrize() uses.
inline double trajectory_spectrum(const std::vector<cplx>& f, const WindowParams& w, double x) {
    double s = f[0].real();
    for (std::size_t t = 1; t < f.size(); ++t) {
        const double td = static_cast<double>(t);
        s += 2.0 * w.weight(static_cast<long>(t)) * (f[t] * std::polar(1.0, x * td)).real();
    }
    return s;
}

/// One spectrum per epsilon. Every noisy row reuses cfg.noise's seed and
/// trajectory count, so rows share their random streams. epsilon = 0 runs
/// the noiseless pipeline. A row whose spectrum has no peak above the floor
/// reports NaN for x_peak, height and height_stderr.
inline NoiseStudy noisy_spectrum_study(const Amplifier& amp, const AcquisitionConfig& cfg,
                                       const std::vector<double>& eps_list,
                                       const GridSpec& grid = GridSpec::periodic()) {
    if (eps_list.empty()) throw std::invalid_argument("noisy_spectrum_study: empty epsilon list");
    const NoiseConfig base = cfg.noise.value_or(NoiseConfig{});
    const bool prob = cfg.mode == AcquisitionMode::direct_probability;
    NoiseStudy out;
    std::optional<double> ref_x;
    for (double eps : eps_list) {
        AcquisitionConfig c = cfg;
        NoiseSummaryRow row{eps, 0.0, 0.0, 0.0};
        SpectrumGrid spec;
        std::optional<TrajectorySignals> traj;
        if (eps == 0.0) {
            c.noise.reset();
            spec = compute_spectrum(acquire_series(amp, c), grid);
        } else {
            c.noise = NoiseConfig{eps, base.trajectories, base.seed};
            traj = acquire_noisy_trajectories(amp, c);
            spec = compute_spectrum(average_trajectories(c, *traj), grid);
        }
        std::optional<PeakEstimate> top;
        try {
            const auto peaks = find_peaks(spec, prob);
            top = peaks.front();
            // Mirrored spectra have two equal peaks; follow the one seen first.
            if (ref_x)
                for (const auto& p : peaks)
                    if (p.height >= 0.5 * peaks.front().height &&
                        circular_distance(p.x_peak, *ref_x) < circular_distance(top->x_peak, *ref_x))
                        top = p;
            if (!ref_x) ref_x = top->x_peak;
        } catch (const no_peak_error&) {
            // The peak has dissolved into the background.
        }
        if (!top) {
            row.x_peak = row.height = row.height_stderr = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.x_peak = top->x_peak;
            row.height = top->height;
            if (traj && traj->raw.size() > 1) {
                double mean = 0.0, m2 = 0.0;
                long k = 0;
                for (const auto& f : traj->raw) {
                    const double v = trajectory_spectrum(f, c.window, top->x_peak);
                    ++k;
                    const double d = v - mean;
                    mean += d / static_cast<double>(k);
                    m2 += d * (v - mean);
                }
                row.height_stderr = std::sqrt(m2 / static_cast<double>(k - 1) / static_cast<double>(k));
            }
        }
        out.spectra.push_back(std::move(spec));
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace qaef
