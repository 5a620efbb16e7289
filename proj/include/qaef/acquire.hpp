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
 * Acquisition of the windowed signal f(t) = exp(-a^2 t^2) g(t), t in [-T, T],
 * where g(t) is either the overlap <psi0|A^{mt}|psi0> (exact, or estimated
 * with a Hadamard test on one ancilla) or the return probability
 * |<psi0|A^{mt}|psi0>|^2 measured without an ancilla.
 *
 * Noiseless series are evolved incrementally: the state for t+1 is the
 * state for t followed by A^m, so a whole series costs m*T applications of
 * A per direction. Sampling at time t draws from its own stream
 * derive_seed(seed, t), which makes the result independent of the order in
 * which samples are evaluated.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qaef/grover.hpp"
#include "qaef/noise.hpp"
#include "qaef/random.hpp"
#include "qaef/statevec.hpp"

namespace qaef {

enum class AcquisitionMode { exact_overlap, hadamard_test, direct_probability };
enum class InitialStateMode { psi_default, psi_perp_exact, y_minus_exact };

inline std::string_view to_string(AcquisitionMode m) {
    switch (m) {
        case AcquisitionMode::exact_overlap: return "exact_overlap";
        case AcquisitionMode::hadamard_test: return "hadamard_test";
        case AcquisitionMode::direct_probability: return "direct_probability";
    }
    throw std::invalid_argument("unknown acquisition mode");
}

inline std::string_view to_string(InitialStateMode m) {
    switch (m) {
        case InitialStateMode::psi_default: return "psi_default";
        case InitialStateMode::psi_perp_exact: return "psi_perp_exact";
        case InitialStateMode::y_minus_exact: return "y_minus_exact";
    }
    throw std::invalid_argument("unknown initial-state mode");
}

inline AcquisitionMode parse_acquisition_mode(std::string_view s) {
    if (s == "exact_overlap" || s == "exact") return AcquisitionMode::exact_overlap;
    if (s == "hadamard_test" || s == "hadamard") return AcquisitionMode::hadamard_test;
    if (s == "direct_probability" || s == "probability") return AcquisitionMode::direct_probability;
    throw std::invalid_argument("unknown acquisition mode: " + std::string(s));
}

inline InitialStateMode parse_initial_state_mode(std::string_view s) {
    if (s == "psi_default" || s == "psi") return InitialStateMode::psi_default;
    if (s == "psi_perp_exact" || s == "psi_perp") return InitialStateMode::psi_perp_exact;
    if (s == "y_minus_exact" || s == "y_minus") return InitialStateMode::y_minus_exact;
    throw std::invalid_argument("unknown initial-state mode: " + std::string(s));
}

/// Gaussian window p(t) = exp(-a^2 t^2), 0 < a < 1.
struct WindowParams {
    double a = 1.0 / (20.0 * std::sqrt(2.0));

    [[nodiscard]] double weight(long t) const {
        const double at = a * static_cast<double>(t);
        return std::exp(-at * at);
    }
    void validate() const {
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("window: a must lie in (0, 1)");
    }
};

struct AcquisitionConfig {
    AcquisitionMode mode = AcquisitionMode::exact_overlap;
    /// Magnification; negative values use powers of A^dagger.
    int m = 1;
    int T = 60;
    WindowParams window;
    /// Shots per measured circuit. Each of the real- and imaginary-part
    /// Hadamard circuits receives n_shot shots. 0 means exact expectations.
    int n_shot = 0;
    std::optional<std::uint64_t> seed;
    InitialStateMode initial = InitialStateMode::psi_default;
    std::optional<NoiseConfig> noise;
    /// Hadamard test only, with y_minus: keep the measured imaginary part's
    /// sign but take its magnitude from sqrt(1 - alpha^2).
    bool infer_imaginary = false;

    [[nodiscard]] bool overlap_mode() const { return mode != AcquisitionMode::direct_probability; }
    [[nodiscard]] bool sampled() const { return n_shot > 0 && mode != AcquisitionMode::exact_overlap; }
    [[nodiscard]] bool noisy() const { return noise.has_value() && noise->epsilon > 0.0; }

    void validate(int max_power = DEFAULT_MAX_POWER) const {
        window.validate();
        if (T < 1) throw std::invalid_argument("acquisition: T must be >= 1");
        if (n_shot < 0) throw std::invalid_argument("acquisition: n_shot must be >= 0");
        if (mode == AcquisitionMode::exact_overlap && n_shot > 0)
            throw std::invalid_argument("acquisition: exact_overlap mode takes no shots");
        if (sampled() && !seed) throw std::invalid_argument("acquisition: sampled modes require a seed");
        if (mode == AcquisitionMode::direct_probability && initial == InitialStateMode::y_minus_exact)
            throw std::invalid_argument("acquisition: direct_probability needs psi_default or psi_perp_exact");
        if (infer_imaginary &&
            (mode != AcquisitionMode::hadamard_test || initial != InitialStateMode::y_minus_exact))
            throw std::invalid_argument("acquisition: infer_imaginary needs hadamard_test with y_minus_exact");
        if (noise) {
            noise->validate();
            if (mode == AcquisitionMode::exact_overlap && noise->epsilon > 0.0)
                throw std::invalid_argument("acquisition: noisy overlaps need the hadamard_test mode");
        }
        if (static_cast<long>(std::abs(m)) * T > max_power)
            throw std::out_of_range("acquisition: m*T exceeds the amplifier power cap");
    }
};

struct SignalSample {
    long t = 0;
    cplx raw;       ///< overlap alpha + i beta, or a probability in [0, 1]
    cplx windowed;  ///< raw * exp(-a^2 t^2)
};

struct SignalSeries {
    AcquisitionConfig config;
    std::vector<SignalSample> samples;  ///< ascending t

    [[nodiscard]] long T() const { return samples.empty() ? 0 : samples.back().t; }
    [[nodiscard]] const SignalSample& at(long t) const {
        for (const auto& s : samples)
            if (s.t == t) return s;
        throw std::out_of_range("SignalSeries: no sample at t = " + std::to_string(t));
    }
};

/// Initial state for an acquisition, with its preparation circuit when one
/// exists (psi_default); the other modes are simulator-only.
struct InitialState {
    Ket ket;
    std::optional<StatePrep> prep;
};

inline InitialState resolve_initial_state(const Amplifier& a, InitialStateMode mode) {
    switch (mode) {
        case InitialStateMode::psi_default: return {a.r_psi.prep.state(), a.r_psi.prep};
        case InitialStateMode::psi_perp_exact: return {subspace_basis(a).psi_perp, std::nullopt};
        case InitialStateMode::y_minus_exact: return {subspace_basis(a).y_minus, std::nullopt};
    }
    throw std::invalid_argument("unknown initial-state mode");
}

namespace detail {

/// |+>_ancilla (x) |s>, ancilla on the new top qubit.
inline Ket with_plus_ancilla(const Ket& s) {
    std::vector<cplx> amps(2 * s.dim());
    const double r = 1.0 / std::numbers::sqrt2;
    for (std::size_t i = 0; i < s.dim(); ++i) {
        amps[i] = r * s[i];
        amps[i + s.dim()] = r * s[i];
    }
    return Ket::from_amplitudes(std::move(amps));
}

/// P(ancilla = 0) for the real-part (H) and imaginary-part (S^dagger, H)
/// Hadamard-test readouts of an (n+1)-qubit state.
inline std::pair<double, double> hadamard_zero_probabilities(const Ket& ext) {
    const int anc = ext.n_qubits() - 1;
    Ket re = ext;
    re.apply_unchecked(single(gates::h(), anc));
    Ket im = ext;
    im.apply_unchecked(single(gates::sdg(), anc));
    im.apply_unchecked(single(gates::h(), anc));
    return {re.marginal_probability(anc, 0), im.marginal_probability(anc, 0)};
}

inline cplx sample_overlap(double p0_re, double p0_im, int shots, Rng& rng, bool infer_imaginary) {
    const double n = static_cast<double>(shots);
    const double alpha = 2.0 * static_cast<double>(binomial(rng, shots, p0_re)) / n - 1.0;
    double beta = 2.0 * static_cast<double>(binomial(rng, shots, p0_im)) / n - 1.0;
    if (infer_imaginary) beta = std::copysign(std::sqrt(std::max(0.0, 1.0 - alpha * alpha)), beta);
    return {alpha, beta};
}

inline void advance(Ket& s, const Circuit& step, int reps) {
    for (int i = 0; i < reps; ++i) s = apply_circuit(std::move(s), step);
}

}  // namespace detail

/// Hadamard-test estimate alpha_hat + i beta_hat of <init|A^power|init>; each
/// part uses `shots` measurements of the ancilla.
inline cplx hadamard_test_overlap(const Amplifier& a, const Ket& init, long power, int shots, std::uint64_t seed,
                                  bool infer_imaginary = false) {
    if (shots < 1) throw std::invalid_argument("hadamard_test_overlap: shots must be >= 1");
    check_power(a, power);
    Ket ext = detail::with_plus_ancilla(init);
    detail::advance(ext, power >= 0 ? a.controlled_step : a.controlled_step_inverse,
                    static_cast<int>(std::labs(power)));
    const auto [p_re, p_im] = detail::hadamard_zero_probabilities(ext);
    Rng rng(seed);
    return detail::sample_overlap(p_re, p_im, shots, rng, infer_imaginary);
}

inline cplx hadamard_test_overlap(const Amplifier& a, const StatePrep& prep, long power, int shots,
                                  std::uint64_t seed, bool infer_imaginary = false) {
    return hadamard_test_overlap(a, prep.state(), power, shots, seed, infer_imaginary);
}

/// Applies A^power to U|0>, then U^dagger, measures every qubit and returns
/// the fraction of all-zero outcomes.
inline double direct_return_probability(const Amplifier& a, const StatePrep& prep, long power, int shots,
                                        std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("direct_return_probability: shots must be >= 1");
    Ket s = apply_power(a, prep.state(), power);
    s = apply_circuit(std::move(s), adjoint(prep.circuit));
    std::int64_t zeros = 0;
    for (std::uint64_t idx : sample_indices(s, shots, seed)) zeros += idx == 0 ? 1 : 0;
    return static_cast<double>(zeros) / shots;
}

/// Projective variant for initial states without a preparation circuit.
inline double direct_return_probability(const Amplifier& a, const Ket& init, long power, int shots,
                                        std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("direct_return_probability: shots must be >= 1");
    const double p = std::norm(inner(init, apply_power(a, init, power)));
    Rng rng(seed);
    return static_cast<double>(binomial(rng, shots, p)) / shots;
}

/// Fills t < 0 from t >= 0: complex conjugate for overlaps, copy for
/// probabilities. The input must hold exactly t = 0..T.
inline SignalSeries symmetrize(const SignalSeries& half) {
    if (half.samples.empty() || half.samples.front().t != 0)
        throw std::invalid_argument("symmetrize: series must start at t = 0");
    for (std::size_t i = 0; i < half.samples.size(); ++i)
        if (half.samples[i].t != static_cast<long>(i)) throw std::invalid_argument("symmetrize: series has gaps");
    const bool conj = half.config.overlap_mode();
    SignalSeries out{half.config, {}};
    const long T = half.T();
    out.samples.reserve(static_cast<std::size_t>(2 * T + 1));
    for (long t = -T; t <= T; ++t) {
        const SignalSample& src = half.samples[static_cast<std::size_t>(std::labs(t))];
        cplx raw = src.raw;
        if (t < 0 && conj) raw = std::conj(raw);
        out.samples.push_back({t, raw, raw * half.config.window.weight(t)});
    }
    return out;
}

/// Per-trajectory raw signals for t = 0..T under gate noise; noisy[j][t].
struct TrajectorySignals {
    std::vector<std::vector<cplx>> raw;
};

/// Runs cfg.noise->trajectories noisy trajectories. Each trajectory evolves
/// one noisy realisation through all t (A^{m} increments) and records the
/// exact readout expectation at every t, so every per-t average is an
/// unbiased estimate of the noisy signal at that t.
inline TrajectorySignals acquire_noisy_trajectories(const Amplifier& a, const AcquisitionConfig& cfg) {
    cfg.validate(a.max_power);
    if (!cfg.noise) throw std::invalid_argument("acquire_noisy_trajectories: no noise configured");
    const NoiseConfig& noise = *cfg.noise;
    const InitialState init = resolve_initial_state(a, cfg.initial);
    const int n = a.n_qubits();
    const int reps = std::abs(cfg.m);
    const bool hadamard = cfg.overlap_mode();

    const Circuit step = decompose(hadamard ? (cfg.m >= 0 ? a.controlled_step : a.controlled_step_inverse)
                                            : (cfg.m >= 0 ? a.step : a.step_inverse));
    std::optional<Circuit> prep_noisy, unprep_noisy;
    if (init.prep) {
        Circuit p(hadamard ? n + 1 : n);
        p.append(init.prep->circuit);
        prep_noisy = decompose(p);
        if (!hadamard) unprep_noisy = decompose(adjoint(init.prep->circuit));
    }

    TrajectorySignals out;
    out.raw.assign(static_cast<std::size_t>(noise.trajectories),
                   std::vector<cplx>(static_cast<std::size_t>(cfg.T + 1)));
    for (int j = 0; j < noise.trajectories; ++j) {
        Rng rng(derive_seed(noise.seed, j));
        Ket s = hadamard ? (init.prep ? detail::with_plus_ancilla(Ket(n)) : detail::with_plus_ancilla(init.ket))
                         : (init.prep ? Ket(n) : init.ket);
        if (prep_noisy) {
            for (const Gate& g : prep_noisy->ops) apply_noisy_gate(s, g, noise.epsilon, rng);
        }
        for (int t = 0; t <= cfg.T; ++t) {
            if (t > 0)
                for (int r = 0; r < reps; ++r)
                    for (const Gate& g : step.ops) apply_noisy_gate(s, g, noise.epsilon, rng);
            cplx value;
            if (hadamard) {
                const auto [p_re, p_im] = detail::hadamard_zero_probabilities(s);
                value = {2.0 * p_re - 1.0, 2.0 * p_im - 1.0};
            } else if (unprep_noisy) {
                Ket back = s;
                for (const Gate& g : unprep_noisy->ops) apply_noisy_gate(back, g, noise.epsilon, rng);
                value = std::norm(back[0]);
            } else {
                value = std::norm(inner(init.ket, s));
            }
            out.raw[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)] = value;
        }
    }
    return out;
}

namespace detail {

inline cplx compensated_mean(const std::vector<std::vector<cplx>>& rows, std::size_t col) {
    // Neumaier summation, separately on real and imaginary parts.
    double s_re = 0, c_re = 0, s_im = 0, c_im = 0;
    auto add = [](double& s, double& c, double v) {
        const double t = s + v;
        c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
        s = t;
    };
    for (const auto& r : rows) {
        add(s_re, c_re, r[col].real());
        add(s_im, c_im, r[col].imag());
    }
    const double n = static_cast<double>(rows.size());
    return {(s_re + c_re) / n, (s_im + c_im) / n};
}

}  // namespace detail

/// Trajectory average per t, shot-sampled when cfg is sampled, symmetrized
/// to t in [-T, T].
inline SignalSeries average_trajectories(const AcquisitionConfig& cfg, const TrajectorySignals& traj) {
    using detail::compensated_mean;
    using detail::sample_overlap;
    SignalSeries half{cfg, {}};
    for (int t = 0; t <= cfg.T; ++t) {
        cplx raw = compensated_mean(traj.raw, static_cast<std::size_t>(t));
        if (cfg.sampled()) {
            Rng rng(derive_seed(*cfg.seed, t));
            if (cfg.overlap_mode()) {
                raw = sample_overlap((1.0 + raw.real()) / 2.0, (1.0 + raw.imag()) / 2.0, cfg.n_shot, rng,
                                     cfg.infer_imaginary);
            } else {
                raw = static_cast<double>(binomial(rng, cfg.n_shot, raw.real())) / cfg.n_shot;
            }
        }
        half.samples.push_back({t, raw, raw * cfg.window.weight(t)});
    }
    return symmetrize(half);
}

/// One sample per integer t in [-T, T]. Noiseless negative times are
/// acquired with A^dagger, not by symmetry; noisy series are acquired for
/// t >= 0 and symmetrized.
inline SignalSeries acquire_series(const Amplifier& a, const AcquisitionConfig& cfg) {
    cfg.validate(a.max_power);
    if (a.degenerate && cfg.initial != InitialStateMode::psi_default)
        throw degenerate_subspace("acquire_series: theta = 0 leaves no rotation plane");
    if (cfg.noisy()) return average_trajectories(cfg, acquire_noisy_trajectories(a, cfg));

    const InitialState init = resolve_initial_state(a, cfg.initial);
    const long T = cfg.T;
    const int reps = std::abs(cfg.m);
    SignalSeries series{cfg, std::vector<SignalSample>(static_cast<std::size_t>(2 * T + 1))};
    auto record = [&](long t, cplx raw) {
        series.samples[static_cast<std::size_t>(t + T)] = {t, raw, raw * cfg.window.weight(t)};
    };
    record(0, 1.0);

    for (int dir : {+1, -1}) {
        const bool forward = (dir > 0) == (cfg.m >= 0);
        if (cfg.mode == AcquisitionMode::hadamard_test) {
            const Circuit& step = forward ? a.controlled_step : a.controlled_step_inverse;
            Ket ext = detail::with_plus_ancilla(init.ket);
            for (long k = 1; k <= T; ++k) {
                detail::advance(ext, step, reps);
                const auto [p_re, p_im] = detail::hadamard_zero_probabilities(ext);
                const long t = dir * k;
                if (cfg.sampled()) {
                    Rng rng(derive_seed(*cfg.seed, t));
                    record(t, detail::sample_overlap(p_re, p_im, cfg.n_shot, rng, cfg.infer_imaginary));
                } else {
                    record(t, {2.0 * p_re - 1.0, 2.0 * p_im - 1.0});
                }
            }
            continue;
        }
        const Circuit& step = forward ? a.step : a.step_inverse;
        Ket s = init.ket;
        for (long k = 1; k <= T; ++k) {
            detail::advance(s, step, reps);
            const long t = dir * k;
            const cplx overlap = inner(init.ket, s);
            if (cfg.mode == AcquisitionMode::exact_overlap) {
                record(t, overlap);
            } else if (!cfg.sampled()) {
                record(t, std::norm(overlap));
            } else if (init.prep) {
                const Ket back = apply_circuit(s, adjoint(init.prep->circuit));
                std::int64_t zeros = 0;
                for (std::uint64_t idx : sample_indices(back, cfg.n_shot, derive_seed(*cfg.seed, t)))
                    zeros += idx == 0 ? 1 : 0;
                record(t, static_cast<double>(zeros) / cfg.n_shot);
            } else {
                Rng rng(derive_seed(*cfg.seed, t));
                record(t, static_cast<double>(binomial(rng, cfg.n_shot, std::norm(overlap))) / cfg.n_shot);
            }
        }
    }
    return series;
}

}  // namespace qaef
