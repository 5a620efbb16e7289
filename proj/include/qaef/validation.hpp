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
 * Reference implementations that share no code path with the simulator:
 * dense unitaries built from Kronecker products, and the oracle suite run by
 * `qaef validate`.
 */

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "qaef/acquire.hpp"
#include "qaef/bounds.hpp"
#include "qaef/grover.hpp"
#include "qaef/io.hpp"
#include "qaef/noise.hpp"
#include "qaef/spectrum.hpp"
#include "qaef/statevec.hpp"

namespace qaef::oracle {

/// Row-major dense complex matrix.
struct Dense {
    std::size_t dim = 0;
    std::vector<cplx> v;

    explicit Dense(std::size_t d = 0, bool identity = false) : dim(d), v(d * d) {
        if (identity)
            for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;
    }
    cplx& operator()(std::size_t r, std::size_t c) { return v[r * dim + c]; }
    cplx operator()(std::size_t r, std::size_t c) const { return v[r * dim + c]; }
};

inline Dense from_mat2(const Mat2& m) {
    Dense d(2);
    d(0, 0) = m.m00;
    d(0, 1) = m.m01;
    d(1, 0) = m.m10;
    d(1, 1) = m.m11;
    return d;
}

inline Dense kron(const Dense& a, const Dense& b) {
    Dense out(a.dim * b.dim);
    for (std::size_t i = 0; i < a.dim; ++i)
        for (std::size_t j = 0; j < a.dim; ++j)
            for (std::size_t k = 0; k < b.dim; ++k)
                for (std::size_t l = 0; l < b.dim; ++l) out(i * b.dim + k, j * b.dim + l) = a(i, j) * b(k, l);
    return out;
}

inline Dense matmul(const Dense& a, const Dense& b) {
    Dense out(a.dim);
    for (std::size_t i = 0; i < a.dim; ++i)
        for (std::size_t k = 0; k < a.dim; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{0.0}) continue;
            for (std::size_t j = 0; j < a.dim; ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

inline Dense operator+(Dense a, const Dense& b) {
    for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
    return a;
}
inline Dense operator-(Dense a, const Dense& b) {
    for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] -= b.v[i];
    return a;
}

/// M_{n-1} (x) ... (x) M_0, so qubit 0 is the least significant index bit.
inline Dense kron_chain(const std::vector<Dense>& per_qubit) {
    Dense out(1, true);
    for (auto it = per_qubit.rbegin(); it != per_qubit.rend(); ++it) out = kron(out, *it);
    return out;
}

/// (I - Pi) + Pi (x) U, Pi the projector onto all controls in |1>.
inline Dense gate_matrix(const Gate& g, int n) {
    const Dense id2(2, true);
    Dense p1(2);
    p1(1, 1) = 1.0;
    std::vector<Dense> proj(static_cast<std::size_t>(n), id2), act(static_cast<std::size_t>(n), id2);
    for (int c : g.controls) proj[static_cast<std::size_t>(c)] = act[static_cast<std::size_t>(c)] = p1;
    act[static_cast<std::size_t>(g.target)] = from_mat2(g.matrix);
    const Dense full_id(std::size_t{1} << n, true);
    return (full_id - kron_chain(proj)) + kron_chain(act);
}

inline Dense circuit_matrix(const Circuit& c) {
    Dense u(std::size_t{1} << c.n_qubits, true);
    for (const Gate& g : c.ops) u = matmul(gate_matrix(g, c.n_qubits), u);
    return u;
}

inline std::vector<cplx> dense_apply(const Dense& u, std::span<const cplx> x) {
    std::vector<cplx> y(u.dim);
    for (std::size_t i = 0; i < u.dim; ++i)
        for (std::size_t j = 0; j < u.dim; ++j) y[i] += u(i, j) * x[j];
    return y;
}

/// I - 2|s><s| from the amplitudes.
inline Dense reflection_matrix(const Ket& s) {
    Dense r(s.dim(), true);
    for (std::size_t i = 0; i < s.dim(); ++i)
        for (std::size_t j = 0; j < s.dim(); ++j) r(i, j) -= 2.0 * s[i] * std::conj(s[j]);
    return r;
}

inline double max_abs_diff(const Dense& a, const Dense& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) d = std::max(d, std::abs(a.v[i] - b.v[i]));
    return d;
}

/// sum_{t=-T}^{T} exp(-a^2 t^2) f(t) exp(i x t), summed outward from t = 0.
inline cplx partial_sum_spectrum(const std::function<cplx(long)>& f, double a, long T, double x) {
    cplx s = f(0);
    for (long t = 1; t <= T; ++t) {
        const double w = std::exp(-a * a * static_cast<double>(t * t));
        s += w * (f(t) * std::polar(1.0, x * t) + f(-t) * std::polar(1.0, -x * t));
    }
    return s;
}

/// Pair (U|0>, U Ry(2 theta)_0 |0>) with |<psi|phi>| = cos(theta), U a seeded
/// random circuit.
inline std::pair<StatePrep, StatePrep> theta_pair(int n, double theta, std::uint64_t seed, int depth = 8) {
    Rng rng(seed);
    const Circuit u = random_circuit(n, depth, rng);
    StatePrep psi{u, "U|0>"};
    StatePrep phi{Circuit(n), "U Ry|0>"};
    phi.circuit.ry(0, 2.0 * theta);
    phi.circuit.append(u);
    return {psi, phi};
}

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Oracle equivalence checks, each small enough to run in well under a second.
inline std::vector<CheckResult> run_validation_suite(std::uint64_t seed = 2026) {
    std::vector<CheckResult> out;
    Rng rng(seed);

    {  // simulator against Kronecker-built unitaries
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const int n = 1 + static_cast<int>(uniform_index(rng, 3));
            Circuit c = random_circuit(n, 3, rng);
            if (n == 3) c.add(mcx({0, 1}, 2)).add(controlled(gates::ry(0.7), {2}, 0));
            const Ket in = apply_circuit(Ket(n), random_circuit(n, 2, rng));
            const Ket got = apply_circuit(in, c);
            const auto want = dense_apply(circuit_matrix(c), in.amplitudes());
            for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
        }
        out.push_back({"statevector vs dense", worst <= 1e-10, "max |diff| = " + format_real(worst)});
    }
    {  // decomposition preserves the unitary
        Circuit c(4);
        c.add(mcz({0, 1, 2}, 3)).add(mcx({1, 3}, 0)).add(controlled(gates::rz(0.3), {0, 2, 3}, 1));
        const double d = max_abs_diff(circuit_matrix(c), circuit_matrix(decompose(c)));
        out.push_back({"two-qubit decomposition", d <= 1e-10, "max |diff| = " + format_real(d)});
    }
    {  // reflections and amplifier eigenvectors
        const auto [psi, phi] = theta_pair(3, 0.6, seed);
        const Amplifier amp = build_amplifier(psi, phi);
        const Dense r = circuit_matrix(amp.r_psi.circuit);
        double d = std::max(max_abs_diff(matmul(r, r), Dense(8, true)), max_abs_diff(r, reflection_matrix(psi.state())));
        const SubspaceBasis b = subspace_basis(amp);
        const Ket ap = apply_circuit(b.y_plus, amp.step), am = apply_circuit(b.y_minus, amp.step);
        for (std::size_t i = 0; i < 8; ++i) {
            d = std::max(d, std::abs(ap[i] - std::polar(1.0, 2 * b.theta) * b.y_plus[i]));
            d = std::max(d, std::abs(am[i] - std::polar(1.0, -2 * b.theta) * b.y_minus[i]));
        }
        out.push_back({"reflection and eigenphase", d <= 1e-8, "max |diff| = " + format_real(d)});
    }
    {  // T = 1 identity and closed form
        const double theta = 0.6, a = 1.0 / (20.0 * std::sqrt(2.0));
        const auto [psi, phi] = theta_pair(3, theta, seed + 1);
        const Amplifier amp = build_amplifier(psi, phi);
        AcquisitionConfig c;
        c.m = 3;
        c.T = 1;
        c.initial = InitialStateMode::y_minus_exact;
        const SpectrumGrid s1 = compute_spectrum(acquire_series(amp, c), GridSpec::periodic());
        double d1 = 0.0;
        for (const auto& p : s1.values)
            d1 = std::max(d1, std::abs(p.s_re - (1.0 + 2.0 * std::exp(-a * a) * std::cos(p.x - 2 * c.m * theta))));
        out.push_back({"T = 1 identity", d1 <= 1e-12, "max |diff| = " + format_real(d1)});
        c.T = 60;
        c.initial = InitialStateMode::psi_default;
        const SpectrumGrid s60 = compute_spectrum(acquire_series(amp, c), GridSpec::periodic());
        double d2 = 0.0;
        for (const auto& p : s60.values)
            d2 = std::max(d2, std::abs(p.s_re - periodic_spectrum_overlap(theta, c.m, a, p.x)));
        out.push_back({"closed form within cutoff bound", d2 <= cutoff_bound(a, 60),
                       "max |diff| = " + format_real(d2) + ", bound = " + format_real(cutoff_bound(a, 60))});
    }
    {  // trajectories against the density matrix
        Rng crng(seed + 2);
        const Circuit c = random_circuit(3, 3, crng);
        const NoiseConfig cfg{0.05, 4000, seed};
        const Ket ideal = apply_circuit(Ket(3), c);
        const double ref = density_matrix_reference(c, cfg).expectation(ideal);
        double mean = 0.0, m2 = 0.0;
        for (int j = 0; j < cfg.trajectories; ++j) {
            Rng trng(derive_seed(cfg.seed, j));
            const Ket s = noisy_apply_circuit(Ket(3), c, cfg, trng);
            const double v = std::norm(inner(ideal, s));
            const double dd = v - mean;
            mean += dd / (j + 1);
            m2 += dd * (v - mean);
        }
        const double se = std::sqrt(m2 / (cfg.trajectories - 1) / cfg.trajectories);
        out.push_back({"trajectories vs density matrix", std::abs(mean - ref) <= 3.0 * se + 1e-12,
                       "trajectory " + format_real(mean) + " +- " + format_real(se) + ", exact " + format_real(ref)});
    }
    {  // series round trip
        const auto [psi, phi] = theta_pair(2, 0.9, seed + 3);
        const Amplifier amp = build_amplifier(psi, phi);
        AcquisitionConfig c;
        c.mode = AcquisitionMode::hadamard_test;
        c.T = 10;
        c.n_shot = 50;
        c.seed = seed;
        const SignalSeries s = acquire_series(amp, c);
        const SignalSeries back = parse_series_csv(series_csv(s), c);
        bool same = back.samples.size() == s.samples.size();
        for (std::size_t i = 0; same && i < s.samples.size(); ++i)
            same = back.samples[i].t == s.samples[i].t && back.samples[i].raw == s.samples[i].raw &&
                   back.samples[i].windowed == s.samples[i].windowed;
        out.push_back({"series csv round trip", same, same ? "bit-exact" : "mismatch"});
    }
    return out;
}

}  // namespace qaef::oracle
