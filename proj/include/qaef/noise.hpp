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
 * Two-qubit depolarizing noise after every two-qubit gate,
 *
 *     Phi(rho) = (1 - eps) U rho U^dagger + eps Tr_ab(U rho U^dagger) (x) I/4,
 *
 * simulated by Monte Carlo trajectories on the state-vector simulator, plus
 * an exact density-matrix evolution used as the reference.
 *
 * Trajectories use I/4 (x) Tr_ab(rho) = (1/16) sum_P P rho P over all 16
 * two-qubit Paulis: with probability eps one Pauli pair (II included) is
 * drawn uniformly and applied. The density-matrix path instead replaces the
 * two-qubit marginal directly, so the two are independent routes to the
 * same channel.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qaef/random.hpp"
#include "qaef/statevec.hpp"

namespace qaef {

struct NoiseConfig {
    double epsilon = 0.0;  ///< depolarizing probability per two-qubit gate
    int trajectories = 1000;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("noise: epsilon must lie in [0, 1]");
        if (trajectories < 1) throw std::invalid_argument("noise: need at least one trajectory");
    }
};

namespace detail {

inline const std::array<Mat2, 4>& paulis() {
    static const std::array<Mat2, 4> p{gates::identity(), gates::x(), gates::y(), gates::z()};
    return p;
}

}  // namespace detail

/// Applies `g`, then with probability eps a uniformly drawn two-qubit Pauli
/// on the gate's two qubits. Single-qubit gates are noiseless. Gates with
/// more than two qubits are rejected; decompose() the circuit first.
inline void apply_noisy_gate(Ket& state, const Gate& g, double epsilon, Rng& rng) {
    if (g.arity() > 2) throw std::invalid_argument("noisy simulation needs gates on at most two qubits");
    state.apply_unchecked(g);
    if (g.arity() < 2 || epsilon <= 0.0) return;
    if (!bernoulli(rng, epsilon)) return;
    const std::uint64_t which = uniform_index(rng, 16);
    const auto& p = detail::paulis();
    if (which & 3U) state.apply_unchecked(single(p[which & 3U], g.target));
    if (which >> 2) state.apply_unchecked(single(p[which >> 2], g.controls.front()));
}

inline Ket noisy_apply_circuit(Ket state, const Circuit& c, const NoiseConfig& cfg, Rng& rng) {
    cfg.validate();
    if (c.n_qubits != state.n_qubits()) throw std::invalid_argument("noisy_apply_circuit: dimension mismatch");
    for (const Gate& g : c.ops) apply_noisy_gate(state, g, cfg.epsilon, rng);
    return state;
}

/// Dense density matrix on n <= 6 qubits, stored column-major as a vector
/// of length 4^n: entry (r, c) sits at index r + (c << n).
class DensityMatrix {
  public:
    static constexpr int MAX_QUBITS = 6;

    explicit DensityMatrix(const Ket& pure) : n_(pure.n_qubits()) {
        if (n_ > MAX_QUBITS) throw std::invalid_argument("DensityMatrix: too many qubits");
        const std::size_t d = pure.dim();
        rho_.assign(d * d, cplx{0.0});
        for (std::size_t c = 0; c < d; ++c)
            for (std::size_t r = 0; r < d; ++r) rho_[r + (c << n_)] = pure[r] * std::conj(pure[c]);
    }

    [[nodiscard]] int n_qubits() const { return n_; }
    [[nodiscard]] std::size_t dim() const { return std::size_t{1} << n_; }
    [[nodiscard]] cplx operator()(std::size_t r, std::size_t c) const { return rho_[r + (c << n_)]; }

    /// rho -> U rho U^dagger.
    void apply(const Gate& g) {
        g.validate(n_);
        apply_rows(g.matrix, g.controls, g.target, 0);
        apply_rows(g.matrix.conjugate(), g.controls, g.target, n_);
    }

    /// Replaces the marginal on qubits (qa, qb) by I/4 with probability eps.
    void depolarize(int qa, int qb, double epsilon) {
        if (qa == qb || qa < 0 || qb < 0 || qa >= n_ || qb >= n_)
            throw std::invalid_argument("depolarize: bad qubit pair");
        const std::size_t d = dim();
        const std::size_t ma = std::size_t{1} << qa, mb = std::size_t{1} << qb, mask = ma | mb;
        const std::array<std::size_t, 4> sub{0, ma, mb, ma | mb};
        std::vector<cplx> out(rho_.size());
        for (std::size_t c = 0; c < d; ++c) {
            for (std::size_t r = 0; r < d; ++r) {
                cplx v = (1.0 - epsilon) * (*this)(r, c);
                if ((r & mask) == (c & mask)) {
                    cplx traced{0.0};
                    for (std::size_t s : sub) traced += (*this)((r & ~mask) | s, (c & ~mask) | s);
                    v += epsilon * traced / 4.0;
                }
                out[r + (c << n_)] = v;
            }
        }
        rho_ = std::move(out);
    }

    [[nodiscard]] cplx trace() const {
        cplx t{0.0};
        for (std::size_t i = 0; i < dim(); ++i) t += (*this)(i, i);
        return t;
    }

    /// Tr(rho^2).
    [[nodiscard]] double purity() const {
        double p = 0.0;
        for (const cplx& v : rho_) p += std::norm(v);  // rho Hermitian
        return p;
    }

    /// <v|rho|v>.
    [[nodiscard]] double expectation(const Ket& v) const {
        if (v.dim() != dim()) throw std::invalid_argument("expectation: dimension mismatch");
        cplx s{0.0};
        for (std::size_t c = 0; c < dim(); ++c)
            for (std::size_t r = 0; r < dim(); ++r) s += std::conj(v[r]) * (*this)(r, c) * v[c];
        return s.real();
    }

  private:
    void apply_rows(const Mat2& u, const std::vector<int>& controls, int target, int offset) {
        const std::size_t tbit = std::size_t{1} << (target + offset);
        std::size_t cmask = 0;
        for (int c : controls) cmask |= std::size_t{1} << (c + offset);
        for (std::size_t i0 = 0; i0 < rho_.size(); ++i0) {
            if ((i0 & tbit) || (i0 & cmask) != cmask) continue;
            const std::size_t i1 = i0 | tbit;
            const cplx a0 = rho_[i0], a1 = rho_[i1];
            rho_[i0] = u.m00 * a0 + u.m01 * a1;
            rho_[i1] = u.m10 * a0 + u.m11 * a1;
        }
    }

    int n_;
    std::vector<cplx> rho_;
};

/// Exact channel composition for `c` applied to `initial`; every gate on two
/// qubits is followed by the depolarizing map. Gates on more qubits are
/// rejected, as in the trajectory simulator.
inline DensityMatrix density_matrix_reference(const Circuit& c, const NoiseConfig& cfg, const Ket& initial) {
    cfg.validate();
    if (c.n_qubits > DensityMatrix::MAX_QUBITS) throw std::invalid_argument("density_matrix_reference: n too large");
    if (initial.n_qubits() != c.n_qubits) throw std::invalid_argument("density_matrix_reference: dimension mismatch");
    DensityMatrix rho(initial);
    for (const Gate& g : c.ops) {
        if (g.arity() > 2) throw std::invalid_argument("density_matrix_reference: decompose the circuit first");
        rho.apply(g);
        if (g.arity() == 2 && cfg.epsilon > 0.0) rho.depolarize(g.target, g.controls.front(), cfg.epsilon);
    }
    return rho;
}

inline DensityMatrix density_matrix_reference(const Circuit& c, const NoiseConfig& cfg) {
    return density_matrix_reference(c, cfg, Ket(c.n_qubits));
}

}  // namespace qaef
