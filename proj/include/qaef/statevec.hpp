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
 * Dense state-vector simulator: kets, gates, circuits, inner products and
 * measurement sampling.
 *
 * Qubit ordering is little-endian: qubit q is bit q of the amplitude index.
 * Bitstrings returned by sample_bitstrings() are printed most significant
 * qubit first, so basis index 1 on two qubits reads "01".
 */

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qaef/random.hpp"

namespace qaef {

using cplx = std::complex<double>;

inline constexpr cplx I_UNIT{0.0, 1.0};

/// Row-major 2x2 complex matrix.
struct Mat2 {
    cplx m00{1.0}, m01{0.0}, m10{0.0}, m11{1.0};

    friend bool operator==(const Mat2&, const Mat2&) = default;

    [[nodiscard]] Mat2 adjoint() const {
        return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)};
    }
    [[nodiscard]] Mat2 conjugate() const {
        return {std::conj(m00), std::conj(m01), std::conj(m10), std::conj(m11)};
    }
    [[nodiscard]] cplx trace() const { return m00 + m11; }
    [[nodiscard]] cplx det() const { return m00 * m11 - m01 * m10; }

    friend Mat2 operator*(const Mat2& a, const Mat2& b) {
        return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
                a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
    }
    friend Mat2 operator*(cplx s, const Mat2& a) {
        return {s * a.m00, s * a.m01, s * a.m10, s * a.m11};
    }
    friend Mat2 operator+(const Mat2& a, const Mat2& b) {
        return {a.m00 + b.m00, a.m01 + b.m01, a.m10 + b.m10, a.m11 + b.m11};
    }
    friend Mat2 operator-(const Mat2& a, const Mat2& b) {
        return {a.m00 - b.m00, a.m01 - b.m01, a.m10 - b.m10, a.m11 - b.m11};
    }

    /// Largest entry-wise deviation of U^dagger U from the identity.
    [[nodiscard]] double unitarity_error() const {
        const Mat2 p = adjoint() * *this;
        return std::max({std::abs(p.m00 - 1.0), std::abs(p.m01), std::abs(p.m10),
                         std::abs(p.m11 - 1.0)});
    }
    [[nodiscard]] bool is_unitary(double tol = 1e-10) const { return unitarity_error() <= tol; }
};

namespace gates {

inline Mat2 identity() { return {}; }
inline Mat2 x() { return {0.0, 1.0, 1.0, 0.0}; }
inline Mat2 y() { return {0.0, -I_UNIT, I_UNIT, 0.0}; }
inline Mat2 z() { return {1.0, 0.0, 0.0, -1.0}; }
inline Mat2 h() {
    const double r = 1.0 / std::numbers::sqrt2;
    return {r, r, r, -r};
}
inline Mat2 s() { return {1.0, 0.0, 0.0, I_UNIT}; }
inline Mat2 sdg() { return {1.0, 0.0, 0.0, -I_UNIT}; }
inline Mat2 t() { return {1.0, 0.0, 0.0, std::polar(1.0, std::numbers::pi / 4)}; }
inline Mat2 rx(double angle) {
    const double c = std::cos(angle / 2), s = std::sin(angle / 2);
    return {c, -I_UNIT * s, -I_UNIT * s, c};
}
inline Mat2 ry(double angle) {
    const double c = std::cos(angle / 2), s = std::sin(angle / 2);
    return {c, -s, s, c};
}
inline Mat2 rz(double angle) {
    return {std::polar(1.0, -angle / 2), 0.0, 0.0, std::polar(1.0, angle / 2)};
}
inline Mat2 phase(double angle) { return {1.0, 0.0, 0.0, std::polar(1.0, angle)}; }

/// Principal square root of a 2x2 unitary, via its spectral decomposition.
inline Mat2 sqrt_unitary(const Mat2& u) {
    const cplx tr = u.trace();
    const cplx disc = std::sqrt(tr * tr - 4.0 * u.det());
    const cplx l1 = (tr + disc) / 2.0;
    const cplx l2 = (tr - disc) / 2.0;
    if (std::abs(l1 - l2) < 1e-12) return std::sqrt(l1) * identity();
    const Mat2 p1 = (1.0 / (l1 - l2)) * (u - l2 * identity());
    const Mat2 p2 = (1.0 / (l2 - l1)) * (u - l1 * identity());
    return std::sqrt(l1) * p1 + std::sqrt(l2) * p2;
}

}  // namespace gates

/// A single-qubit unitary on `target`, applied only when every qubit in
/// `controls` is |1>. This one shape covers plain single-qubit gates, CNOT,
/// controlled-U and the multi-controlled X/Z gates.
struct Gate {
    Mat2 matrix;
    std::vector<int> controls;
    int target = 0;

    friend bool operator==(const Gate&, const Gate&) = default;

    [[nodiscard]] std::size_t arity() const { return controls.size() + 1; }
    [[nodiscard]] Gate adjoint() const { return {matrix.adjoint(), controls, target}; }

    /// Throws if an index is outside [0, n_qubits), indices repeat, or the
    /// matrix is not unitary within 1e-10.
    void validate(int n_qubits) const {
        auto in_range = [n_qubits](int q) { return q >= 0 && q < n_qubits; };
        if (!in_range(target)) throw std::out_of_range("gate target index out of range");
        for (int c : controls) {
            if (!in_range(c)) throw std::out_of_range("gate control index out of range");
            if (c == target) throw std::invalid_argument("gate control equals target");
        }
        std::vector<int> sorted = controls;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("gate control indices repeat");
        if (!matrix.is_unitary(1e-10)) throw std::invalid_argument("gate matrix is not unitary");
    }
};

inline Gate single(const Mat2& u, int q) { return {u, {}, q}; }
inline Gate cnot(int control, int target) { return {gates::x(), {control}, target}; }
inline Gate controlled(const Mat2& u, std::vector<int> controls, int target) {
    return {u, std::move(controls), target};
}
inline Gate mcz(std::vector<int> controls, int target) { return {gates::z(), std::move(controls), target}; }
inline Gate mcx(std::vector<int> controls, int target) { return {gates::x(), std::move(controls), target}; }

class Ket {
  public:
    /// |0...0> on n qubits.
    explicit Ket(int n_qubits) : n_(n_qubits) {
        if (n_qubits < 1 || n_qubits > 30) throw std::invalid_argument("Ket: qubit count out of range");
        amp_.assign(std::size_t{1} << n_qubits, cplx{0.0});
        amp_[0] = 1.0;
    }

    static Ket basis(int n_qubits, std::uint64_t index) {
        Ket k(n_qubits);
        if (index >= k.dim()) throw std::out_of_range("Ket::basis: index out of range");
        k.amp_[0] = 0.0;
        k.amp_[index] = 1.0;
        return k;
    }

    /// Takes ownership of `amps`; the length must be a power of two and the
    /// vector must be normalized within 1e-8.
    static Ket from_amplitudes(std::vector<cplx> amps) {
        if (amps.empty() || !std::has_single_bit(amps.size()))
            throw std::invalid_argument("Ket: amplitude count must be a power of two");
        const int n = std::countr_zero(amps.size());
        if (n == 0) throw std::invalid_argument("Ket: need at least one qubit");
        Ket k(n);
        k.amp_ = std::move(amps);
        if (std::abs(k.norm_squared() - 1.0) > 1e-8) throw std::invalid_argument("Ket: amplitudes not normalized");
        return k;
    }

    [[nodiscard]] int n_qubits() const { return n_; }
    [[nodiscard]] std::size_t dim() const { return amp_.size(); }
    [[nodiscard]] std::span<const cplx> amplitudes() const { return amp_; }
    [[nodiscard]] cplx operator[](std::size_t i) const { return amp_[i]; }

    [[nodiscard]] double norm_squared() const {
        double s = 0.0;
        for (const cplx& a : amp_) s += std::norm(a);
        return s;
    }

    /// In-place application. Pairs of amplitudes differing only in the
    /// target bit are mixed when all control bits are set.
    void apply(const Gate& g) {
        g.validate(n_);
        apply_unchecked(g);
    }

    void apply_unchecked(const Gate& g) {
        const std::size_t tbit = std::size_t{1} << g.target;
        std::size_t cmask = 0;
        for (int c : g.controls) cmask |= std::size_t{1} << c;
        const Mat2& u = g.matrix;
        const std::size_t d = amp_.size();
        for (std::size_t i0 = 0; i0 < d; ++i0) {
            if ((i0 & tbit) || (i0 & cmask) != cmask) continue;
            const std::size_t i1 = i0 | tbit;
            const cplx a0 = amp_[i0], a1 = amp_[i1];
            amp_[i0] = u.m00 * a0 + u.m01 * a1;
            amp_[i1] = u.m10 * a0 + u.m11 * a1;
        }
    }

    /// Probability that `qubit` reads `bit`.
    [[nodiscard]] double marginal_probability(int qubit, int bit) const {
        if (qubit < 0 || qubit >= n_) throw std::out_of_range("marginal_probability: qubit out of range");
        const std::size_t qb = std::size_t{1} << qubit;
        double p = 0.0;
        for (std::size_t i = 0; i < amp_.size(); ++i)
            if (((i & qb) != 0) == (bit != 0)) p += std::norm(amp_[i]);
        return p;
    }

    /// Mutable access for state construction; callers keep the norm.
    [[nodiscard]] std::span<cplx> mutable_amplitudes() { return amp_; }

  private:
    int n_;
    std::vector<cplx> amp_;
};

/// Ordered gate list on a fixed register width.
struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> ops;

    Circuit() = default;
    explicit Circuit(int n) : n_qubits(n) {}

    friend bool operator==(const Circuit&, const Circuit&) = default;

    Circuit& add(Gate g) {
        g.validate(n_qubits);
        ops.push_back(std::move(g));
        return *this;
    }
    Circuit& u(const Mat2& m, int q) { return add(single(m, q)); }
    Circuit& h(int q) { return add(single(gates::h(), q)); }
    Circuit& x(int q) { return add(single(gates::x(), q)); }
    Circuit& y(int q) { return add(single(gates::y(), q)); }
    Circuit& z(int q) { return add(single(gates::z(), q)); }
    Circuit& s(int q) { return add(single(gates::s(), q)); }
    Circuit& rx(int q, double a) { return add(single(gates::rx(a), q)); }
    Circuit& ry(int q, double a) { return add(single(gates::ry(a), q)); }
    Circuit& rz(int q, double a) { return add(single(gates::rz(a), q)); }
    Circuit& cx(int c, int t) { return add(cnot(c, t)); }

    /// Appends `other`, which may be narrower than this register.
    Circuit& append(const Circuit& other) {
        if (other.n_qubits > n_qubits) throw std::invalid_argument("append: circuit wider than register");
        ops.insert(ops.end(), other.ops.begin(), other.ops.end());
        return *this;
    }

    [[nodiscard]] std::size_t two_qubit_gate_count() const;
};

/// Reversed order, each gate conjugate-transposed.
inline Circuit adjoint(const Circuit& c) {
    Circuit out(c.n_qubits);
    out.ops.reserve(c.ops.size());
    for (auto it = c.ops.rbegin(); it != c.ops.rend(); ++it) out.ops.push_back(it->adjoint());
    return out;
}

namespace detail {

// C^k(U) = C_last(V) . C^{k-1}X(rest -> last) . C_last(V^dag) . C^{k-1}X(rest -> last) . C^{k-1}_rest(V)
// with V^2 = U (Barenco et al. construction, no ancillas). Listed in time order.
inline void decompose_into(const Gate& g, std::vector<Gate>& out) {
    if (g.controls.size() <= 1) {
        out.push_back(g);
        return;
    }
    const Mat2 v = gates::sqrt_unitary(g.matrix);
    const int last = g.controls.back();
    std::vector<int> rest(g.controls.begin(), g.controls.end() - 1);
    out.push_back(controlled(v, {last}, g.target));
    decompose_into(mcx(rest, last), out);
    out.push_back(controlled(v.adjoint(), {last}, g.target));
    decompose_into(mcx(rest, last), out);
    decompose_into(controlled(v, rest, g.target), out);
}

}  // namespace detail

/// Rewrites every gate with two or more controls into single-control gates.
/// Used for gate accounting and for noisy simulation.
inline Circuit decompose(const Circuit& c) {
    Circuit out(c.n_qubits);
    for (const Gate& g : c.ops) detail::decompose_into(g, out.ops);
    return out;
}

inline std::size_t Circuit::two_qubit_gate_count() const {
    const Circuit d = decompose(*this);
    return static_cast<std::size_t>(
        std::count_if(d.ops.begin(), d.ops.end(), [](const Gate& g) { return g.arity() >= 2; }));
}

inline Ket apply_gate(Ket state, const Gate& g) {
    state.apply(g);
    return state;
}

inline Ket apply_circuit(Ket state, const Circuit& c) {
    if (c.n_qubits != state.n_qubits()) throw std::invalid_argument("apply_circuit: dimension mismatch");
    for (const Gate& g : c.ops) state.apply_unchecked(g);  // validated on insertion
    return state;
}

inline cplx inner(const Ket& a, const Ket& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("inner: dimension mismatch");
    cplx s{0.0};
    const auto x = a.amplitudes(), y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

inline std::string bitstring(std::uint64_t index, int n_qubits) {
    std::string s(static_cast<std::size_t>(n_qubits), '0');
    for (int q = 0; q < n_qubits; ++q)
        if (index >> q & 1U) s[static_cast<std::size_t>(n_qubits - 1 - q)] = '1';
    return s;
}

/// Index draws from |amplitude|^2 by inverse CDF.
inline std::vector<std::uint64_t> sample_indices(const Ket& state, std::int64_t shots, std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("sample: shots must be >= 1");
    std::vector<double> cdf(state.dim());
    double acc = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        acc += std::norm(state[i]);
        cdf[i] = acc;
    }
    Rng rng(seed);
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<std::size_t>(shots));
    for (std::int64_t s = 0; s < shots; ++s) {
        const double u = uniform01(rng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        out.push_back(static_cast<std::uint64_t>(it - cdf.begin()));
    }
    return out;
}

inline std::map<std::string, std::int64_t> sample_bitstrings(const Ket& state, std::int64_t shots,
                                                            std::uint64_t seed) {
    std::map<std::string, std::int64_t> hist;
    for (std::uint64_t idx : sample_indices(state, shots, seed)) ++hist[bitstring(idx, state.n_qubits())];
    return hist;
}

/// Layers of random Rz.Ry.Rz rotations followed by a CNOT ladder.
inline Circuit random_circuit(int n_qubits, int depth, Rng& rng) {
    Circuit c(n_qubits);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int layer = 0; layer < depth; ++layer) {
        for (int q = 0; q < n_qubits; ++q) {
            c.rz(q, two_pi * uniform01(rng));
            c.ry(q, two_pi * uniform01(rng));
            c.rz(q, two_pi * uniform01(rng));
        }
        for (int q = 0; q + 1 < n_qubits; ++q) c.cx(q, q + 1);
    }
    return c;
}

}  // namespace qaef
