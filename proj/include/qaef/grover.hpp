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
 * Reflections about prepared states and the amplification operator
 * A = R_phi R_psi.
 *
 * Inside span{|psi>, |phi>}, A is a rotation by 2*theta with
 * cos(theta) = |<psi|phi>|; its eigenvectors y_+/y_- carry eigenvalues
 * exp(+2i theta) and exp(-2i theta). Outside that plane A is the identity.
 */

#pragma once

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qaef/statevec.hpp"

namespace qaef {

/// Raised when |<psi|phi>| is 0 or 1, where the rotation plane collapses.
class degenerate_subspace : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Unitary U with |s> = U|0...0>.
struct StatePrep {
    Circuit circuit;
    std::string label;

    [[nodiscard]] int n_qubits() const { return circuit.n_qubits; }
    [[nodiscard]] Ket state() const { return apply_circuit(Ket(circuit.n_qubits), circuit); }
};

inline StatePrep identity_prep(int n_qubits) { return {Circuit(n_qubits), "zero"}; }

/// I - 2|0..0><0..0| on qubits [0, n) of a `width`-qubit register, built
/// from X layers around a multi-controlled Z. Qubits in `extra_controls`
/// (outside [0, n)) turn it into a controlled reflection.
inline Circuit zero_reflection(int n, int width, const std::vector<int>& extra_controls = {}) {
    Circuit c(width);
    for (int q = 0; q < n; ++q) c.x(q);
    std::vector<int> controls;
    for (int q = 0; q + 1 < n; ++q) controls.push_back(q);
    controls.insert(controls.end(), extra_controls.begin(), extra_controls.end());
    c.add(mcz(controls, n - 1));
    for (int q = 0; q < n; ++q) c.x(q);
    return c;
}

/// R_s = U_s (I - 2|0><0|) U_s^dagger.
struct Reflector {
    StatePrep prep;
    Circuit circuit;

    /// Same reflection on n+1 qubits, active only when qubit n is |1>.
    [[nodiscard]] Circuit controlled_circuit() const {
        const int n = prep.n_qubits();
        Circuit c(n + 1);
        c.append(adjoint(prep.circuit));
        c.append(zero_reflection(n, n + 1, {n}));
        c.append(prep.circuit);
        return c;
    }
};

inline Reflector build_reflector(const StatePrep& prep) {
    const int n = prep.n_qubits();
    Circuit c(n);
    c.append(adjoint(prep.circuit));
    c.append(zero_reflection(n, n));
    c.append(prep.circuit);
    return {prep, std::move(c)};
}

inline constexpr int DEFAULT_MAX_POWER = 2000;

struct Amplifier {
    Reflector r_phi;
    Reflector r_psi;
    /// arccos|<psi|phi>| clamped to [0, pi/2]; ground truth for checks only.
    std::optional<double> theta_true;
    cplx overlap{};          ///< <psi|phi>
    bool degenerate = false;  ///< set when |<psi|phi>| = 1 (theta = 0)
    int max_power = DEFAULT_MAX_POWER;

    Circuit step;           ///< R_phi R_psi, i.e. R_psi applied first
    Circuit step_inverse;
    Circuit controlled_step;  ///< ancilla is qubit n
    Circuit controlled_step_inverse;

    [[nodiscard]] int n_qubits() const { return r_psi.prep.n_qubits(); }
};

/// Throws degenerate_subspace for orthogonal inputs; identical states are
/// accepted with `degenerate` set.
inline Amplifier build_amplifier(const StatePrep& psi, const StatePrep& phi, int max_power = DEFAULT_MAX_POWER) {
    if (psi.n_qubits() != phi.n_qubits()) throw std::invalid_argument("build_amplifier: qubit counts differ");
    if (max_power < 0) throw std::invalid_argument("build_amplifier: negative power cap");
    Amplifier a;
    a.r_psi = build_reflector(psi);
    a.r_phi = build_reflector(phi);
    a.overlap = inner(psi.state(), phi.state());
    const double c = std::abs(a.overlap);
    if (c < 1e-9) throw degenerate_subspace("build_amplifier: states are orthogonal (theta = pi/2)");
    a.degenerate = c > 1.0 - 1e-12;
    a.theta_true = std::acos(std::min(1.0, c));
    a.max_power = max_power;

    const int n = psi.n_qubits();
    a.step = Circuit(n);
    a.step.append(a.r_psi.circuit).append(a.r_phi.circuit);
    a.step_inverse = adjoint(a.step);
    a.controlled_step = Circuit(n + 1);
    a.controlled_step.append(a.r_psi.controlled_circuit()).append(a.r_phi.controlled_circuit());
    a.controlled_step_inverse = adjoint(a.controlled_step);
    return a;
}

inline void check_power(const Amplifier& a, long k) {
    if (std::labs(k) > a.max_power)
        throw std::out_of_range("amplifier power " + std::to_string(k) + " exceeds cap " +
                                std::to_string(a.max_power));
}

/// A^k for k >= 0, (A^dagger)^|k| for k < 0.
inline Ket apply_power(const Amplifier& a, Ket state, long k) {
    check_power(a, k);
    const Circuit& c = k >= 0 ? a.step : a.step_inverse;
    for (long i = 0; i < std::labs(k); ++i) state = apply_circuit(std::move(state), c);
    return state;
}

struct SubspaceBasis {
    Ket y_plus;   ///< A y_+ = exp(+2i theta) y_+
    Ket y_minus;  ///< A y_- = exp(-2i theta) y_-
    Ket psi;
    Ket psi_perp;  ///< unit vector in the plane orthogonal to psi
    double theta = 0.0;
};

/// Eigenvectors of A inside span{psi, phi}.
///
/// With psi as "|1>" and psi_perp = (e^{-i g} phi - cos(theta) psi) / sin(theta)
/// as "|0>" (g = arg <psi|phi>), phi is cos(theta)|1> + sin(theta)|0> up to a
/// global phase and A = cos(2 theta) I + i sin(2 theta) sigma_y. Then
/// y_+- = (psi_perp +- i psi) / sqrt(2), and (y_+ + y_-)/sqrt(2) = psi_perp.
inline SubspaceBasis subspace_basis(const Amplifier& a) {
    const double c = std::abs(a.overlap);
    const double theta = std::acos(std::min(1.0, c));
    if (theta < 1e-7 || std::abs(theta - std::numbers::pi / 2) < 1e-7)
        throw degenerate_subspace("subspace_basis: theta is 0 or pi/2");
    const Ket psi = a.r_psi.prep.state();
    const Ket phi = a.r_phi.prep.state();
    const cplx unphase = std::conj(a.overlap) / c;
    const double s = std::sin(theta);
    std::vector<cplx> perp(psi.dim()), yp(psi.dim()), ym(psi.dim());
    const double r = 1.0 / std::numbers::sqrt2;
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        perp[i] = (unphase * phi[i] - c * psi[i]) / s;
        yp[i] = r * (perp[i] + I_UNIT * psi[i]);
        ym[i] = r * (perp[i] - I_UNIT * psi[i]);
    }
    return {Ket::from_amplitudes(std::move(yp)), Ket::from_amplitudes(std::move(ym)), psi,
            Ket::from_amplitudes(std::move(perp)), theta};
}

}  // namespace qaef
