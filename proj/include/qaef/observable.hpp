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
 * Pauli expectation values through angle estimation: for Hermitian unitary
 * P, <psi|P|psi> = <psi|phi> with phi = P psi, so the amplifier built from
 * (psi, P psi) rotates by 2 theta with cos(theta) = |<psi|P|psi>|.
 *
 * The spectrum only sees |<psi|P|psi>|, and the return-probability spectrum
 * cannot tell theta from pi/2 - theta either. Both are settled by a coarse
 * direct measurement of P, which only has to be accurate enough to pick
 * between two well separated candidates.
 */

#pragma once

#include <bit>
#include <cmath>
#include <numbers>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qaef/acquire.hpp"
#include "qaef/grover.hpp"
#include "qaef/spectrum.hpp"

namespace qaef {

/// Tensor product of single-qubit Paulis; character k acts on qubit k.
class PauliString {
  public:
    PauliString() = default;
    explicit PauliString(std::string word) : word_(std::move(word)) {
        if (word_.empty()) throw std::invalid_argument("PauliString: empty word");
        for (char ch : word_)
            if (ch != 'I' && ch != 'X' && ch != 'Y' && ch != 'Z')
                throw std::invalid_argument(std::string("PauliString: bad symbol '") + ch + "'");
    }

    [[nodiscard]] const std::string& word() const { return word_; }
    [[nodiscard]] int n_qubits() const { return static_cast<int>(word_.size()); }
    [[nodiscard]] char factor(int q) const { return word_[static_cast<std::size_t>(q)]; }
    [[nodiscard]] bool is_identity() const { return word_.find_first_not_of('I') == std::string::npos; }

    /// One single-qubit gate per non-identity factor.
    [[nodiscard]] Circuit circuit() const {
        Circuit c(n_qubits());
        for (int q = 0; q < n_qubits(); ++q) {
            switch (factor(q)) {
                case 'X': c.x(q); break;
                case 'Y': c.y(q); break;
                case 'Z': c.z(q); break;
                default: break;
            }
        }
        return c;
    }

    [[nodiscard]] Ket apply(const Ket& s) const {
        if (s.n_qubits() != n_qubits()) throw std::invalid_argument("PauliString: length mismatch");
        return apply_circuit(s, circuit());
    }

    /// <s|P|s>, exact.
    [[nodiscard]] double expectation(const Ket& s) const { return inner(s, apply(s)).real(); }

    friend bool operator==(const PauliString&, const PauliString&) = default;

  private:
    std::string word_;
};

struct ObservableTerm {
    double coefficient = 0.0;
    PauliString pauli;
};

/// B = sum_i c_i P_i.
struct ObservableSpec {
    std::vector<ObservableTerm> terms;

    [[nodiscard]] int n_qubits() const { return terms.empty() ? 0 : terms.front().pauli.n_qubits(); }
    [[nodiscard]] double expectation(const Ket& s) const {
        double v = 0.0;
        for (const auto& t : terms) v += t.coefficient * t.pauli.expectation(s);
        return v;
    }
};

/// One term per line, "coefficient word", e.g. "-0.5 IIZZ". Blank lines and
/// lines starting with '#' are skipped. All words must have the same length.
inline ObservableSpec parse_observable(const std::string& text) {
    static const std::regex line_re(R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s+([IXYZ]+)\s*$)");
    ObservableSpec spec;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::smatch m;
        if (!std::regex_match(line, m, line_re))
            throw std::invalid_argument("observable: cannot parse line " + std::to_string(lineno) + ": " + line);
        const double c = std::stod(m[1].str());
        if (!std::isfinite(c)) throw std::invalid_argument("observable: non-finite coefficient");
        PauliString p(m[2].str());
        if (!spec.terms.empty() && p.n_qubits() != spec.n_qubits())
            throw std::invalid_argument("observable: Pauli words differ in length at line " + std::to_string(lineno));
        spec.terms.push_back({c, std::move(p)});
    }
    if (spec.terms.empty()) throw std::invalid_argument("observable: no terms");
    return spec;
}

/// Preparation of P|psi>: the psi circuit followed by the Pauli gates.
inline StatePrep pauli_phi_prep(const StatePrep& psi, const PauliString& p) {
    if (p.n_qubits() != psi.n_qubits()) throw std::invalid_argument("pauli_phi_prep: length mismatch");
    StatePrep out{psi.circuit, p.word() + "|" + psi.label + ">"};
    out.circuit.append(p.circuit());
    return out;
}

struct PauliEstimateOptions {
    std::vector<int> schedule{1, 2, 4, 8};
    GridSpec grid = GridSpec::periodic();
    /// Shots for the coarse direct measurement of P when cfg is sampled.
    int coarse_shots = 1000;
};

struct PauliEstimate {
    double value = 0.0;         ///< cos(theta)
    double theta = 0.0;         ///< in [0, pi]
    double theta_amp = 0.0;     ///< arccos |<psi|P|psi>| from the spectrum, in [0, pi/2]
    double coarse = 0.0;        ///< direct estimate of <psi|P|psi> used for branch and sign
    bool short_circuit = false;  ///< degenerate expectation (0 or +-1), no spectrum run
    std::optional<LadderResult> ladder;
};

namespace detail {

/// <psi|P|psi> from `shots` computational-basis samples after rotating each
/// X factor with H and each Y factor with S^dagger H.
inline double sampled_pauli_expectation(const Ket& psi, const PauliString& p, int shots, std::uint64_t seed) {
    Ket s = psi;
    std::uint64_t support = 0;
    for (int q = 0; q < p.n_qubits(); ++q) {
        const char f = p.factor(q);
        if (f == 'I') continue;
        support |= std::uint64_t{1} << q;
        if (f == 'Y') s.apply(single(gates::sdg(), q));
        if (f == 'X' || f == 'Y') s.apply(single(gates::h(), q));
    }
    long sum = 0;
    for (std::uint64_t idx : sample_indices(s, shots, seed)) sum += (std::popcount(idx & support) % 2 == 0) ? 1 : -1;
    return static_cast<double>(sum) / shots;
}

}  // namespace detail

/// cos(theta) for <psi|P|psi>. cfg.m is ignored: the ladder runs over
/// opt.schedule. Expectations within 1e-9 of 0 or +-1 are returned directly.
inline PauliEstimate estimate_pauli_expectation(const StatePrep& psi, const PauliString& p,
                                                const AcquisitionConfig& cfg, const PauliEstimateOptions& opt = {}) {
    if (p.n_qubits() != psi.n_qubits()) throw std::invalid_argument("estimate_pauli_expectation: length mismatch");
    const Ket state = psi.state();
    const double exact = p.expectation(state);
    PauliEstimate out;
    if (std::abs(exact) > 1.0 - 1e-9 || std::abs(exact) < 1e-9) {
        out.short_circuit = true;
        out.value = std::abs(exact) < 1e-9 ? 0.0 : std::copysign(1.0, exact);
        out.coarse = out.value;
        out.theta = std::acos(out.value);
        out.theta_amp = std::acos(std::abs(out.value));
        return out;
    }

    out.coarse = cfg.sampled()
                     ? detail::sampled_pauli_expectation(state, p, opt.coarse_shots, derive_seed(*cfg.seed, -1))
                     : exact;

    const Amplifier amp = build_amplifier(psi, pauli_phi_prep(psi, p));
    out.ladder = ladder_refine(amp, opt.schedule, cfg, opt.grid);
    double theta_amp = out.ladder->theta;
    if (out.ladder->alternate) {
        const double alt = *out.ladder->alternate;
        const double target = std::abs(out.coarse);
        if (std::abs(std::cos(alt) - target) < std::abs(std::cos(theta_amp) - target)) theta_amp = alt;
    }
    out.theta_amp = theta_amp;
    out.theta = out.coarse < 0.0 ? std::numbers::pi - theta_amp : theta_amp;
    out.value = std::cos(out.theta);
    return out;
}

struct ObservableEstimate {
    double value = 0.0;
    std::vector<PauliEstimate> terms;  ///< same order as the spec
};

inline ObservableEstimate estimate_observable(const StatePrep& psi, const ObservableSpec& obs,
                                              const AcquisitionConfig& cfg, const PauliEstimateOptions& opt = {}) {
    if (obs.terms.empty()) throw std::invalid_argument("estimate_observable: no terms");
    ObservableEstimate out;
    for (std::size_t i = 0; i < obs.terms.size(); ++i) {
        AcquisitionConfig term_cfg = cfg;
        if (cfg.seed) term_cfg.seed = derive_seed(*cfg.seed, static_cast<std::int64_t>(i));
        out.terms.push_back(estimate_pauli_expectation(psi, obs.terms[i].pauli, term_cfg, opt));
        out.value += obs.terms[i].coefficient * out.terms.back().value;
    }
    return out;
}

}  // namespace qaef
