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
 * Experiment runner: resolves a configuration, runs one of the canned
 * experiments, writes CSV/JSON artifacts and a manifest with content hashes.
 */

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qaef/acquire.hpp"
#include "qaef/bounds.hpp"
#include "qaef/grover.hpp"
#include "qaef/io.hpp"
#include "qaef/noise_study.hpp"
#include "qaef/observable.hpp"
#include "qaef/spectrum.hpp"
#include "qaef/validation.hpp"

namespace qaef {

inline constexpr const char* VERSION = "0.1.0";

/// Invalid configuration; the CLI maps it to exit code 2.
class config_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Maps long experiment ids such as "fig3_amplitude_sweep" to "fig3".
inline std::string canonical_experiment(const std::string& name) {
    static const std::map<std::string, std::string> aliases{
        {"fig3_amplitude_sweep", "fig3"}, {"fig4_random_states", "fig4"}, {"fig5_pauli_observable", "fig5"},
        {"fig6_cutoff_sweep", "fig6"},    {"fig7_shot_noise", "fig7"},    {"fig8_circuit_noise", "fig8"}};
    const auto it = aliases.find(name);
    return it == aliases.end() ? name : it->second;
}

struct ExperimentConfig {
    std::string experiment = "custom";
    int n_qubits = 4;
    std::optional<double> theta;
    std::uint64_t pair_seed = 7;
    int prep_depth = 8;
    int num_pairs = 6;
    std::vector<int> m_schedule{1, 2, 4, 8};
    std::vector<int> ladder{1, 2, 4, 8};
    double a = 1.0 / (20.0 * std::numbers::sqrt2);
    int T = 60;
    std::vector<int> T_list;
    std::size_t grid_points = 6283;
    AcquisitionMode mode = AcquisitionMode::exact_overlap;
    InitialStateMode initial = InitialStateMode::psi_default;
    int n_shot = 0;
    std::uint64_t seed = 1;
    std::vector<double> eps_list;
    int trajectories = 1000;
    int repetitions = 100;
    std::optional<double> target_x;
    std::string observable = "1 IIIIZZ";
    bool infer_imaginary = false;
    std::string output_dir;

    [[nodiscard]] AcquisitionConfig acquisition(int m, int T_override = 0) const {
        AcquisitionConfig c;
        c.mode = mode;
        c.m = m;
        c.T = T_override > 0 ? T_override : T;
        c.window.a = a;
        c.n_shot = mode == AcquisitionMode::exact_overlap ? 0 : n_shot;
        if (c.sampled()) c.seed = seed;
        c.initial = initial;
        c.infer_imaginary = infer_imaginary;
        return c;
    }
    [[nodiscard]] GridSpec grid() const { return GridSpec::periodic(grid_points); }

    void validate() const {
        static const std::vector<std::string> known{"fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "custom"};
        if (std::find(known.begin(), known.end(), experiment) == known.end())
            throw config_error("unknown experiment: " + experiment);
        if (n_qubits < 1 || n_qubits > 12) throw config_error("n_qubits must lie in [1, 12]");
        if (theta && !(*theta > 0.0 && *theta < std::numbers::pi / 2))
            throw config_error("theta must lie in (0, pi/2)");
        if (!(a > 0.0 && a < 1.0)) throw config_error("a must lie in (0, 1)");
        if (T < 1) throw config_error("T must be >= 1");
        if (grid_points < 3) throw config_error("grid_points must be >= 3");
        if (n_shot < 0) throw config_error("n_shot must be >= 0");
        if (m_schedule.empty()) throw config_error("m_schedule must not be empty");
        if (ladder.empty() || ladder.front() != 1) throw config_error("ladder must start at m = 1");
        for (std::size_t i = 1; i < ladder.size(); ++i)
            if (ladder[i] <= ladder[i - 1]) throw config_error("ladder must be strictly increasing");
        if (trajectories < 1) throw config_error("trajectories must be >= 1");
        if (repetitions < 2) throw config_error("repetitions must be >= 2");
        for (double e : eps_list)
            if (!(e >= 0.0 && e <= 1.0)) throw config_error("epsilon values must lie in [0, 1]");
        for (int t : T_list)
            if (t < 1) throw config_error("T_list entries must be >= 1");
        if (prep_depth < 0) throw config_error("prep_depth must be >= 0");
        if (mode != AcquisitionMode::exact_overlap && n_shot == 0 && experiment == "fig7")
            throw config_error("fig7 needs n_shot > 0");
    }
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["experiment"] = c.experiment;
    j["n_qubits"] = c.n_qubits;
    j["theta"] = c.theta ? nlohmann::json(*c.theta) : nlohmann::json(nullptr);
    j["pair_seed"] = c.pair_seed;
    j["prep_depth"] = c.prep_depth;
    j["num_pairs"] = c.num_pairs;
    j["m_schedule"] = c.m_schedule;
    j["ladder"] = c.ladder;
    j["a"] = c.a;
    j["T"] = c.T;
    j["T_list"] = c.T_list;
    j["grid_points"] = c.grid_points;
    j["mode"] = std::string(to_string(c.mode));
    j["initial"] = std::string(to_string(c.initial));
    j["n_shot"] = c.n_shot;
    j["seed"] = c.seed;
    j["eps_list"] = c.eps_list;
    j["trajectories"] = c.trajectories;
    j["repetitions"] = c.repetitions;
    j["target_x"] = c.target_x ? nlohmann::json(*c.target_x) : nlohmann::json(nullptr);
    j["observable"] = c.observable;
    j["infer_imaginary"] = c.infer_imaginary;
    j["output_dir"] = c.output_dir;
    return j;
}

/// Overlays the keys present in `j` on `c`. Unknown keys are rejected.
inline void apply_json(ExperimentConfig& c, const nlohmann::json& j) {
    if (!j.is_object()) throw config_error("config must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "experiment") c.experiment = canonical_experiment(v.get<std::string>());
            else if (key == "n_qubits") c.n_qubits = v.get<int>();
            else if (key == "theta") c.theta = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
            else if (key == "pair_seed") c.pair_seed = v.get<std::uint64_t>();
            else if (key == "prep_depth") c.prep_depth = v.get<int>();
            else if (key == "num_pairs") c.num_pairs = v.get<int>();
            else if (key == "m_schedule") c.m_schedule = v.get<std::vector<int>>();
            else if (key == "ladder") c.ladder = v.get<std::vector<int>>();
            else if (key == "a") c.a = v.get<double>();
            else if (key == "T") c.T = v.get<int>();
            else if (key == "T_list") c.T_list = v.get<std::vector<int>>();
            else if (key == "grid_points") c.grid_points = v.get<std::size_t>();
            else if (key == "mode") c.mode = parse_acquisition_mode(v.get<std::string>());
            else if (key == "initial") c.initial = parse_initial_state_mode(v.get<std::string>());
            else if (key == "n_shot") c.n_shot = v.get<int>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "eps_list") c.eps_list = v.get<std::vector<double>>();
            else if (key == "trajectories") c.trajectories = v.get<int>();
            else if (key == "repetitions") c.repetitions = v.get<int>();
            else if (key == "target_x")
                c.target_x = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
            else if (key == "observable") c.observable = v.get<std::string>();
            else if (key == "infer_imaginary") c.infer_imaginary = v.get<bool>();
            else if (key == "output_dir") c.output_dir = v.get<std::string>();
            else throw config_error("unknown config key: " + key);
        }
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("bad config value: ") + e.what());
    } catch (const config_error&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw config_error(e.what());
    }
}

/// Defaults for the canned experiments.
inline ExperimentConfig default_experiment_config(const std::string& id) {
    const std::string name = canonical_experiment(id);
    ExperimentConfig c;
    c.experiment = name;
    auto range = [](int lo, int hi) {
        std::vector<int> v;
        for (int m = lo; m <= hi; ++m) v.push_back(m);
        return v;
    };
    if (name == "fig3") {
        c.theta = 0.6;
        c.m_schedule = range(2, 12);
    } else if (name == "fig4") {
        c.m_schedule = {10};
        c.ladder = {1, 2, 5, 10};
    } else if (name == "fig5") {
        c.n_qubits = 6;
        c.theta = 0.595;
        c.m_schedule = range(-1, 14);
        c.ladder = {1, 2, 4, 8, 14};
        c.mode = AcquisitionMode::direct_probability;
    } else if (name == "fig6") {
        c.theta = 0.6;
        c.m_schedule = {1};
        c.a = 1.0 / (10.0 * std::numbers::sqrt2);
        c.T_list = {20, 10, 5, 2, 1};
        c.initial = InitialStateMode::y_minus_exact;
    } else if (name == "fig7") {
        c.theta = 1.5;
        c.m_schedule = range(1, 24);
        c.a = 1.0 / (10.0 * std::numbers::sqrt2);
        c.T = 1;
        c.mode = AcquisitionMode::hadamard_test;
        c.initial = InitialStateMode::y_minus_exact;
        c.n_shot = 100;
        c.infer_imaginary = true;
    } else if (name == "fig8") {
        c.target_x = 26.575;
        c.m_schedule = {5};
        c.T = 40;
        c.mode = AcquisitionMode::direct_probability;
        c.prep_depth = 0;
        c.eps_list = {0.0, 1e-3, 5e-3, 1e-2};
    } else if (name == "custom") {
        c.theta = 0.6;
    } else {
        throw config_error("unknown experiment: " + name);
    }
    return c;
}

/// theta whose (unwrapped) peak factor * m * theta lies closest to `x`.
inline double theta_for_target(double x, int m, AcquisitionMode mode, InitialStateMode initial) {
    const bool prob = mode == AcquisitionMode::direct_probability;
    const bool mirror = prob || initial != InitialStateMode::y_minus_exact;
    const double factor = (prob ? 4.0 : 2.0) * m;
    auto cands = theta_candidates(wrap_2pi(x), m, prob, mirror, std::numbers::pi / 2);
    std::erase_if(cands, [](double t) { return t < 1e-6 || t > std::numbers::pi / 2 - 1e-6; });
    if (cands.empty()) throw config_error("no theta reaches the target peak");
    return *std::min_element(cands.begin(), cands.end(), [&](double p, double q) {
        return std::abs(factor * p - x) < std::abs(factor * q - x);
    });
}

/// State preparation whose <Z_4 Z_5> equals cos(theta) on six qubits: a
/// GHZ block on qubits 0..3, Ry(theta) on qubit 4, qubit 5 left in |0>.
inline StatePrep observable_demo_state(double theta) {
    StatePrep p{Circuit(6), "ghz4 x ry"};
    p.circuit.h(0).cx(0, 1).cx(1, 2).cx(2, 3).ry(4, theta);
    return p;
}

/// One file produced by an experiment, path relative to the output directory.
struct Artifact {
    std::string name;
    std::string content;
};

struct ExperimentOutput {
    std::vector<Artifact> files;
    nlohmann::json summary;
};

struct RunManifest {
    nlohmann::json config;
    std::string started;
    std::string finished;
    struct Entry {
        std::string file;
        std::size_t bytes;
        std::string fnv1a64;
    };
    std::vector<Entry> artifacts;
    nlohmann::json summary;

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["version"] = VERSION;
        j["config"] = config;
        j["started"] = started;
        j["finished"] = finished;
        j["artifacts"] = nlohmann::json::array();
        for (const auto& e : artifacts)
            j["artifacts"].push_back({{"file", e.file}, {"bytes", e.bytes}, {"fnv1a64", e.fnv1a64}});
        j["summary"] = summary;
        return j;
    }
};

namespace detail {

inline std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string tag(int m) { return m < 0 ? "n" + std::to_string(-m) : std::to_string(m); }

inline void add_spectrum(ExperimentOutput& out, const std::string& stem, const SpectrumGrid& spec,
                         const std::vector<PeakEstimate>& peaks) {
    out.files.push_back({stem + "_spectrum.csv", spectrum_csv(spec)});
    out.files.push_back({stem + "_peaks.json", peaks_json(peaks).dump(2) + "\n"});
}

inline std::vector<PeakEstimate> peaks_or_empty(const SpectrumGrid& spec, bool exclude_zero) {
    try {
        return find_peaks(spec, exclude_zero);
    } catch (const no_peak_error&) {
        return {};
    }
}

/// Pair at the configured theta, or an unconstrained random pair.
inline std::pair<StatePrep, StatePrep> resolve_pair(const ExperimentConfig& c, std::uint64_t seed) {
    if (c.theta) return oracle::theta_pair(c.n_qubits, *c.theta, seed, c.prep_depth);
    Rng r1(derive_seed(seed, 0)), r2(derive_seed(seed, 1));
    return {StatePrep{random_circuit(c.n_qubits, c.prep_depth, r1), "U1|0>"},
            StatePrep{random_circuit(c.n_qubits, c.prep_depth, r2), "U2|0>"}};
}

/// One spectrum per m; summary rows with the expected wrapped peak.
inline ExperimentOutput run_sweep(const ExperimentConfig& c, const Amplifier& amp, double theta) {
    ExperimentOutput out;
    const bool prob = c.mode == AcquisitionMode::direct_probability;
    const double factor = prob ? 4.0 : 2.0;
    std::string csv = "m,x_expected,x_peak,abs_error,height\n";
    nlohmann::json rows = nlohmann::json::array();
    for (int m : c.m_schedule) {
        const SpectrumGrid spec = compute_spectrum(acquire_series(amp, c.acquisition(m)), c.grid());
        const auto peaks = peaks_or_empty(spec, prob);
        add_spectrum(out, "m" + tag(m), spec, peaks);
        const double expected = wrap_2pi(factor * m * theta);
        // The closest of the strongest two peaks: mirrored spectra have a
        // pair of equal peaks at +-x.
        std::optional<PeakEstimate> best;
        for (std::size_t i = 0; i < std::min<std::size_t>(2, peaks.size()); ++i)
            if (!best || circular_distance(peaks[i].x_peak, expected) < circular_distance(best->x_peak, expected))
                best = peaks[i];
        if (best) {
            const double err = circular_distance(best->x_peak, expected);
            csv += std::to_string(m) + ',' + format_real(expected) + ',' + format_real(best->x_peak) + ',' +
                   format_real(err) + ',' + format_real(best->height) + '\n';
            rows.push_back({{"m", m}, {"x_expected", expected}, {"x_peak", best->x_peak}, {"abs_error", err}});
        } else {
            csv += std::to_string(m) + ',' + format_real(expected) + ",nan,nan,nan\n";
            rows.push_back({{"m", m}, {"x_expected", expected}, {"x_peak", nullptr}});
        }
    }
    out.files.push_back({"summary.csv", csv});
    out.summary["rows"] = rows;
    out.summary["theta"] = theta;
    return out;
}

inline ExperimentOutput run_fig3(const ExperimentConfig& c) {
    const auto [psi, phi] = resolve_pair(c, c.pair_seed);
    const Amplifier amp = build_amplifier(psi, phi);
    return run_sweep(c, amp, *amp.theta_true);
}

inline ExperimentOutput run_fig4(const ExperimentConfig& c) {
    ExperimentOutput out;
    std::string csv = "pair,theta_true,theta_hat,abs_error,amplitude_true,amplitude_hat\n";
    nlohmann::json rows = nlohmann::json::array();
    for (int k = 0; k < c.num_pairs; ++k) {
        const auto [psi, phi] = resolve_pair(c, derive_seed(c.pair_seed, k));
        const Amplifier amp = build_amplifier(psi, phi);
        const LadderResult lr = ladder_refine(amp, c.ladder, c.acquisition(1), c.grid());
        const int m_last = c.ladder.back();
        const SpectrumGrid spec = compute_spectrum(acquire_series(amp, c.acquisition(m_last)), c.grid());
        add_spectrum(out, "pair" + std::to_string(k) + "_m" + tag(m_last), spec, peaks_or_empty(spec, false));
        const double th = *amp.theta_true;
        const double amp_true = std::norm(amp.overlap);
        const double amp_hat = std::pow(std::cos(lr.theta), 2);
        csv += std::to_string(k) + ',' + format_real(th) + ',' + format_real(lr.theta) + ',' +
               format_real(std::abs(lr.theta - th)) + ',' + format_real(amp_true) + ',' + format_real(amp_hat) + '\n';
        rows.push_back({{"pair", k}, {"theta_true", th}, {"theta_hat", lr.theta}, {"amplitude_true", amp_true},
                        {"amplitude_hat", amp_hat}});
    }
    out.files.push_back({"summary.csv", csv});
    out.summary["rows"] = rows;
    return out;
}

inline ExperimentOutput run_fig5(const ExperimentConfig& c) {
    const double theta = c.theta.value_or(0.595);
    const StatePrep psi = observable_demo_state(theta);
    const ObservableSpec obs = parse_observable(c.observable);
    if (obs.n_qubits() != psi.n_qubits()) throw config_error("fig5 observable must act on 6 qubits");
    const PauliString& p = obs.terms.front().pauli;
    const Amplifier amp = build_amplifier(psi, pauli_phi_prep(psi, p));
    ExperimentOutput out = run_sweep(c, amp, *amp.theta_true);

    PauliEstimateOptions opt;
    opt.schedule = c.ladder;
    opt.grid = c.grid();
    const ObservableEstimate est = estimate_observable(psi, obs, c.acquisition(1), opt);
    const double exact = obs.expectation(psi.state());
    out.summary["observable"] = {{"estimate", est.value}, {"exact", exact}};
    nlohmann::json est_json = {{"estimate", est.value}, {"exact", exact}, {"terms", nlohmann::json::array()}};
    for (std::size_t i = 0; i < est.terms.size(); ++i)
        est_json["terms"].push_back({{"coefficient", obs.terms[i].coefficient},
                                     {"pauli", obs.terms[i].pauli.word()},
                                     {"value", est.terms[i].value},
                                     {"theta", est.terms[i].theta},
                                     {"short_circuit", est.terms[i].short_circuit}});
    out.files.push_back({"observable.json", est_json.dump(2) + "\n"});
    return out;
}

inline ExperimentOutput run_fig6(const ExperimentConfig& c) {
    const auto [psi, phi] = resolve_pair(c, c.pair_seed);
    const Amplifier amp = build_amplifier(psi, phi);
    const std::vector<int> Ts = c.T_list.empty() ? std::vector<int>{c.T} : c.T_list;
    const int m = c.m_schedule.front();
    ExperimentOutput out;
    std::string csv = "T,x_peak,height,cutoff_bound\n";
    nlohmann::json rows = nlohmann::json::array();
    for (int T : Ts) {
        const SpectrumGrid spec = compute_spectrum(acquire_series(amp, c.acquisition(m, T)), c.grid());
        const auto peaks = find_peaks(spec, c.mode == AcquisitionMode::direct_probability);
        add_spectrum(out, "T" + std::to_string(T), spec, peaks);
        const double x = refine_mirrored_peak(spec, peaks.front().x_peak);
        csv += std::to_string(T) + ',' + format_real(x) + ',' + format_real(peaks.front().height) + ',' +
               format_real(cutoff_bound(c.a, T)) + '\n';
        rows.push_back({{"T", T}, {"x_peak", x}, {"height", peaks.front().height}});
    }
    out.files.push_back({"summary.csv", csv});
    out.summary["rows"] = rows;
    out.summary["x_expected"] = wrap_2pi(2.0 * m * *amp.theta_true);
    return out;
}

inline ExperimentOutput run_fig7(const ExperimentConfig& c) {
    const auto [psi, phi] = resolve_pair(c, c.pair_seed);
    const Amplifier amp = build_amplifier(psi, phi);
    const double theta = *amp.theta_true;
    const int m_max = *std::max_element(c.m_schedule.begin(), c.m_schedule.end());
    const auto ranked = optimal_magnifications(theta, 1, m_max);
    ExperimentOutput out;
    std::string csv = "m,residual,x_expected,mean_deviation,spread\n";
    nlohmann::json rows = nlohmann::json::array();
    for (int m : c.m_schedule) {
        const double expected = wrap_2pi(2.0 * m * theta);
        std::vector<double> dev;
        for (int r = 0; r < c.repetitions; ++r) {
            AcquisitionConfig a = c.acquisition(m);
            a.seed = derive_seed(c.seed, static_cast<std::int64_t>(m) * 100003 + r);
            const SpectrumGrid spec = compute_spectrum(acquire_series(amp, a), c.grid());
            const double x = find_peaks(spec, false).front().x_peak;
            double d = wrap_2pi(x - expected);
            if (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
            dev.push_back(d);
        }
        double mean = 0.0;
        for (double d : dev) mean += d;
        mean /= static_cast<double>(dev.size());
        double var = 0.0;
        for (double d : dev) var += (d - mean) * (d - mean);
        const double spread = std::sqrt(var / static_cast<double>(dev.size() - 1));
        double residual = 0.0;
        for (const auto& k : ranked)
            if (k.m == m) residual = k.residual;
        csv += std::to_string(m) + ',' + format_real(residual) + ',' + format_real(expected) + ',' +
               format_real(mean) + ',' + format_real(spread) + '\n';
        rows.push_back({{"m", m}, {"residual", residual}, {"spread", spread}});
    }
    out.files.push_back({"summary.csv", csv});
    out.summary["rows"] = rows;
    out.summary["theta"] = theta;
    return out;
}

inline ExperimentOutput run_fig8(const ExperimentConfig& c) {
    const int m = c.m_schedule.front();
    ExperimentConfig cc = c;
    if (c.target_x) cc.theta = theta_for_target(*c.target_x, m, c.mode, c.initial);
    const auto [psi, phi] = resolve_pair(cc, c.pair_seed);
    const Amplifier amp = build_amplifier(psi, phi);
    AcquisitionConfig acq = cc.acquisition(m);
    acq.noise = NoiseConfig{0.0, c.trajectories, c.seed};
    const NoiseStudy study = noisy_spectrum_study(amp, acq, c.eps_list.empty() ? std::vector<double>{0.0} : c.eps_list,
                                                  c.grid());
    ExperimentOutput out;
    for (std::size_t i = 0; i < study.spectra.size(); ++i)
        add_spectrum(out, "eps" + std::to_string(i), study.spectra[i],
                     peaks_or_empty(study.spectra[i], c.mode == AcquisitionMode::direct_probability));
    out.files.push_back({"noise_summary.csv", noise_summary_csv(study.rows)});
    // Re S at the noiseless peak position, defined even when a peak is lost.
    const double x_ref = study.rows.front().x_peak;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
        const auto& r = study.rows[i];
        nlohmann::json row = {{"epsilon", r.epsilon}, {"x_peak", r.x_peak}, {"height", r.height},
                              {"height_stderr", r.height_stderr}};
        if (std::isfinite(x_ref)) {
            const auto& v = study.spectra[i].values;
            const auto near = std::min_element(v.begin(), v.end(), [&](const auto& p, const auto& q) {
                return circular_distance(p.x, x_ref) < circular_distance(q.x, x_ref);
            });
            row["s_at_reference"] = near->s_re;
        }
        rows.push_back(row);
    }
    out.summary["rows"] = rows;
    out.summary["theta"] = *cc.theta;
    out.summary["x_expected"] = wrap_2pi(c.target_x.value_or(2.0 * m * *cc.theta));
    Circuit step = decompose(c.mode == AcquisitionMode::hadamard_test ? amp.controlled_step : amp.step);
    out.summary["two_qubit_gates_per_step"] = step.two_qubit_gate_count();
    return out;
}

inline ExperimentOutput run_custom(const ExperimentConfig& c) {
    const auto [psi, phi] = resolve_pair(c, c.pair_seed);
    const Amplifier amp = build_amplifier(psi, phi);
    const LadderResult lr = ladder_refine(amp, c.ladder, c.acquisition(1), c.grid());
    ExperimentOutput out;
    nlohmann::json rungs = nlohmann::json::array();
    for (const auto& r : lr.rungs) rungs.push_back({{"m", r.m}, {"x_peak", r.x_peak}, {"theta", r.theta}});
    out.summary = {{"theta_hat", lr.theta},
                   {"amplitude_hat", std::pow(std::cos(lr.theta), 2)},
                   {"half_width", lr.half_width},
                   {"theta_true", *amp.theta_true},
                   {"amplitude_true", std::norm(amp.overlap)},
                   {"rungs", rungs}};
    if (lr.alternate) out.summary["alternate"] = *lr.alternate;
    out.files.push_back({"estimate.json", out.summary.dump(2) + "\n"});
    return out;
}

}  // namespace detail

/// Runs the experiment without touching the filesystem.
inline ExperimentOutput compute_experiment(const ExperimentConfig& c) {
    c.validate();
    if (c.experiment == "fig3") return detail::run_fig3(c);
    if (c.experiment == "fig4") return detail::run_fig4(c);
    if (c.experiment == "fig5") return detail::run_fig5(c);
    if (c.experiment == "fig6") return detail::run_fig6(c);
    if (c.experiment == "fig7") return detail::run_fig7(c);
    if (c.experiment == "fig8") return detail::run_fig8(c);
    return detail::run_custom(c);
}

/// Output directory: the configured one, else $QAEF_OUTPUT_ROOT/<experiment>,
/// else runs/<experiment>.
inline std::filesystem::path resolve_output_dir(const ExperimentConfig& c) {
    if (!c.output_dir.empty()) return c.output_dir;
    const char* root = std::getenv("QAEF_OUTPUT_ROOT");
    return std::filesystem::path(root && *root ? root : "runs") / c.experiment;
}

/// Runs the experiment, writes every artifact plus config.json and
/// manifest.json into the output directory.
inline RunManifest run_experiment(const ExperimentConfig& c) {
    RunManifest man;
    man.started = detail::utc_now();
    const ExperimentOutput out = compute_experiment(c);
    const std::filesystem::path dir = resolve_output_dir(c);
    ExperimentConfig resolved = c;
    resolved.output_dir = dir.string();
    man.config = to_json(resolved);

    std::vector<Artifact> files = out.files;
    files.push_back({"config.json", man.config.dump(2) + "\n"});
    for (const Artifact& f : files) {
        write_text_file(dir / f.name, f.content);
        man.artifacts.push_back({f.name, f.content.size(), hex64(content_hash(f.content))});
    }
    man.summary = out.summary;
    man.finished = detail::utc_now();
    write_text_file(dir / "manifest.json", man.to_json().dump(2) + "\n");
    return man;
}

}  // namespace qaef
