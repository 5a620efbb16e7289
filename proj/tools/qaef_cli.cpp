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

// Command-line front end: estimate, observable, reproduce, bounds, validate.
// Exit codes: 0 success, 1 pipeline failure, 2 usage or configuration error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qaef/qaef.hpp"

namespace {

using nlohmann::json;

constexpr int kPipelineError = 1;
constexpr int kUsageError = 2;

/// Flags recorded as config keys; applied on top of defaults and --config.
template <class T>
CLI::Option* overlay_option(CLI::App* app, const std::string& flag, const std::string& key, json& overlay,
                            const std::string& help) {
    return app->add_option_function<T>(flag, [&overlay, key](const T& v) { overlay[key] = v; }, help);
}

void add_pipeline_options(CLI::App* app, json& overlay) {
    overlay_option<double>(app, "--theta", "theta", overlay, "angle of the generated state pair");
    overlay_option<int>(app, "--n-qubits", "n_qubits", overlay, "register width");
    overlay_option<std::uint64_t>(app, "--pair-seed", "pair_seed", overlay, "seed of the state-pair circuit");
    overlay_option<int>(app, "--prep-depth", "prep_depth", overlay, "layers in the random preparation circuit");
    overlay_option<std::vector<int>>(app, "--m-schedule", "m_schedule", overlay, "magnifications, e.g. 1,2,4,8")
        ->delimiter(',');
    overlay_option<std::vector<int>>(app, "--ladder", "ladder", overlay, "ladder magnifications, starting at 1")
        ->delimiter(',');
    overlay_option<double>(app, "--a", "a", overlay, "window parameter in (0, 1)");
    overlay_option<int>(app, "--T", "T", overlay, "summation range");
    overlay_option<std::size_t>(app, "--grid-points", "grid_points", overlay, "points on [0, 2 pi)");
    overlay_option<std::string>(app, "--mode", "mode", overlay, "exact | hadamard | probability");
    overlay_option<std::string>(app, "--initial", "initial", overlay, "psi | psi_perp | y_minus");
    overlay_option<int>(app, "--n-shot", "n_shot", overlay, "shots per circuit (0 = exact)");
    overlay_option<std::uint64_t>(app, "--seed", "seed", overlay, "sampling seed");
    overlay_option<std::vector<double>>(app, "--eps", "eps_list", overlay, "noise rates, e.g. 0,1e-3")
        ->delimiter(',');
    overlay_option<int>(app, "--trajectories", "trajectories", overlay, "noise trajectories");
    overlay_option<int>(app, "--repetitions", "repetitions", overlay, "seeded repetitions");
}

qaef::ExperimentConfig resolve_config(const std::string& experiment, const std::string& config_file,
                                      const json& overlay, const std::string& out) {
    qaef::ExperimentConfig cfg = qaef::default_experiment_config(experiment);
    if (!config_file.empty()) {
        json file;
        try {
            file = json::parse(qaef::read_text_file(config_file));
        } catch (const json::exception& e) {
            throw qaef::config_error(std::string("cannot parse ") + config_file + ": " + e.what());
        } catch (const std::runtime_error& e) {
            throw qaef::config_error(e.what());
        }
        qaef::apply_json(cfg, file);
        if (cfg.experiment != qaef::canonical_experiment(experiment))
            throw qaef::config_error("config file names experiment " + cfg.experiment);
    }
    qaef::apply_json(cfg, overlay);
    if (!out.empty()) cfg.output_dir = out;
    cfg.validate();
    return cfg;
}

int run_validate() {
    bool ok = true;
    for (const auto& r : qaef::oracle::run_validation_suite()) {
        std::printf("%s  %-34s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        ok = ok && r.passed;
    }
    return ok ? 0 : kPipelineError;
}

struct ObservableArgs {
    std::string file;
    std::string state = "demo";
    double theta = 0.595;
    std::uint64_t state_seed = 7;
    int depth = 8;
    std::string mode = "probability";
    double a = 1.0 / (20.0 * std::numbers::sqrt2);
    int T = 60;
    int n_shot = 0;
    std::uint64_t seed = 1;
    std::vector<int> ladder{1, 2, 4, 8};
};

int run_observable(const ObservableArgs& args) {
    qaef::ObservableSpec obs;
    qaef::StatePrep psi;
    qaef::AcquisitionConfig acq;
    try {
        obs = qaef::parse_observable(qaef::read_text_file(args.file));
        if (args.state == "demo") {
            if (obs.n_qubits() != 6) throw qaef::config_error("the demo state has 6 qubits");
            psi = qaef::observable_demo_state(args.theta);
        } else if (args.state == "random") {
            qaef::Rng rng(args.state_seed);
            psi = {qaef::random_circuit(obs.n_qubits(), args.depth, rng), "random"};
        } else {
            throw qaef::config_error("--state must be demo or random");
        }
        acq.mode = qaef::parse_acquisition_mode(args.mode);
        acq.window.a = args.a;
        acq.T = args.T;
        acq.n_shot = acq.mode == qaef::AcquisitionMode::exact_overlap ? 0 : args.n_shot;
        if (acq.sampled()) acq.seed = args.seed;
        acq.validate();
        if (args.ladder.empty() || args.ladder.front() != 1) throw qaef::config_error("ladder must start at m = 1");
    } catch (const qaef::config_error&) {
        throw;
    } catch (const std::exception& e) {
        throw qaef::config_error(e.what());
    }
    qaef::PauliEstimateOptions opt;
    opt.schedule = args.ladder;
    const qaef::ObservableEstimate est = qaef::estimate_observable(psi, obs, acq, opt);
    json out = {{"estimate", est.value}, {"exact", obs.expectation(psi.state())}, {"terms", json::array()}};
    for (std::size_t i = 0; i < est.terms.size(); ++i)
        out["terms"].push_back({{"coefficient", obs.terms[i].coefficient},
                                {"pauli", obs.terms[i].pauli.word()},
                                {"value", est.terms[i].value},
                                {"theta", est.terms[i].theta},
                                {"short_circuit", est.terms[i].short_circuit}});
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Amplitude and observable estimation from windowed Fourier spectra", "qaef"};
    app.set_version_flag("--version", qaef::VERSION);
    app.require_subcommand(1);

    json est_overlay = json::object();
    std::string est_config, est_out;
    auto* estimate = app.add_subcommand("estimate", "estimate theta and |<psi|phi>|^2 for one state pair");
    add_pipeline_options(estimate, est_overlay);
    estimate->add_option("--config", est_config, "JSON config file; flags override it");
    estimate->add_option("--out", est_out, "write artifacts and a manifest to this directory");

    ObservableArgs obs_args;
    auto* observable = app.add_subcommand("observable", "estimate sum_i c_i <psi|P_i|psi>");
    observable->add_option("file", obs_args.file, "observable file, one 'coefficient word' per line")->required();
    observable->add_option("--state", obs_args.state, "demo (6 qubits) or random")->capture_default_str();
    observable->add_option("--theta", obs_args.theta, "rotation angle of the demo state")->capture_default_str();
    observable->add_option("--state-seed", obs_args.state_seed, "seed of the random state")->capture_default_str();
    observable->add_option("--depth", obs_args.depth, "layers of the random state")->capture_default_str();
    observable->add_option("--mode", obs_args.mode, "probability | hadamard | exact")->capture_default_str();
    observable->add_option("--a", obs_args.a, "window parameter")->capture_default_str();
    observable->add_option("--T", obs_args.T, "summation range")->capture_default_str();
    observable->add_option("--n-shot", obs_args.n_shot, "shots per circuit (0 = exact)")->capture_default_str();
    observable->add_option("--seed", obs_args.seed, "sampling seed")->capture_default_str();
    observable->add_option("--ladder", obs_args.ladder, "ladder magnifications")->delimiter(',');

    json rep_overlay = json::object();
    std::string rep_id, rep_config, rep_out;
    auto* reproduce = app.add_subcommand("reproduce", "run a canned experiment and write its artifacts");
    reproduce->add_option("experiment", rep_id, "fig3 .. fig8 or custom")->required();
    add_pipeline_options(reproduce, rep_overlay);
    reproduce->add_option("--config", rep_config, "JSON config file; flags override it");
    reproduce->add_option("--out", rep_out, "output directory");

    double b_a = 0.0;
    long b_T = 0;
    std::vector<double> b_eps;
    auto* bounds = app.add_subcommand("bounds", "truncation error bounds for a Gaussian window");
    bounds->add_option("--a", b_a, "window parameter in (0, 1)")->required();
    bounds->add_option("--T", b_T, "summation range")->required();
    bounds->add_option("--eps", b_eps, "targets for the minimal T")->delimiter(',');

    app.add_subcommand("validate", "run the oracle equivalence suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (estimate->parsed()) {
            const qaef::ExperimentConfig cfg = resolve_config("custom", est_config, est_overlay, est_out);
            const nlohmann::json summary =
                est_out.empty() ? qaef::compute_experiment(cfg).summary : qaef::run_experiment(cfg).summary;
            std::cout << summary.dump(2) << "\n";
            return 0;
        }
        if (observable->parsed()) return run_observable(obs_args);
        if (reproduce->parsed()) {
            const qaef::ExperimentConfig cfg = resolve_config(rep_id, rep_config, rep_overlay, rep_out);
            const qaef::RunManifest man = qaef::run_experiment(cfg);
            std::cout << "wrote " << man.artifacts.size() + 1 << " files to " << qaef::resolve_output_dir(cfg).string()
                      << "\n"
                      << man.summary.dump(2) << "\n";
            return 0;
        }
        if (bounds->parsed()) {
            try {
                std::cout << qaef::bounds_report(b_a, b_T, b_eps).to_json().dump(2) << "\n";
            } catch (const std::invalid_argument& e) {
                throw qaef::config_error(e.what());
            }
            return 0;
        }
        return run_validate();
    } catch (const qaef::config_error& e) {
        std::cerr << "qaef: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "qaef: " << e.what() << "\n";
        return kPipelineError;
    }
}
