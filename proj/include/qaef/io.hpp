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
 * CSV and JSON serialization. Reals are written with 17 significant digits
 * so every double round-trips exactly.
 */

#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qaef/acquire.hpp"
#include "qaef/noise_study.hpp"
#include "qaef/spectrum.hpp"

namespace qaef {

inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Inverse of format_real. Subnormals parse to their value; std::stod
/// would reject them with ERANGE.
inline double parse_real(const std::string& s) {
    if (s.empty() || std::isspace(static_cast<unsigned char>(s.front())))
        throw std::invalid_argument("parse_real: not a number: '" + s + "'");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw std::invalid_argument("parse_real: not a number: '" + s + "'");
    if (end != s.c_str() + s.size()) throw std::invalid_argument("parse_real: trailing characters in '" + s + "'");
    return v;
}

inline nlohmann::json to_json(const AcquisitionConfig& c) {
    nlohmann::json j;
    j["mode"] = std::string(to_string(c.mode));
    j["m"] = c.m;
    j["T"] = c.T;
    j["a"] = c.window.a;
    j["n_shot"] = c.n_shot;
    j["seed"] = c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr);
    j["initial"] = std::string(to_string(c.initial));
    j["epsilon"] = c.noise ? c.noise->epsilon : 0.0;
    if (c.noise) {
        j["trajectories"] = c.noise->trajectories;
        j["noise_seed"] = c.noise->seed;
    }
    j["infer_imaginary"] = c.infer_imaginary;
    return j;
}

inline AcquisitionConfig acquisition_config_from_json(const nlohmann::json& j) {
    AcquisitionConfig c;
    c.mode = parse_acquisition_mode(j.at("mode").get<std::string>());
    c.m = j.at("m").get<int>();
    c.T = j.at("T").get<int>();
    c.window.a = j.at("a").get<double>();
    c.n_shot = j.value("n_shot", 0);
    if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::uint64_t>();
    c.initial = parse_initial_state_mode(j.value("initial", std::string("psi_default")));
    if (j.contains("trajectories") || j.value("epsilon", 0.0) > 0.0) {
        NoiseConfig n;
        n.epsilon = j.value("epsilon", 0.0);
        n.trajectories = j.value("trajectories", n.trajectories);
        n.seed = j.value("noise_seed", std::uint64_t{0});
        c.noise = n;
    }
    c.infer_imaginary = j.value("infer_imaginary", false);
    return c;
}

/// Columns t, raw_re, raw_im, windowed_re, windowed_im.
inline std::string series_csv(const SignalSeries& s) {
    std::string out = "t,raw_re,raw_im,windowed_re,windowed_im\n";
    for (const auto& p : s.samples) {
        out += std::to_string(p.t) + ',' + format_real(p.raw.real()) + ',' + format_real(p.raw.imag()) + ',' +
               format_real(p.windowed.real()) + ',' + format_real(p.windowed.imag()) + '\n';
    }
    return out;
}

inline SignalSeries parse_series_csv(const std::string& csv, const AcquisitionConfig& config) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != "t,raw_re,raw_im,windowed_re,windowed_im")
        throw std::invalid_argument("series csv: bad header");
    SignalSeries s{config, {}};
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 5) throw std::invalid_argument("series csv: expected 5 columns");
        s.samples.push_back({std::stol(f[0]),
                             {parse_real(f[1]), parse_real(f[2])},
                             {parse_real(f[3]), parse_real(f[4])}});
    }
    return s;
}

inline std::string spectrum_csv(const SpectrumGrid& g) {
    std::string out = "x,s_re,s_im\n";
    for (const auto& p : g.values)
        out += format_real(p.x) + ',' + format_real(p.s_re) + ',' + format_real(p.s_im) + '\n';
    return out;
}

inline nlohmann::json to_json(const PeakEstimate& p) {
    return {{"x_peak", p.x_peak}, {"height", p.height}, {"theta_hat", p.theta_hat},
            {"m_used", p.m_used}, {"half_width", p.half_width}, {"aliased", p.aliased}};
}

inline nlohmann::json peaks_json(const std::vector<PeakEstimate>& peaks) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& p : peaks) j.push_back(to_json(p));
    return j;
}

inline std::string noise_summary_csv(const std::vector<NoiseSummaryRow>& rows) {
    std::string out = "epsilon,x_peak,height,height_stderr\n";
    for (const auto& r : rows)
        out += format_real(r.epsilon) + ',' + format_real(r.x_peak) + ',' + format_real(r.height) + ',' +
               format_real(r.height_stderr) + '\n';
    return out;
}

inline std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Creates parent directories as needed.
inline void write_text_file(const std::filesystem::path& p, const std::string& content) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + p.string());
}

/// `<path>` holds the CSV, `<path>.json` the acquisition metadata.
inline void write_series(const std::filesystem::path& csv_path, const SignalSeries& s) {
    write_text_file(csv_path, series_csv(s));
    write_text_file(csv_path.string() + ".json", to_json(s.config).dump(2) + "\n");
}

inline SignalSeries read_series(const std::filesystem::path& csv_path) {
    const auto meta = nlohmann::json::parse(read_text_file(csv_path.string() + ".json"));
    return parse_series_csv(read_text_file(csv_path), acquisition_config_from_json(meta));
}

/// FNV-1a, 64 bit.
inline std::uint64_t content_hash(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace qaef
