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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qaef/spectrum.hpp"
#include "qaef/validation.hpp"
#include "test_util.hpp"

namespace qaef {
namespace {

const double kA = 1.0 / (20.0 * std::numbers::sqrt2);

Amplifier pair_amplifier(double theta, int n = 3, std::uint64_t seed = 5) {
    const auto [psi, phi] = oracle::theta_pair(n, theta, seed);
    return build_amplifier(psi, phi);
}

/// Series from an arbitrary f(t), windowed with `a`.
SignalSeries synthetic_series(const std::function<cplx(long)>& f, long T, double a = kA,
                              AcquisitionMode mode = AcquisitionMode::exact_overlap) {
    AcquisitionConfig c;
    c.mode = mode;
    c.window.a = a;
    c.T = static_cast<int>(T);
    SignalSeries s{c, {}};
    for (long t = -T; t <= T; ++t) s.samples.push_back({t, f(t), f(t) * c.window.weight(t)});
    return s;
}

SpectrumGrid exact_spectrum(const Amplifier& amp, int m, int T, InitialStateMode init = InitialStateMode::psi_default,
                            AcquisitionMode mode = AcquisitionMode::exact_overlap, double a = kA) {
    AcquisitionConfig c;
    c.mode = mode;
    c.m = m;
    c.T = T;
    c.window.a = a;
    c.initial = init;
    return compute_spectrum(acquire_series(amp, c), GridSpec::periodic());
}

TEST(Grid, PeriodicLayout) {
    const GridSpec g = GridSpec::periodic();
    EXPECT_EQ(g.size(), 6283u);
    EXPECT_TRUE(g.is_periodic());
    EXPECT_NEAR(g.step, 1e-3, 1e-7);
    EXPECT_NEAR(g.x(6282) + g.step, 2 * std::numbers::pi, 1e-12);
    const GridSpec open{0.0, 1.0, 0.25};
    EXPECT_EQ(open.size(), 5u);
    EXPECT_FALSE(open.is_periodic());
    EXPECT_THROW((GridSpec{0.0, 1.0, 0.0}.validate()), std::invalid_argument);
}

TEST(Grid, WrapAndCircularDistance) {
    EXPECT_NEAR(wrap_2pi(12.0), 12.0 - TWO_PI, 1e-12);
    EXPECT_NEAR(wrap_2pi(20.0), 20.0 - 3 * TWO_PI, 1e-12);
    EXPECT_NEAR(wrap_2pi(-0.5), TWO_PI - 0.5, 1e-12);
    EXPECT_NEAR(circular_distance(0.1, TWO_PI - 0.1), 0.2, 1e-12);
}

TEST(ComputeSpectrum, DeltaSeriesIsFlat) {
    const SpectrumGrid s = compute_spectrum(synthetic_series([](long t) { return t == 0 ? 1.0 : 0.0; }, 10),
                                            GridSpec::periodic(500));
    for (const auto& p : s.values) {
        EXPECT_EQ(p.s_re, 1.0);
        EXPECT_EQ(p.s_im, 0.0);
    }
    EXPECT_THROW(find_peaks(s, false), no_peak_error);
}

TEST(ComputeSpectrum, EmptySeriesRejected) {
    AcquisitionConfig c;
    EXPECT_THROW(compute_spectrum(SignalSeries{c, {}}, GridSpec::periodic()), std::invalid_argument);
}

TEST(ComputeSpectrum, HermitianInputGivesRealSpectrum) {
    Rng rng(89);
    for (int k = 0; k < 5; ++k) {
        const Amplifier a = build_amplifier({random_circuit(3, 4, rng), "a"}, {random_circuit(3, 4, rng), "b"});
        const SpectrumGrid s = exact_spectrum(a, 1 + k, 60);
        for (const auto& p : s.values) ASSERT_LT(std::abs(p.s_im), 1e-8);
    }
}

TEST(ComputeSpectrum, ProbabilitySpectrumIsEven) {
    const Amplifier a = pair_amplifier(0.595);
    const SpectrumGrid s =
        exact_spectrum(a, 3, 60, InitialStateMode::psi_default, AcquisitionMode::direct_probability);
    const std::size_t n = s.values.size();
    for (std::size_t i = 1; i < n; ++i) {
        ASSERT_NEAR(s.values[i].s_re, s.values[n - i].s_re, 1e-8);
        ASSERT_LT(std::abs(s.values[i].s_im), 1e-8);
    }
}

TEST(ComputeSpectrum, ClosedFormWithinCutoffBound) {
    const Amplifier a = pair_amplifier(0.6);
    const SpectrumGrid s = exact_spectrum(a, 5, 60);
    const double bound = 2.0 / kA * std::exp(-std::pow(kA * 60, 2));
    double worst = 0.0;
    for (const auto& p : s.values) worst = std::max(worst, std::abs(p.s_re - periodic_spectrum_overlap(0.6, 5, kA, p.x)));
    EXPECT_LE(worst, bound);
}

TEST(ComputeSpectrum, SingleStepIdentity) {
    const Amplifier a = pair_amplifier(0.6);
    const SpectrumGrid s = exact_spectrum(a, 2, 1, InitialStateMode::y_minus_exact);
    for (const auto& p : s.values)
        ASSERT_NEAR(p.s_re, 1.0 + 2.0 * std::exp(-kA * kA) * std::cos(p.x - 2.4), 1e-12);
}

TEST(ClosedForm, OverlapShape) {
    const double peak = analytic_spectrum_overlap(0.6, 3, kA, 3.6);
    EXPECT_GE(peak, std::sqrt(std::numbers::pi) / (2 * kA));
    EXPECT_LT(analytic_spectrum_overlap(0.6, 3, kA, 50.0), 1e-300);
    EXPECT_LT(analytic_spectrum_overlap(0.6, 3, kA, -50.0), 1e-300);
}

TEST(ClosedForm, OverlapAgreesWithPartialSums) {
    const double want = std::sqrt(std::numbers::pi) / (2 * kA) * (1.0 + std::exp(-4.8 * 4.8 / (4 * kA * kA)));
    EXPECT_NEAR(analytic_spectrum_overlap(0.6, 2, kA, 2.4), want, 1e-12);
    const auto f = [](long t) { return cplx(std::cos(2.4 * static_cast<double>(t))); };
    for (double x : {2.4, 2.41, 2.3, 1.0})
        EXPECT_NEAR(oracle::partial_sum_spectrum(f, kA, 200, x).real(), analytic_spectrum_overlap(0.6, 2, kA, x), 1e-9)
            << x;
}

TEST(ClosedForm, ProbabilityAgreesWithPartialSums) {
    const double c = 4 * 3 * 0.595;
    const auto f = [](long t) { return cplx(std::pow(std::cos(2 * 3 * 0.595 * static_cast<double>(t)), 2)); };
    for (double x : {c, c + 0.02, 0.0, 3.0})
        EXPECT_NEAR(oracle::partial_sum_spectrum(f, kA, 200, x).real(),
                    periodic_spectrum_probability(0.595, 3, kA, x), 1e-9)
            << x;
    EXPECT_NEAR(oracle::partial_sum_spectrum(f, kA, 200, c).real(), analytic_spectrum_probability(0.595, 3, kA, c),
                1e-9);
    // Central peak: 2 G(0) dominates.
    EXPECT_NEAR(analytic_spectrum_probability(1.0, 3, kA, 0.0), std::sqrt(std::numbers::pi) / (2 * kA), 1e-9);
}

TEST(ClosedForm, YMinusAgreesWithPartialSums) {
    const auto f = [](long t) { return std::polar(1.0, -1.8 * static_cast<double>(t)); };
    for (double x : {1.8, 1.85, 4.0})
        EXPECT_NEAR(oracle::partial_sum_spectrum(f, kA, 200, x).real(), periodic_spectrum_y_minus(0.3, 3, kA, x), 1e-9);
}

TEST(FindPeaks, OverlapPeakAtTwoMTheta) {
    const Amplifier a = pair_amplifier(0.6);
    const SpectrumGrid s = exact_spectrum(a, 10, 60);
    const auto peaks = find_peaks(s, false);
    ASSERT_GE(peaks.size(), 2u);
    const double want = wrap_2pi(12.0);
    const double best = std::min(circular_distance(peaks[0].x_peak, want), circular_distance(peaks[1].x_peak, want));
    EXPECT_LT(best, 2e-3);
    for (const auto& p : peaks) {
        EXPECT_GT(p.height, 0.0);
        EXPECT_EQ(p.m_used, 10);
        EXPECT_GE(p.theta_hat, 0.0);
        EXPECT_LE(p.theta_hat, std::numbers::pi / 2);
        EXPECT_TRUE(p.aliased);
    }
}

TEST(FindPeaks, FlatSeriesHasNoPeak) {
    const SpectrumGrid s = compute_spectrum(synthetic_series([](long) { return 0.0; }, 20), GridSpec::periodic(1000));
    EXPECT_THROW(find_peaks(s, false), no_peak_error);
}

TEST(FindPeaks, SyntheticTwoTones) {
    const double c1 = 1.0, c2 = 3.7;
    const SpectrumGrid s = compute_spectrum(
        synthetic_series(
            [&](long t) {
                const double td = static_cast<double>(t);
                return std::polar(1.0, -c1 * td) + 0.6 * std::polar(1.0, -c2 * td);
            },
            80),
        GridSpec::periodic());
    const auto peaks = find_peaks(s, false);
    ASSERT_EQ(peaks.size(), 2u);
    EXPECT_LE(std::abs(peaks[0].x_peak - c1), s.grid.step / 2);
    EXPECT_LE(std::abs(peaks[1].x_peak - c2), s.grid.step / 2);
    EXPECT_GT(peaks[0].height, peaks[1].height);
}

TEST(FindPeaks, ProbabilityModeExcludesCentralPeak) {
    const Amplifier a = pair_amplifier(0.595);
    const SpectrumGrid s =
        exact_spectrum(a, 3, 60, InitialStateMode::psi_default, AcquisitionMode::direct_probability);
    const auto all = find_peaks(s, false);
    bool central = false;
    for (const auto& p : all) central |= circular_distance(p.x_peak, 0.0) < 3 * kA;
    EXPECT_TRUE(central);
    const auto kept = find_peaks(s, true);
    for (const auto& p : kept) EXPECT_GE(circular_distance(p.x_peak, 0.0), 3 * kA);
    const double want = wrap_2pi(4 * 3 * 0.595);
    double best = 10.0;
    for (const auto& p : kept) best = std::min(best, circular_distance(p.x_peak, want));
    EXPECT_LT(best, 2e-3);
}

TEST(FindPeaks, NeedsThreePoints) {
    SpectrumGrid s;
    s.values = {{0.0, 1.0, 0.0}, {1.0, 2.0, 0.0}};
    EXPECT_THROW(find_peaks(s, false), std::invalid_argument);
}

TEST(NoiseFloor, ConstantAndCapped) {
    std::vector<SpectrumPoint> flat(100, SpectrumPoint{0.0, 3.0, 0.0});
    EXPECT_EQ(noise_floor(flat), 3.0);
    std::vector<SpectrumPoint> v;
    for (int i = 0; i < 100; ++i) v.push_back({0.0, static_cast<double>(i), 0.0});
    const double f = noise_floor(v);
    EXPECT_LT(f, 99.0);
    EXPECT_GE(f, 49.5);
}

TEST(ExtractTheta, Examples) {
    PeakEstimate p;
    p.x_peak = 1.2;
    EXPECT_NEAR(extract_theta(std::vector{p}, 1, false), 0.6, 1e-12);
    p.x_peak = 0.0;
    EXPECT_EQ(extract_theta(std::vector{p}, 1, false), 0.0);

    p.x_peak = wrap_2pi(4 * 5 * 0.595);
    EXPECT_THROW(extract_theta(std::vector{p}, 5, true), ambiguous_unwrap);
    ExtractOptions opt;
    opt.prior = ThetaInterval{0.58, 0.61};
    EXPECT_NEAR(extract_theta(std::vector{p}, 5, true, opt), 0.595, 1e-12);
    opt.prior = ThetaInterval{0.2, 0.21};
    EXPECT_THROW(extract_theta(std::vector{p}, 5, true, opt), ambiguous_unwrap);
    EXPECT_THROW(extract_theta(std::vector<PeakEstimate>{}, 1, false), std::invalid_argument);
}

TEST(ThetaCandidates, AllBranchesReproduceThePeak) {
    for (int m : {1, 3, 7, -2}) {
        for (bool prob : {false, true}) {
            const double x = 2.345;
            const double factor = prob ? 4.0 : 2.0;
            for (double th : theta_candidates(x, m, prob, true, std::numbers::pi / 2)) {
                const double y = wrap_2pi(factor * m * th);
                EXPECT_TRUE(circular_distance(y, x) < 1e-9 || circular_distance(y, wrap_2pi(-x)) < 1e-9);
            }
        }
    }
    EXPECT_THROW(theta_candidates(1.0, 0, false, true, 1.0), std::invalid_argument);
}

TEST(ExtractTheta, ReproducesTruthAcrossMagnifications) {
    const double theta = 0.6;
    const Amplifier a = pair_amplifier(theta);
    for (int m = 1; m <= 12; ++m) {
        const SpectrumGrid s = exact_spectrum(a, m, 60);
        auto peaks = find_peaks(s, false);
        peaks.front().x_peak = refine_mirrored_peak(s, peaks.front().x_peak);
        ExtractOptions opt;
        opt.prior = ThetaInterval{theta - 0.5 / m, theta + 0.5 / m};
        const double got = extract_theta(peaks, m, false, opt);
        EXPECT_LE(std::abs(got - theta), 2 * s.grid.step / (2 * m)) << m;
    }
}

TEST(RefineMirroredPeak, SeparatesMergedPair) {
    for (double theta : {0.02, 0.035, std::numbers::pi / 2 - 0.03}) {
        const Amplifier a = pair_amplifier(theta, 2, 3);
        const SpectrumGrid s = exact_spectrum(a, 1, 60);
        const auto peaks = find_peaks(s, false);
        const double x = refine_mirrored_peak(s, peaks.front().x_peak);
        const double want = 2 * theta;
        EXPECT_LT(std::min(circular_distance(x, want), circular_distance(x, -want)), 2e-3) << theta;
    }
}

TEST(RefineMirroredPeak, LeavesIsolatedPeaksAlone) {
    const Amplifier a = pair_amplifier(0.6);
    const SpectrumGrid s = exact_spectrum(a, 1, 60);
    EXPECT_EQ(refine_mirrored_peak(s, 1.2), 1.2);
    const SpectrumGrid y = exact_spectrum(a, 1, 60, InitialStateMode::y_minus_exact);
    EXPECT_EQ(refine_mirrored_peak(y, 0.01), 0.01);
}

TEST(Truncation, ArgmaxStableAndHeightsFall) {
    const double a10 = 1.0 / (10.0 * std::numbers::sqrt2);
    const Amplifier amp = pair_amplifier(0.6);
    std::vector<double> xs, hs;
    for (int T : {20, 10, 5, 2, 1}) {
        const SpectrumGrid s =
            exact_spectrum(amp, 1, T, InitialStateMode::y_minus_exact, AcquisitionMode::exact_overlap, a10);
        const auto peaks = find_peaks(s, false);
        xs.push_back(peaks.front().x_peak);
        hs.push_back(peaks.front().height);
    }
    const double step = GridSpec::periodic().step;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        EXPECT_LT(std::abs(xs[i] - xs[0]), 2 * step);
        if (i > 0) {
            EXPECT_LT(hs[i], hs[i - 1]);
        }
    }
}

TEST(Ladder, RecoversAngleWithTightInterval) {
    const Amplifier a = pair_amplifier(0.6);
    const std::vector<int> schedule{1, 2, 4, 8};
    const LadderResult r = ladder_refine(a, schedule, AcquisitionConfig{});
    EXPECT_LE(std::abs(r.theta - 0.6), 1e-4 / 16);
    EXPECT_LE(r.half_width, GridSpec::periodic().step / 16 + 1e-15);
    ASSERT_EQ(r.rungs.size(), 4u);
    EXPECT_FALSE(r.alternate);
}

TEST(Ladder, ZeroAngleStaysAtZero) {
    Rng rng(97);
    const StatePrep p{random_circuit(3, 4, rng), "p"};
    const std::vector<int> schedule{1, 2, 4};
    const LadderResult r = ladder_refine(build_amplifier(p, p), schedule, AcquisitionConfig{});
    for (const auto& rung : r.rungs) EXPECT_EQ(rung.theta, 0.0);
    EXPECT_EQ(r.theta, 0.0);
}

TEST(Ladder, LargeAngleUnwraps) {
    const Amplifier a = pair_amplifier(1.5);
    const std::vector<int> schedule{1, 3, 9};
    const LadderResult r = ladder_refine(a, schedule, AcquisitionConfig{});
    EXPECT_LE(std::abs(r.theta - 1.5), 2 * r.half_width);
}

TEST(Ladder, ProbabilityModeReportsAlternate) {
    const Amplifier a = pair_amplifier(0.3);
    AcquisitionConfig c;
    c.mode = AcquisitionMode::direct_probability;
    const std::vector<int> schedule{1, 2, 4, 8};
    const LadderResult r = ladder_refine(a, schedule, c);
    EXPECT_LE(std::abs(r.theta - 0.3), 4 * r.half_width);
    ASSERT_TRUE(r.alternate);
    EXPECT_NEAR(*r.alternate, std::numbers::pi / 2 - r.theta, 1e-15);
}

TEST(Ladder, ScheduleValidation) {
    const Amplifier a = pair_amplifier(0.6);
    EXPECT_THROW(ladder_refine(a, std::vector<int>{2, 4}, AcquisitionConfig{}), std::invalid_argument);
    EXPECT_THROW(ladder_refine(a, std::vector<int>{1, 4, 4}, AcquisitionConfig{}), std::invalid_argument);
    EXPECT_THROW(ladder_refine(a, std::vector<int>{}, AcquisitionConfig{}), std::invalid_argument);
}

TEST(Ladder, SampledHadamardRungsAgree) {
    const Amplifier a = pair_amplifier(0.45, 2, 17);
    AcquisitionConfig c;
    c.mode = AcquisitionMode::hadamard_test;
    c.n_shot = 400;
    c.seed = 2026;
    const std::vector<int> schedule{1, 2, 4};
    const LadderResult r = ladder_refine(a, schedule, c);
    EXPECT_LE(std::abs(r.theta - 0.45), 5e-3);
}

}  // namespace
}  // namespace qaef
