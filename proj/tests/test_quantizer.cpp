// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#include <doctest.h>

#include <cmath>

#include "qmimo/errors.hpp"
#include "qmimo/quantizer.hpp"
#include "qmimo/rng.hpp"

using namespace qmimo;

namespace {

// Distortion-minimizing step (in units of the per-dimension deviation) and
// the resulting linear gain, for 1..8 bits. Solved independently at high
// precision with an adaptive-quadrature integrand; frozen here.
constexpr double kOptStepOverSigma[8] = {1.59576912, 0.99568668, 0.58601942, 0.33520061,
                                         0.18813877, 0.10406301, 0.05686770, 0.03076242};
constexpr double kGain[8] = {0.79788456, 0.93869801, 0.98110160, 0.99421181,
                             0.99825086, 0.99947984, 0.99984782, 0.99995616};

} // namespace

TEST_SUITE("quantizer") {

TEST_CASE("optimal step and gain match the frozen table for 1..8 bits") {
    const double p = 1.0;
    const int n_tx = 64;
    const double sigma_r = std::sqrt(p / (2.0 * n_tx));
    for (int b = 1; b <= 8; ++b) {
        QuantizerModel m = build_quantizer(b, p, n_tx);
        CHECK(m.levels == (1 << b));
        CHECK(m.step / sigma_r == doctest::Approx(kOptStepOverSigma[b - 1]).epsilon(5e-6));
        CHECK(m.delta == doctest::Approx(kGain[b - 1]).epsilon(1e-7));
    }
}

TEST_CASE("one-bit gain is sqrt(2/pi) for any step") {
    for (double step : {0.01, 0.3, 1.0, 5.0}) {
        QuantizerModel m = build_quantizer(1, 1.0, 64, step);
        CHECK(m.delta == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-12));
    }
}

TEST_CASE("gain is scale-free: independent of power budget and antenna count") {
    QuantizerModel a = build_quantizer(3, 1.0, 64);
    QuantizerModel b = build_quantizer(3, 7.5, 16);
    CHECK(a.delta == doctest::Approx(b.delta).epsilon(1e-9));
}

TEST_CASE("gain increases strictly with resolution") {
    double prev = 0.0;
    for (int b = 1; b <= 10; ++b) {
        QuantizerModel m = build_quantizer(b, 1.0, 64);
        CHECK(m.delta > prev);
        CHECK(m.delta <= 1.0);
        prev = m.delta;
    }
}

TEST_CASE("output power meets the budget by construction") {
    // alpha is defined exactly so that n_tx * E|Q|^2 = P under the design
    // statistic; the second-moment factor must therefore invert alpha^2.
    for (int b : {1, 2, 4, 6}) {
        QuantizerModel m = build_quantizer(b, 2.0, 32);
        const double sigma_r = std::sqrt(m.total_power / (2.0 * m.n_tx));
        const double second_moment =
            2.0 * m.alpha * m.alpha * m.step * m.step *
            midrise_second_moment_factor(m.step, m.levels, sigma_r);
        CHECK(m.n_tx * second_moment == doctest::Approx(m.total_power).epsilon(1e-12));
    }
}

TEST_CASE("Monte Carlo agrees with the closed forms") {
    auto rng = substream(2024, 5);
    for (int b : {1, 3}) {
        QuantizerModel m = build_quantizer(b, 1.0, 64);
        BussgangEstimate est = estimate_bussgang_mc(m, 200000, rng);
        CHECK(std::abs(est.delta_hat - m.delta) / m.delta < 0.005);
        CHECK(std::abs(est.out_power - 1.0) < 0.01);
    }
}

TEST_CASE("quantization cells: zero maps to the positive half-step") {
    QuantizerModel m = build_quantizer(3, 1.0, 64);
    Eigen::VectorXcd x(1);
    x(0) = {0.0, 0.0};
    Eigen::VectorXcd q = quantize(x, m);
    CHECK(q(0).real() == doctest::Approx(m.alpha * m.step / 2).epsilon(1e-15));
    CHECK(q(0).imag() == doctest::Approx(m.alpha * m.step / 2).epsilon(1e-15));

    // a boundary value lands in the upper cell
    x(0) = {m.step, -m.step};
    q = quantize(x, m);
    CHECK(q(0).real() == doctest::Approx(1.5 * m.alpha * m.step).epsilon(1e-15));
    CHECK(q(0).imag() == doctest::Approx(-0.5 * m.alpha * m.step).epsilon(1e-15));
}

TEST_CASE("saturation clips to the outermost level") {
    QuantizerModel m = build_quantizer(2, 1.0, 64);
    Eigen::VectorXcd x(2);
    x << std::complex<double>(100.0, -100.0), std::complex<double>(1e9, 0.0);
    Eigen::VectorXcd q = quantize(x, m);
    const double top = m.alpha * m.step * (m.levels - 1) / 2.0;
    CHECK(q(0).real() == doctest::Approx(top));
    CHECK(q(0).imag() == doctest::Approx(-top));
    CHECK(q(1).real() == doctest::Approx(top));
}

TEST_CASE("quantization is a projection onto its output lattice") {
    QuantizerModel m = build_quantizer(3, 1.0, 16);
    auto rng = substream(5, 0);
    std::normal_distribution<double> n01(0.0, 1.0);
    Eigen::VectorXcd x(256);
    const double sigma_r = std::sqrt(1.0 / (2.0 * 16));
    for (int i = 0; i < 256; ++i)
        x(i) = std::complex<double>(3 * sigma_r * n01(rng), 3 * sigma_r * n01(rng));
    Eigen::VectorXcd q1 = quantize(x, m);
    // outputs sit on cell midpoints, so re-quantizing the unscaled lattice
    // values reproduces them exactly
    Eigen::VectorXcd q2 = quantize(q1 / m.alpha, m);
    CHECK(q1 == q2);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(build_quantizer(0, 1.0, 64), config_error);
    CHECK_THROWS_AS(build_quantizer(13, 1.0, 64), config_error);
    CHECK_THROWS_AS(build_quantizer(3, -1.0, 64), config_error);
    CHECK_THROWS_AS(build_quantizer(3, 1.0, 0), config_error);
    CHECK_THROWS_AS(build_quantizer(3, 1.0, 64, -0.5), config_error);
    QuantizerModel m = build_quantizer(3, 1.0, 64);
    auto rng = substream(1, 1);
    CHECK_THROWS_AS(estimate_bussgang_mc(m, 100, rng), std::invalid_argument);
}

TEST_CASE("tail probability endpoints") {
    CHECK(gaussian_q(0.0) == doctest::Approx(0.5));
    CHECK(gaussian_q(10.0) < 1e-20);
    CHECK(gaussian_q(-10.0) == doctest::Approx(1.0));
}

} // TEST_SUITE
