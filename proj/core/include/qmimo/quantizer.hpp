// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#ifndef QMIMO_QUANTIZER_HPP
#define QMIMO_QUANTIZER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <variant>

namespace qmimo {

// Memoryless uniform midrise DAC acting independently on each real
// dimension, linearized as Q(x) ~ delta * x + uncorrelated distortion.
// The design input statistic is a complex Gaussian with per-antenna
// variance P / n_tx, i.e. sigma_r^2 = P / (2 n_tx) per real dimension.
struct QuantizerModel {
    int bits = 1;
    int levels = 2;          // J = 2^bits
    double step = 1.0;       // gamma, per real dimension, in input units
    double total_power = 1.0;
    int n_tx = 1;
    double alpha = 1.0;      // output scaling meeting the power budget
    double delta = 1.0;      // Bussgang gain, in (0, 1]
};

// Tag requesting the distortion-minimizing step for the design statistic.
struct MseOptimalStep {};

// Either an explicit step gamma > 0 or the mse-optimal policy.
using StepPolicy = std::variant<MseOptimalStep, double>;

// Gaussian tail probability Q(x) = P[N(0,1) > x].
double gaussian_q(double x);

// Uniform midrise second moment divided by gamma^2 for N(0, sigma^2) input:
// ((J-1)/2)^2 + 2 sum_{l=1}^{J-1} (l - J/2) Q(gamma (l - J/2) / sigma).
double midrise_second_moment_factor(double gamma, int levels, double sigma);

// Output scaling so that E ||alpha Q(x)||^2 = P over n_tx antennas.
double normalization_alpha(double gamma, int levels, int n_tx, double total_power);

// Closed-form Bussgang gain:
// delta = alpha gamma sqrt(n_tx / (pi P)) sum_{l=1}^{J-1} exp(-(n_tx gamma^2 / P)(l - J/2)^2).
double bussgang_delta(double gamma, int levels, int n_tx, double total_power, double alpha);

// Step minimizing E[(x - Q(x))^2] for x ~ N(0, sigma_r^2), golden-section
// search on [1e-3 sigma_r, 10 sigma_r] to relative tolerance 1e-6.
double mse_optimal_step(int levels, double sigma_r);

// Assembles the model; bits outside [1, 12] are refused (beyond 12 bits the
// gain is indistinguishable from 1 and the level sums only burn cycles).
QuantizerModel build_quantizer(int bits, double total_power, int n_tx,
                               const StepPolicy& policy = MseOptimalStep{});

// Element-wise midrise quantization of both real dimensions, clipping to the
// outermost level, output scaled by alpha. A value exactly on a decision
// boundary maps to the upper cell, so 0 lands on the positive half-step.
Eigen::VectorXcd quantize(const Eigen::VectorXcd& x, const QuantizerModel& model);

struct BussgangEstimate {
    double delta_hat = 0.0;  // Re E[x^* Q(x)] / E[|x|^2]
    double out_power = 0.0;  // n_tx * E[|Q(x)|^2]
};

// Monte Carlo oracle for delta and the power normalization; draws n_samples
// complex Gaussians at the design variance. Requires n_samples >= 1e4.
BussgangEstimate estimate_bussgang_mc(const QuantizerModel& model, std::int64_t n_samples,
                                      std::mt19937_64& rng);

} // namespace qmimo

#endif
