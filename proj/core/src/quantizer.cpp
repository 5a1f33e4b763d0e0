// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#include "qmimo/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qmimo/errors.hpp"

namespace qmimo {

namespace {

constexpr double kPi = 3.14159265358979323846;

// E[(x - gamma_scaled midrise(x))^2] for x ~ N(0, sigma^2), closed form.
// With unscaled output q(x) = gamma (k - (J-1)/2), Stein's identity turns
// the cross term into a density sum over the J-1 jump points:
//   D(gamma) = sigma^2 - 2 E[x q(x)] + gamma^2 B(gamma)
//   E[x q(x)] = gamma sigma / sqrt(2 pi) * sum_{l=1}^{J-1} exp(-gamma^2 (l - J/2)^2 / (2 sigma^2))
double midrise_mse(double gamma, int levels, double sigma) {
    const int half = levels / 2;
    double s_exp = 0.0;
    for (int l = 1; l < levels; ++l) {
        double t = gamma * (l - half) / sigma;
        s_exp += std::exp(-0.5 * t * t);
    }
    double exq = gamma * sigma / std::sqrt(2.0 * kPi) * s_exp;
    double b = midrise_second_moment_factor(gamma, levels, sigma);
    return sigma * sigma - 2.0 * exq + gamma * gamma * b;
}

} // namespace

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double midrise_second_moment_factor(double gamma, int levels, double sigma) {
    const int half = levels / 2;
    double c = (levels - 1) / 2.0;
    double b = c * c;
    for (int l = 1; l < levels; ++l)
        b += 2.0 * (l - half) * gaussian_q(gamma * (l - half) / sigma);
    return b;
}

double normalization_alpha(double gamma, int levels, int n_tx, double total_power) {
    const double sigma_r = std::sqrt(total_power / (2.0 * n_tx));
    double b = midrise_second_moment_factor(gamma, levels, sigma_r);
    return std::sqrt(total_power / (2.0 * n_tx * gamma * gamma * b));
}

double bussgang_delta(double gamma, int levels, int n_tx, double total_power, double alpha) {
    const int half = levels / 2;
    const double beta = n_tx * gamma * gamma / total_power;
    double s_exp = 0.0;
    for (int l = 1; l < levels; ++l)
        s_exp += std::exp(-beta * (l - half) * (l - half));
    return alpha * gamma * std::sqrt(n_tx / (kPi * total_power)) * s_exp;
}

double mse_optimal_step(int levels, double sigma_r) {
    double lo = 1e-3 * sigma_r;
    double hi = 10.0 * sigma_r;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = midrise_mse(x1, levels, sigma_r);
    double f2 = midrise_mse(x2, levels, sigma_r);
    while ((hi - lo) > 1e-6 * sigma_r) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = midrise_mse(x1, levels, sigma_r);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = midrise_mse(x2, levels, sigma_r);
        }
    }
    return 0.5 * (lo + hi);
}

QuantizerModel build_quantizer(int bits, double total_power, int n_tx,
                               const StepPolicy& policy) {
    if (bits < 1 || bits > 12) throw config_error("quantizer bits must lie in [1, 12]");
    if (!(total_power > 0)) throw config_error("total_power must be positive");
    if (n_tx < 1) throw config_error("n_tx must be >= 1");

    QuantizerModel m;
    m.bits = bits;
    m.levels = 1 << bits;
    m.total_power = total_power;
    m.n_tx = n_tx;

    const double sigma_r = std::sqrt(total_power / (2.0 * n_tx));
    if (std::holds_alternative<MseOptimalStep>(policy)) {
        m.step = mse_optimal_step(m.levels, sigma_r);
    } else {
        m.step = std::get<double>(policy);
        if (!(m.step > 0)) throw config_error("quantizer step must be positive");
    }
    m.alpha = normalization_alpha(m.step, m.levels, n_tx, total_power);
    m.delta = bussgang_delta(m.step, m.levels, n_tx, total_power, m.alpha);
    return m;
}

Eigen::VectorXcd quantize(const Eigen::VectorXcd& x, const QuantizerModel& model) {
    const int j = model.levels;
    const double g = model.step;
    const double center = (j - 1) / 2.0;
    auto q1 = [&](double v) {
        double cell = std::floor(v / g) + j / 2;
        cell = std::clamp(cell, 0.0, static_cast<double>(j - 1));
        return model.alpha * g * (cell - center);
    };
    Eigen::VectorXcd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        out(i) = std::complex<double>(q1(x(i).real()), q1(x(i).imag()));
    return out;
}

BussgangEstimate estimate_bussgang_mc(const QuantizerModel& model, std::int64_t n_samples,
                                      std::mt19937_64& rng) {
    if (n_samples < 10000)
        throw std::invalid_argument("Bussgang estimate needs at least 1e4 samples");
    std::normal_distribution<double> n01(0.0, 1.0);
    const double sigma_r = std::sqrt(model.total_power / (2.0 * model.n_tx));
    double cross = 0.0, in_pow = 0.0, out_pow = 0.0;
    constexpr std::int64_t kBlock = 8192;
    Eigen::VectorXcd x(kBlock);
    std::int64_t left = n_samples;
    while (left > 0) {
        const std::int64_t n = std::min(left, kBlock);
        for (std::int64_t i = 0; i < n; ++i)
            x(i) = std::complex<double>(sigma_r * n01(rng), sigma_r * n01(rng));
        const Eigen::VectorXcd q = quantize(x.head(n), model);
        cross += (x.head(n).adjoint() * q).real()(0, 0);
        in_pow += x.head(n).squaredNorm();
        out_pow += q.squaredNorm();
        left -= n;
    }
    BussgangEstimate est;
    est.delta_hat = cross / in_pow;
    est.out_power = model.n_tx * out_pow / static_cast<double>(n_samples);
    return est;
}

} // namespace qmimo
