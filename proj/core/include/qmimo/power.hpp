// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#ifndef QMIMO_POWER_HPP
#define QMIMO_POWER_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace qmimo {

// Effective sub-channel gains feeding an allocator: the concatenated
// per-user effective-channel singular values and their owning user index.
struct SpectrumView {
    Eigen::VectorXd phi;      // singular values, >= 0
    std::vector<int> owner;   // same length; maps entries back to users
};

struct AllocationResult {
    Eigen::VectorXd omega;    // per-sub-channel powers, >= 0
    double mu_opt = 0.0;      // final water level
    int active = 0;           // count of nonzero omega
    double c1 = 0.0;
    double c2 = 0.0;
    double total = 0.0;       // sum of omega
    int iterations = 0;       // water-level evaluations performed
};

AllocationResult equal_allocation(int n, double p_total);

// Classical water-filling, exact active-set solve: sort by gain, close the
// weakest channel while its level would go negative, then
// omega = mu - noise_power / phi^2 on the survivors with sum = p_total.
AllocationResult waterfilling(const SpectrumView& spectrum, double noise_power, double p_total);

// Distortion-dependent constants of the quantization-aware allocator:
//   C1 = (delta - sqrt(4 - 3 delta^2)) / (2 delta (1 - delta^2))
//   C2 = delta (1 - delta^2) / sqrt(4 - 3 delta^2)
// with the analytic limits (-1, 0) at delta = 1.
std::pair<double, double> cqa_constants(double delta);

// Water level over the strongest n - p + 1 channels of the spectrum:
//   mu = [na^2 / (2 C2 S sum(phi^2))] * (1 - sqrt(1 + D)),
//   D  = (4 C2 / n^2) sum(phi^2) (-S + C1 sum(1/phi^2)),
// evaluated in the rationalized form that stays finite as C2 -> 0.
// A negative radicand 1 + D throws model_error (saturated regime: this
// SNR/gain combination is outside the quadratic rate model's validity).
double cqa_mu_opt(const SpectrumView& spectrum, int p, double snr, double c1, double c2);

// Quantization-aware active-set allocation. Sorts gains nonincreasing,
// pre-closes zero gains, then repeats: compute mu over the active prefix,
//   omega_m = C1 na / (S phi_m^2) + mu - mu^2 C2 S phi_m^2 / na,
// and while any active entry is negative close the weakest active channel.
// Stops when all active omega >= 0; restores the caller's ordering; scales
// down uniformly if the total overshoots p_total by more than 1e-9 relative.
// Throws infeasible_error when every channel closes, model_error when the
// water level saturates.
AllocationResult cqa_maas(const SpectrumView& spectrum, double snr, double delta, double p_total);

// sum_m log2(1 + (delta^2/N0) phi_m^2 w_m - (delta^2 (1-delta^2)/N0^2) phi_m^4 w_m^2),
// in bits. A nonpositive log argument throws model_error.
double objective_eq17(const Eigen::VectorXd& omega, const SpectrumView& spectrum, double delta,
                      double noise_power);

} // namespace qmimo

#endif
