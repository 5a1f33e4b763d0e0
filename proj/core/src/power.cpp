// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#include "qmimo/power.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qmimo/errors.hpp"

namespace qmimo {

namespace {

// Water level over the first na entries of a descending gain array phi2,
// n = full spectrum length. Rationalized so the C2 -> 0 limit needs no
// branch: mu = 2 na^2 (S - C1 si) / (S n^2 (1 + sqrt(1 + D))).
double mu_over_prefix(const std::vector<double>& phi2, int na, int n, double snr, double c1,
                      double c2) {
    double s2 = 0.0, si = 0.0;
    for (int i = 0; i < na; ++i) {
        s2 += phi2[i];
        si += 1.0 / phi2[i];
    }
    const double nn = static_cast<double>(n) * n;
    const double d = (4.0 * c2 / nn) * s2 * (-snr + c1 * si);
    const double rad = 1.0 + d;
    if (rad < 0)
        throw model_error("allocation water level saturated: the quadratic rate model is "
                          "outside its validity region at this SNR/gain combination");
    const double na2 = static_cast<double>(na) * na;
    return 2.0 * na2 * (snr - c1 * si) / (snr * nn * (1.0 + std::sqrt(rad)));
}

double omega_entry(double phi2, double mu, int na, double snr, double c1, double c2) {
    return c1 * na / (snr * phi2) + mu - mu * mu * c2 * snr * phi2 / na;
}

} // namespace

AllocationResult equal_allocation(int n, double p_total) {
    if (n < 1) throw std::invalid_argument("allocation needs at least one sub-channel");
    if (!(p_total > 0)) throw std::invalid_argument("power budget must be positive");
    AllocationResult r;
    r.omega = Eigen::VectorXd::Constant(n, p_total / n);
    r.mu_opt = p_total / n;
    r.active = n;
    r.total = p_total;
    return r;
}

AllocationResult waterfilling(const SpectrumView& spectrum, double noise_power, double p_total) {
    const int n = static_cast<int>(spectrum.phi.size());
    if (n < 1) throw std::invalid_argument("allocation needs at least one sub-channel");
    if (!(noise_power > 0)) throw std::invalid_argument("noise power must be positive");
    if (!(p_total > 0)) throw std::invalid_argument("power budget must be positive");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return spectrum.phi(a) > spectrum.phi(b);
    });

    std::vector<double> g(n);
    int nz = 0;
    for (int i = 0; i < n; ++i) {
        g[i] = spectrum.phi(order[i]) * spectrum.phi(order[i]);
        if (g[i] > 0) ++nz;
    }
    if (nz == 0) throw infeasible_error("every sub-channel gain is zero");

    AllocationResult r;
    r.omega = Eigen::VectorXd::Zero(n);
    int k = nz;
    double mu = 0.0;
    double inv_sum = 0.0;
    for (int i = 0; i < nz; ++i) inv_sum += 1.0 / g[i];
    while (k > 0) {
        ++r.iterations;
        mu = (p_total + noise_power * inv_sum) / k;
        if (mu - noise_power / g[k - 1] >= 0) break;
        inv_sum -= 1.0 / g[k - 1];
        --k;
    }
    if (k == 0) throw infeasible_error("water-filling closed every sub-channel");
    for (int i = 0; i < k; ++i) r.omega(order[i]) = mu - noise_power / g[i];
    r.mu_opt = mu;
    r.active = k;
    r.total = r.omega.sum();
    return r;
}

std::pair<double, double> cqa_constants(double delta) {
    if (!(delta > 0) || delta > 1.0)
        throw std::invalid_argument("Bussgang gain must lie in (0, 1]");
    const double root = std::sqrt(4.0 - 3.0 * delta * delta);
    // C1 in the form -2 / (delta (delta + root)) carries no 0/0 at delta = 1.
    const double c1 = -2.0 / (delta * (delta + root));
    const double c2 = delta * (1.0 - delta * delta) / root;
    return {c1, c2};
}

double cqa_mu_opt(const SpectrumView& spectrum, int p, double snr, double c1, double c2) {
    const int n = static_cast<int>(spectrum.phi.size());
    if (n < 1) throw std::invalid_argument("allocation needs at least one sub-channel");
    if (p < 1 || p > n) throw std::invalid_argument("iteration index p must lie in [1, n]");
    if (!(snr > 0)) throw std::invalid_argument("snr must be positive (linear scale)");

    std::vector<double> phi2(n);
    for (int i = 0; i < n; ++i) phi2[i] = spectrum.phi(i) * spectrum.phi(i);
    std::sort(phi2.begin(), phi2.end(), std::greater<double>());
    const int na = n - p + 1;
    for (int i = 0; i < na; ++i)
        if (!(phi2[i] > 0))
            throw std::invalid_argument("active sub-channel gains must be strictly positive");
    return mu_over_prefix(phi2, na, n, snr, c1, c2);
}

AllocationResult cqa_maas(const SpectrumView& spectrum, double snr, double delta,
                          double p_total) {
    const int n = static_cast<int>(spectrum.phi.size());
    if (n < 1) throw std::invalid_argument("allocation needs at least one sub-channel");
    if (!(snr > 0)) throw std::invalid_argument("snr must be positive (linear scale)");
    if (!(p_total > 0)) throw std::invalid_argument("power budget must be positive");

    auto [c1, c2] = cqa_constants(delta);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return spectrum.phi(a) > spectrum.phi(b);
    });
    std::vector<double> phi2(n);
    int nz = 0;
    for (int i = 0; i < n; ++i) {
        phi2[i] = spectrum.phi(order[i]) * spectrum.phi(order[i]);
        if (phi2[i] > 0) ++nz;
    }
    if (nz == 0) throw infeasible_error("every sub-channel gain is zero");

    AllocationResult r;
    r.c1 = c1;
    r.c2 = c2;
    r.omega = Eigen::VectorXd::Zero(n);

    int p = n - nz + 1;  // zero gains start closed
    std::vector<double> w;
    double mu = 0.0;
    while (true) {
        const int na = n - p + 1;
        if (na <= 0)
            throw infeasible_error("allocation closed every sub-channel; the budget cannot be "
                                   "placed at this SNR/spectrum combination");
        ++r.iterations;
        mu = mu_over_prefix(phi2, na, n, snr, c1, c2);
        w.assign(na, 0.0);
        bool any_negative = false;
        for (int i = 0; i < na; ++i) {
            w[i] = omega_entry(phi2[i], mu, na, snr, c1, c2);
            if (w[i] < 0) any_negative = true;
        }
        if (any_negative) {
            ++p;  // drop the weakest active channel and recompute the level
            continue;
        }
        for (int i = 0; i < na; ++i) r.omega(order[i]) = std::max(w[i], 0.0);
        r.active = na;
        break;
    }

    r.mu_opt = mu;
    r.total = r.omega.sum();
    if (r.total > p_total * (1.0 + 1e-9)) {
        r.omega *= p_total / r.total;
        r.total = p_total;
    }
    return r;
}

double objective_eq17(const Eigen::VectorXd& omega, const SpectrumView& spectrum, double delta,
                      double noise_power) {
    if (omega.size() != spectrum.phi.size())
        throw std::invalid_argument("omega and spectrum must have matching lengths");
    if (!(noise_power > 0)) throw std::invalid_argument("noise power must be positive");
    const double d2 = delta * delta;
    const double lin = d2 / noise_power;
    const double quad = d2 * (1.0 - d2) / (noise_power * noise_power);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < omega.size(); ++i) {
        const double p2 = spectrum.phi(i) * spectrum.phi(i);
        const double arg = 1.0 + lin * p2 * omega(i) - quad * p2 * p2 * omega(i) * omega(i);
        if (!(arg > 0))
            throw model_error("rate objective left its validity region: a per-stream argument "
                              "became nonpositive");
        sum += std::log2(arg);
    }
    return sum;
}

} // namespace qmimo
