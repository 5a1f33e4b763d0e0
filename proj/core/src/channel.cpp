// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#include "qmimo/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace qmimo {

namespace {

Eigen::MatrixXcd gaussian_matrix(int rows, int cols, double var_per_entry,
                                 std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    const double s = std::sqrt(var_per_entry / 2.0);
    Eigen::MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            double re = n01(rng);
            double im = n01(rng);
            m(i, j) = std::complex<double>(s * re, s * im);
        }
    return m;
}

} // namespace

ChannelSet gen_channel(const SystemScenario& scenario, std::mt19937_64& rng) {
    ChannelSet ch;
    const int rows = scenario.n_rx_total();
    ch.h = gaussian_matrix(rows, scenario.n_tx, 1.0, rng);
    ch.h_est = ch.h;
    ch.user_offsets.resize(scenario.users + 1);
    ch.user_offsets[0] = 0;
    for (int j = 0; j < scenario.users; ++j)
        ch.user_offsets[j + 1] = ch.user_offsets[j] + scenario.n_rx_per_user[j];
    return ch;
}

Eigen::MatrixXcd correlation_matrix(std::complex<double> r, int n) {
    if (std::abs(r) > 1.0 + 1e-12)
        throw std::invalid_argument("correlation coefficient must satisfy |r| <= 1");
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 1.0;
        std::complex<double> p = 1.0;
        for (int j = i + 1; j < n; ++j) {
            p *= r;
            m(i, j) = p;
            m(j, i) = std::conj(p);
        }
    }
    return m;
}

Eigen::MatrixXcd sqrt_psd(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed in sqrt_psd");
    Eigen::VectorXd ev = es.eigenvalues();
    const double lmax = ev.size() ? ev.maxCoeff() : 0.0;
    const double floor_tol = -1e-10 * std::max(lmax, 1.0);
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) < floor_tol)
            throw std::invalid_argument("matrix is not positive semidefinite");
        if (ev(i) < 0) ev(i) = 0;
    }
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
           es.eigenvectors().adjoint();
}

ChannelSet apply_csi_impairment(const ChannelSet& ch, std::complex<double> r, double sigma_e2,
                                std::mt19937_64& rng) {
    ChannelSet out = ch;
    if (r != std::complex<double>(0.0, 0.0)) {
        Eigen::MatrixXcd root = sqrt_psd(correlation_matrix(r, static_cast<int>(ch.h.cols())));
        out.h_est = ch.h * root;
    } else {
        out.h_est = ch.h;
    }
    if (sigma_e2 > 0)
        out.h_est += gaussian_matrix(static_cast<int>(ch.h.rows()),
                                     static_cast<int>(ch.h.cols()), sigma_e2, rng);
    return out;
}

} // namespace qmimo
