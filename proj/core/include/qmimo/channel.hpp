// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#ifndef QMIMO_CHANNEL_HPP
#define QMIMO_CHANNEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <vector>

#include "qmimo/scenario.hpp"

namespace qmimo {

// Combined broadcast channel with per-user row blocks and the (possibly
// impaired) estimate the transmitter actually precodes on.
struct ChannelSet {
    Eigen::MatrixXcd h;              // true channel, n_rx_total x n_tx
    Eigen::MatrixXcd h_est;          // transmitter-side estimate; equals h when unimpaired
    std::vector<int> user_offsets;   // size K+1, row range of user j is [offsets[j], offsets[j+1])

    int users() const { return static_cast<int>(user_offsets.size()) - 1; }
    int user_rows(int j) const { return user_offsets[j + 1] - user_offsets[j]; }

    Eigen::Block<const Eigen::MatrixXcd> user_block(int j) const {
        return h.middleRows(user_offsets[j], user_rows(j));
    }
    Eigen::Block<const Eigen::MatrixXcd> user_block_est(int j) const {
        return h_est.middleRows(user_offsets[j], user_rows(j));
    }
};

// Rayleigh fading: i.i.d. circularly symmetric complex Gaussian entries of
// unit variance (1/2 per real component). Deterministic given the stream.
ChannelSet gen_channel(const SystemScenario& scenario, std::mt19937_64& rng);

// Transmit correlation with entries r^(j-i) above the diagonal and conjugate
// symmetry below. Throws std::invalid_argument when |r| > 1.
Eigen::MatrixXcd correlation_matrix(std::complex<double> r, int n);

// Hermitian PSD square root via eigendecomposition; eigenvalues below
// -1e-10 * lambda_max raise, smaller negatives clamp to zero.
Eigen::MatrixXcd sqrt_psd(const Eigen::MatrixXcd& m);

// h_est = h * R^{1/2} + E with E i.i.d. complex Gaussian of variance
// sigma_e2 per entry. Identity when r = 0 and sigma_e2 = 0. The true
// channel rows are left untouched: precoders run on h_est, rates on h.
ChannelSet apply_csi_impairment(const ChannelSet& ch, std::complex<double> r, double sigma_e2,
                                std::mt19937_64& rng);

} // namespace qmimo

#endif
