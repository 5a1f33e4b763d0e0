// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#ifndef QMIMO_PRECODER_HPP
#define QMIMO_PRECODER_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "qmimo/channel.hpp"
#include "qmimo/power.hpp"

namespace qmimo {

enum class PrecoderKind { BD, RBD };

struct UserFactors {
    Eigen::MatrixXcd p_c;          // first factor: interference suppression
    Eigen::MatrixXcd p_d;          // second factor: loading along w1
    Eigen::MatrixXcd w1;           // leading right singular vectors of the effective channel
    Eigen::VectorXd sv_effective;  // nonincreasing, zero-padded to the user's antenna count
};

struct PrecoderResult {
    Eigen::MatrixXcd p;            // n_tx x n_rx_total, horizontal concat of p_c * p_d
    std::vector<UserFactors> per_user;
    PrecoderKind kind = PrecoderKind::BD;
};

// All user blocks except block j (0-based), stacked in original order.
Eigen::MatrixXcd complement_channel(const ChannelSet& channels, int j);

// Orthonormal basis of the null space of h_bar: the right singular vectors
// past the numeric rank (threshold max(rows,cols) * eps * sigma_max).
// An empty h_bar yields the identity; an empty null space is infeasible.
Eigen::MatrixXcd bd_first_factor(const Eigen::MatrixXcd& h_bar);

// Regularized counterpart: W_bar (S^T S + chi I)^{-1/2} over the full right
// basis, chi = n_rx_total * noise_power / total_power. Always n_tx x n_tx.
Eigen::MatrixXcd rbd_first_factor(const Eigen::MatrixXcd& h_bar, double noise_power,
                                  double total_power, int n_rx_total);

struct EffectiveChannel {
    Eigen::MatrixXcd h_e;   // h_j * p_c
    Eigen::MatrixXcd u;     // left singular vectors (thin)
    Eigen::VectorXd sv;     // singular values, nonincreasing
    Eigen::MatrixXcd w1;    // right singular vectors of the leading rank
};

EffectiveChannel effective_channel(const Eigen::MatrixXcd& h_j, const Eigen::MatrixXcd& p_c);

// Per-user inputs to assembly: the two subspace factors and the effective
// singular values (pre-padding).
struct UserSubspace {
    Eigen::MatrixXcd p_c;
    Eigen::MatrixXcd w1;
    Eigen::VectorXd sv;
    int streams = 0;        // target stream count (the user's antenna count)
};

// P_j = p_c * w1 * diag(sqrt(omega_j)), padded with zero streams when the
// effective rank falls short, concatenated over users. RBD factors are not
// orthonormal, so the assembled matrix is rescaled to tr(P^H P) = sum(omega);
// BD needs no rescale and keeps the trace identity exactly.
PrecoderResult assemble_precoder(const std::vector<UserSubspace>& factors,
                                 const std::vector<Eigen::VectorXd>& omega, PrecoderKind kind);

using Allocator = std::function<AllocationResult(const SpectrumView&)>;

// Full pipeline on the channel estimate: per user complement -> first factor
// -> effective-channel SVD, then one global allocation over the concatenated
// spectrum, then assembly. noise_power only enters the RBD regularizer.
PrecoderResult build_cqa_precoder(const ChannelSet& channels, const SystemScenario& scenario,
                                  PrecoderKind kind, double noise_power,
                                  const Allocator& allocator);

// The spectrum a given channel estimate induces (what the allocator inside
// build_cqa_precoder sees), exposed for reuse across SNR points.
std::vector<UserSubspace> factorize_users(const ChannelSet& channels, PrecoderKind kind,
                                          double noise_power, double total_power);
SpectrumView spectrum_of(const std::vector<UserSubspace>& factors);

} // namespace qmimo

#endif
