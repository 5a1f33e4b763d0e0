// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#ifndef QMIMO_RATE_HPP
#define QMIMO_RATE_HPP

#include <Eigen/Dense>
#include <string>

#include "qmimo/power.hpp"
#include "qmimo/precoder.hpp"

namespace qmimo {

// Achievable sum rate of the linearized quantized downlink, in bits:
//   log2 det[I + (S/N_u) G ((1 - delta^2)(S/N_u) G + I)^{-1}],  G = (HP)(HP)^H,
// computed as log2 det(I + (2-d^2) A) - log2 det(I + (1-d^2) A) with
// A = (S/N_u) G Hermitian-symmetrized, Cholesky first, eigenvalues on
// breakdown. With delta_consistent_signal the signal term carries delta^2:
//   log2 det(I + A) - log2 det(I + (1-d^2) A).
// delta must lie in [0, 1]; non-finite results throw model_error.
double sum_rate_bussgang(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& p, double delta,
                         double snr, int n_rx_total, bool delta_consistent_signal = false);

// Per-user diagonal rate proxy: delegates to objective_eq17 over the
// precoder's effective spectrum. Meaningful for BD-type precoders where
// inter-user interference vanishes.
double sum_rate_blockwise(const PrecoderResult& precoder, const AllocationResult& allocation,
                          double delta, double noise_power);

enum class FlopsKind { BD, RBD, CqaBd, CqaRbd };

// Dominant-cost polynomial of a precoder build:
//   n_tx^2 (32 n_rx_user + 8) + n_tx (32 n_rx_total^2 + 72 n_rx_user^2) + 64 n_rx_total^2,
// plus the flat constant 50 (J - 1) for the quantization-aware kinds
// (2 (J-1) transcendental terms at 25 FLOPs each). bits is required for
// those kinds and ignored otherwise.
long long flops_precoder(FlopsKind kind, int n_tx, int n_rx_total, int n_rx_user, int bits = 0);

enum class AllocMethod { WF, MAAS };

// Asymptotic class descriptor; both allocators are linear in the
// sub-channel count.
std::string flops_allocation(AllocMethod method, int n);

} // namespace qmimo

#endif
