// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#include "qmimo/rate.hpp"

#include <cmath>
#include <stdexcept>

#include "qmimo/errors.hpp"

namespace qmimo {

namespace {

// log2 det(I + c A) for Hermitian A with I + cA positive definite.
double logdet_i_plus(const Eigen::MatrixXcd& a, double c) {
    const Eigen::Index n = a.rows();
    Eigen::MatrixXcd m = c * a;
    m.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXcd> llt(m);
    if (llt.info() == Eigen::Success) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            acc += std::log(llt.matrixLLT()(i, i).real());
        return 2.0 * acc / std::log(2.0);
    }
    // near-singular: fall back to the spectrum of A itself
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
    if (es.info() != Eigen::Success)
        throw model_error("rate determinant could not be evaluated");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double arg = 1.0 + c * es.eigenvalues()(i);
        if (!(arg > 0))
            throw model_error("rate determinant argument became nonpositive");
        acc += std::log2(arg);
    }
    return acc;
}

} // namespace

double sum_rate_bussgang(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& p, double delta,
                         double snr, int n_rx_total, bool delta_consistent_signal) {
    if (h.cols() != p.rows())
        throw std::invalid_argument("channel and precoder dimensions disagree");
    if (delta < 0 || delta > 1.0 + 1e-12)
        throw std::invalid_argument("Bussgang gain must lie in [0, 1]");
    if (!(snr > 0)) throw std::invalid_argument("snr must be positive (linear scale)");
    if (n_rx_total < 1) throw std::invalid_argument("n_rx_total must be >= 1");

    const Eigen::MatrixXcd hp = h * p;
    Eigen::MatrixXcd a = (snr / n_rx_total) * (hp * hp.adjoint());
    a = 0.5 * (a + a.adjoint()).eval();

    const double d2 = delta * delta;
    const double c_signal = delta_consistent_signal ? 1.0 : 2.0 - d2;
    const double rate = logdet_i_plus(a, c_signal) - logdet_i_plus(a, 1.0 - d2);
    if (!std::isfinite(rate)) throw model_error("sum rate evaluated to a non-finite value");
    return rate;
}

double sum_rate_blockwise(const PrecoderResult& precoder, const AllocationResult& allocation,
                          double delta, double noise_power) {
    Eigen::Index total = 0;
    for (const auto& uf : precoder.per_user) total += uf.sv_effective.size();
    if (allocation.omega.size() != total)
        throw std::invalid_argument("allocation length must match the precoder spectrum");

    SpectrumView sp;
    sp.phi.resize(total);
    sp.owner.resize(total);
    Eigen::Index at = 0;
    for (size_t j = 0; j < precoder.per_user.size(); ++j) {
        const auto& sv = precoder.per_user[j].sv_effective;
        sp.phi.segment(at, sv.size()) = sv;
        std::fill_n(sp.owner.begin() + at, sv.size(), static_cast<int>(j));
        at += sv.size();
    }
    return objective_eq17(allocation.omega, sp, delta, noise_power);
}

long long flops_precoder(FlopsKind kind, int n_tx, int n_rx_total, int n_rx_user, int bits) {
    if (n_tx < 1 || n_rx_total < 1 || n_rx_user < 1)
        throw std::invalid_argument("dimensions must be >= 1");
    const long long nb = n_tx, nu = n_rx_total, nj = n_rx_user;
    long long count = nb * nb * (32 * nj + 8) + nb * (32 * nu * nu + 72 * nj * nj) +
                      64 * nu * nu;
    if (kind == FlopsKind::CqaBd || kind == FlopsKind::CqaRbd) {
        if (bits < 1 || bits > 12)
            throw std::invalid_argument("quantization-aware kinds need bits in [1, 12]");
        const long long levels = 1LL << bits;
        count += 50 * (levels - 1);
    }
    return count;
}

std::string flops_allocation(AllocMethod method, int n) {
    if (n < 1) throw std::invalid_argument("sub-channel count must be >= 1");
    (void)method;  // both allocators do constant work per sub-channel
    return "O(N_u)";
}

} // namespace qmimo
