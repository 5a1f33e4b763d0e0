// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#include "qmimo/precoder.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qmimo/errors.hpp"

namespace qmimo {

namespace {

int numeric_rank(const Eigen::VectorXd& sv, Eigen::Index rows, Eigen::Index cols) {
    if (sv.size() == 0) return 0;
    const double tol = static_cast<double>(std::max(rows, cols)) *
                       std::numeric_limits<double>::epsilon() * sv(0);
    int r = 0;
    while (r < sv.size() && sv(r) > tol) ++r;
    return r;
}

// Rotates each singular pair so the largest-magnitude entry of the right
// vector is real positive; the left vector absorbs the conjugate phase, so
// u sigma v^H is untouched while the factorization becomes deterministic.
void normalize_phases(Eigen::MatrixXcd& u, Eigen::MatrixXcd& v) {
    const Eigen::Index pairs = std::min(u.cols(), v.cols());
    for (Eigen::Index k = 0; k < pairs; ++k) {
        Eigen::Index imax = 0;
        v.col(k).cwiseAbs().maxCoeff(&imax);
        const std::complex<double> pivot = v(imax, k);
        const double mag = std::abs(pivot);
        if (mag < 1e-300) continue;
        const std::complex<double> rot = std::conj(pivot) / mag;
        v.col(k) *= rot;
        u.col(k) *= rot;
    }
}

} // namespace

Eigen::MatrixXcd complement_channel(const ChannelSet& channels, int j) {
    const int k = channels.users();
    if (j < 0 || j >= k) throw std::invalid_argument("user index out of range");
    const Eigen::Index n_tx = channels.h_est.cols();
    const Eigen::Index rows = channels.h_est.rows() - channels.user_rows(j);
    Eigen::MatrixXcd h_bar(rows, n_tx);
    Eigen::Index at = 0;
    for (int i = 0; i < k; ++i) {
        if (i == j) continue;
        h_bar.middleRows(at, channels.user_rows(i)) = channels.user_block_est(i);
        at += channels.user_rows(i);
    }
    return h_bar;
}

Eigen::MatrixXcd bd_first_factor(const Eigen::MatrixXcd& h_bar) {
    const Eigen::Index n = h_bar.cols();
    if (h_bar.rows() == 0) return Eigen::MatrixXcd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h_bar, Eigen::ComputeFullV);
    const int r = numeric_rank(svd.singularValues(), h_bar.rows(), n);
    if (r >= n)
        throw infeasible_error("interference channel spans the whole transmit space, "
                               "no null-space directions remain");
    return svd.matrixV().rightCols(n - r);
}

Eigen::MatrixXcd rbd_first_factor(const Eigen::MatrixXcd& h_bar, double noise_power,
                                  double total_power, int n_rx_total) {
    const Eigen::Index n = h_bar.cols();
    if (!(noise_power > 0)) throw std::invalid_argument("noise power must be positive");
    if (!(total_power > 0)) throw std::invalid_argument("total power must be positive");
    if (n_rx_total < 1) throw std::invalid_argument("n_rx_total must be >= 1");
    const double chi = n_rx_total * noise_power / total_power;

    Eigen::VectorXd weights = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);
    if (h_bar.rows() > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h_bar, Eigen::ComputeFullV);
        const Eigen::VectorXd& sv = svd.singularValues();
        for (Eigen::Index i = 0; i < sv.size(); ++i) weights(i) = sv(i) * sv(i);
        v = svd.matrixV();
    }
    for (Eigen::Index i = 0; i < n; ++i) weights(i) = 1.0 / std::sqrt(weights(i) + chi);
    return v * weights.asDiagonal();
}

EffectiveChannel effective_channel(const Eigen::MatrixXcd& h_j, const Eigen::MatrixXcd& p_c) {
    if (h_j.cols() != p_c.rows())
        throw std::invalid_argument("channel block and first factor dimensions disagree");
    EffectiveChannel eff;
    eff.h_e = h_j * p_c;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(eff.h_e, Eigen::ComputeThinU | Eigen::ComputeThinV);
    eff.sv = svd.singularValues();
    Eigen::MatrixXcd u = svd.matrixU();
    Eigen::MatrixXcd v = svd.matrixV();
    normalize_phases(u, v);
    const int r = numeric_rank(eff.sv, eff.h_e.rows(), eff.h_e.cols());
    eff.u = u;
    eff.w1 = v.leftCols(r);
    return eff;
}

PrecoderResult assemble_precoder(const std::vector<UserSubspace>& factors,
                                 const std::vector<Eigen::VectorXd>& omega, PrecoderKind kind) {
    if (factors.size() != omega.size())
        throw std::invalid_argument("one power vector per user is required");
    if (factors.empty()) throw std::invalid_argument("no users to assemble");

    const Eigen::Index n_tx = factors[0].p_c.rows();
    Eigen::Index total_streams = 0;
    for (const auto& f : factors) total_streams += f.streams;

    PrecoderResult res;
    res.kind = kind;
    res.p.setZero(n_tx, total_streams);
    res.per_user.reserve(factors.size());

    double power_sum = 0.0;
    Eigen::Index at = 0;
    for (size_t j = 0; j < factors.size(); ++j) {
        const auto& f = factors[j];
        if (omega[j].size() != f.streams)
            throw std::invalid_argument("power vector length must equal the user stream count");
        const Eigen::Index rank = f.w1.cols();

        UserFactors uf;
        uf.p_c = f.p_c;
        uf.w1 = f.w1;
        uf.sv_effective = f.sv;
        uf.p_d.setZero(f.p_c.cols(), f.streams);
        for (Eigen::Index k = 0; k < rank && k < f.streams; ++k) {
            const double w = omega[j](k);
            if (w < 0) throw std::invalid_argument("negative stream power");
            uf.p_d.col(k) = f.w1.col(k) * std::sqrt(w);
        }
        res.p.middleCols(at, f.streams) = f.p_c * uf.p_d;
        power_sum += omega[j].sum();
        at += f.streams;
        res.per_user.push_back(std::move(uf));
    }

    if (kind == PrecoderKind::RBD) {
        // The regularized first factor is not orthonormal, so the budget is
        // restored on the assembled matrix as a whole.
        const double tr = res.p.squaredNorm();
        if (tr > 0 && power_sum > 0) {
            const double scale = std::sqrt(power_sum / tr);
            res.p *= scale;
            for (auto& uf : res.per_user) uf.p_d *= scale;
        }
    }
    return res;
}

std::vector<UserSubspace> factorize_users(const ChannelSet& channels, PrecoderKind kind,
                                          double noise_power, double total_power) {
    const int k = channels.users();
    const int n_rx_total = static_cast<int>(channels.h_est.rows());
    std::vector<UserSubspace> out;
    out.reserve(k);
    for (int j = 0; j < k; ++j) {
        Eigen::MatrixXcd h_bar = complement_channel(channels, j);
        UserSubspace us;
        us.p_c = kind == PrecoderKind::BD
                     ? bd_first_factor(h_bar)
                     : rbd_first_factor(h_bar, noise_power, total_power, n_rx_total);
        EffectiveChannel eff = effective_channel(channels.user_block_est(j), us.p_c);
        us.w1 = eff.w1;
        us.streams = channels.user_rows(j);
        us.sv = Eigen::VectorXd::Zero(us.streams);
        const Eigen::Index keep = std::min<Eigen::Index>(eff.sv.size(), us.streams);
        us.sv.head(keep) = eff.sv.head(keep);
        out.push_back(std::move(us));
    }
    return out;
}

SpectrumView spectrum_of(const std::vector<UserSubspace>& factors) {
    Eigen::Index total = 0;
    for (const auto& f : factors) total += f.streams;
    SpectrumView sp;
    sp.phi.resize(total);
    sp.owner.resize(total);
    Eigen::Index at = 0;
    for (size_t j = 0; j < factors.size(); ++j) {
        sp.phi.segment(at, factors[j].streams) = factors[j].sv;
        std::fill_n(sp.owner.begin() + at, factors[j].streams, static_cast<int>(j));
        at += factors[j].streams;
    }
    return sp;
}

PrecoderResult build_cqa_precoder(const ChannelSet& channels, const SystemScenario& scenario,
                                  PrecoderKind kind, double noise_power,
                                  const Allocator& allocator) {
    std::vector<UserSubspace> factors =
        factorize_users(channels, kind, noise_power, scenario.total_power);
    SpectrumView spectrum = spectrum_of(factors);
    AllocationResult alloc = allocator(spectrum);
    if (alloc.omega.size() != spectrum.phi.size())
        throw std::invalid_argument("allocator returned a power vector of the wrong length");

    std::vector<Eigen::VectorXd> per_user(factors.size());
    Eigen::Index at = 0;
    for (size_t j = 0; j < factors.size(); ++j) {
        per_user[j] = alloc.omega.segment(at, factors[j].streams);
        at += factors[j].streams;
    }
    return assemble_precoder(factors, per_user, kind);
}

} // namespace qmimo
