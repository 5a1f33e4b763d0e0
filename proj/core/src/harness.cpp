// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#include "qmimo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qmimo/channel.hpp"
#include "qmimo/errors.hpp"
#include "qmimo/precoder.hpp"
#include "qmimo/quantizer.hpp"
#include "qmimo/rate.hpp"
#include "qmimo/rng.hpp"

namespace qmimo {

namespace {

constexpr double kDbBase = 10.0;

double db_to_linear(double db) { return std::pow(kDbBase, db / kDbBase); }

bool is_full_resolution(Method m) { return m == Method::BdFr || m == Method::BdFrWf; }

bool uses_rbd(Method m) { return m == Method::CqaRbd || m == Method::CqaRbdMaas; }

// One (method, bit depth) column of the sweep; bits = 0 marks the
// unquantized baselines.
struct Combo {
    Method method = Method::BdFr;
    int bits = 0;
    double delta = 1.0;
};

std::uint64_t fnv1a_bytes(std::uint64_t h, const void* data, size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t hash_channel(const ChannelSet& ch) {
    std::uint64_t h = 1469598103934665603ULL;
    for (Eigen::Index i = 0; i < ch.h.rows(); ++i)
        for (Eigen::Index j = 0; j < ch.h.cols(); ++j) {
            const double re = ch.h(i, j).real(), im = ch.h(i, j).imag();
            h = fnv1a_bytes(h, &re, sizeof re);
            h = fnv1a_bytes(h, &im, sizeof im);
        }
    if (ch.h_est.data() != ch.h.data())
        for (Eigen::Index i = 0; i < ch.h_est.rows(); ++i)
            for (Eigen::Index j = 0; j < ch.h_est.cols(); ++j) {
                const double re = ch.h_est(i, j).real(), im = ch.h_est(i, j).imag();
                h = fnv1a_bytes(h, &re, sizeof re);
                h = fnv1a_bytes(h, &im, sizeof im);
            }
    return h;
}

// Deterministic summation independent of accumulation hardware tricks:
// split in halves down to small blocks.
double pairwise_sum(const double* x, size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

PrecoderResult assemble_from_allocation(const std::vector<UserSubspace>& factors,
                                        const AllocationResult& alloc, PrecoderKind kind) {
    std::vector<Eigen::VectorXd> per_user(factors.size());
    Eigen::Index at = 0;
    for (size_t j = 0; j < factors.size(); ++j) {
        per_user[j] = alloc.omega.segment(at, factors[j].streams);
        at += factors[j].streams;
    }
    return assemble_precoder(factors, per_user, kind);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

int bits_sort_key(const std::string& bits) {
    if (bits == "full") return -1;
    return std::stoi(bits);
}

} // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::BdFr: return "BD-FR";
        case Method::BdFrWf: return "BD-FR+WF";
        case Method::CqaBd: return "CQA-BD";
        case Method::CqaRbd: return "CQA-RBD";
        case Method::CqaBdMaas: return "CQA-BD-MAAS";
        case Method::CqaRbdMaas: return "CQA-RBD-MAAS";
    }
    throw std::invalid_argument("unknown method enumerator");
}

Method method_from_name(const std::string& name) {
    std::string low(name);
    std::transform(low.begin(), low.end(), low.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (low == "bd-fr") return Method::BdFr;
    if (low == "bd-fr+wf" || low == "bd-fr-wf") return Method::BdFrWf;
    if (low == "cqa-bd") return Method::CqaBd;
    if (low == "cqa-rbd") return Method::CqaRbd;
    if (low == "cqa-bd-maas") return Method::CqaBdMaas;
    if (low == "cqa-rbd-maas") return Method::CqaRbdMaas;
    throw config_error("unknown method: " + name);
}

SweepResult run_sweep(const SystemScenario& scenario, const std::vector<Method>& methods,
                      const SweepOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    scenario.validate();
    if (methods.empty()) throw config_error("no methods requested");

    std::vector<Method> unique_methods;
    for (Method m : methods)
        if (std::find(unique_methods.begin(), unique_methods.end(), m) == unique_methods.end())
            unique_methods.push_back(m);

    // Bussgang gains depend only on the bit depth and the design statistic,
    // never on the trial, so they are resolved up front.
    std::map<int, double> delta_of_bits;
    bool any_quantized = false;
    for (Method m : unique_methods) any_quantized |= !is_full_resolution(m);
    if (any_quantized)
        for (int b : scenario.bits)
            delta_of_bits[b] =
                build_quantizer(b, scenario.total_power, scenario.n_tx).delta;

    std::vector<Combo> combos;
    for (Method m : unique_methods) {
        if (is_full_resolution(m)) {
            combos.push_back({m, 0, 1.0});
        } else {
            for (int b : scenario.bits) combos.push_back({m, b, delta_of_bits[b]});
        }
    }

    bool any_bd = false, any_rbd = false;
    for (const Combo& c : combos) (uses_rbd(c.method) ? any_rbd : any_bd) = true;

    const int n_snr = static_cast<int>(scenario.snr_db_grid.size());
    const int n_combo = static_cast<int>(combos.size());
    const int trials = scenario.trials;
    const int nu = scenario.n_rx_total();

    std::vector<double> snr_lin(n_snr);
    for (int s = 0; s < n_snr; ++s) snr_lin[s] = db_to_linear(scenario.snr_db_grid[s]);

    // One slot per (combo, snr, trial): workers write disjoint slots and the
    // final reduction order is fixed, so worker count cannot move a bit.
    const auto slot = [&](int c, int s, int t) {
        return (static_cast<size_t>(c) * n_snr + s) * trials + t;
    };
    std::vector<double> rates(static_cast<size_t>(n_combo) * n_snr * trials, 0.0);
    std::vector<unsigned char> fell_back(rates.size(), 0);
    std::vector<std::uint64_t> trial_hash(trials, 0);

    std::atomic<int> next_trial{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    int first_error_trial = -1;
    std::mutex error_mutex;

    auto run_trial = [&](int t) {
        std::mt19937_64 rng = substream(scenario.seed, static_cast<std::uint64_t>(t));
        ChannelSet ch = gen_channel(scenario, rng);
        if (scenario.corr_coeff != std::complex<double>(0.0, 0.0) || scenario.csi_error_var > 0)
            ch = apply_csi_impairment(ch, scenario.corr_coeff, scenario.csi_error_var, rng);
        trial_hash[t] = hash_channel(ch);

        // Null-space factors ignore the noise level, so one factorization
        // serves every SNR point of the trial.
        std::vector<UserSubspace> bd_factors;
        SpectrumView bd_spectrum;
        if (any_bd) {
            bd_factors = factorize_users(ch, PrecoderKind::BD, 1.0, scenario.total_power);
            bd_spectrum = spectrum_of(bd_factors);
        }

        for (int s = 0; s < n_snr; ++s) {
            const double snr = snr_lin[s];
            const double n0_eff = nu / snr;

            std::vector<UserSubspace> rbd_factors;
            SpectrumView rbd_spectrum;
            if (any_rbd) {
                rbd_factors = factorize_users(ch, PrecoderKind::RBD, scenario.noise_power(snr),
                                              scenario.total_power);
                rbd_spectrum = spectrum_of(rbd_factors);
            }

            for (int c = 0; c < n_combo; ++c) {
                const Combo& combo = combos[c];
                const bool rbd = uses_rbd(combo.method);
                const auto& factors = rbd ? rbd_factors : bd_factors;
                const auto& spectrum = rbd ? rbd_spectrum : bd_spectrum;

                AllocationResult alloc;
                bool fallback = false;
                switch (combo.method) {
                    case Method::BdFr:
                    case Method::CqaBd:
                    case Method::CqaRbd:
                        alloc = equal_allocation(nu, static_cast<double>(nu));
                        break;
                    case Method::BdFrWf:
                        alloc = waterfilling(spectrum, n0_eff, static_cast<double>(nu));
                        break;
                    case Method::CqaBdMaas:
                    case Method::CqaRbdMaas:
                        try {
                            alloc = cqa_maas(spectrum, snr, combo.delta,
                                             static_cast<double>(nu));
                        } catch (const model_error&) {
                            fallback = true;
                        } catch (const infeasible_error&) {
                            fallback = true;
                        }
                        if (fallback) alloc = equal_allocation(nu, static_cast<double>(nu));
                        break;
                }

                PrecoderResult prec = assemble_from_allocation(
                    factors, alloc, rbd ? PrecoderKind::RBD : PrecoderKind::BD);
                const double rate = sum_rate_bussgang(ch.h, prec.p, combo.delta, snr, nu,
                                                      options.delta_consistent);
                rates[slot(c, s, t)] = rate;
                fell_back[slot(c, s, t)] = fallback ? 1 : 0;
            }
        }
    };

    auto worker = [&]() {
        while (!failed.load(std::memory_order_relaxed)) {
            const int t = next_trial.fetch_add(1);
            if (t >= trials) return;
            try {
                run_trial(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error || t < first_error_trial) {
                    first_error = std::current_exception();
                    first_error_trial = t;
                }
                failed.store(true);
                return;
            }
        }
    };

    int workers = options.sequential
                      ? 1
                      : (options.threads > 0 ? options.threads
                                             : static_cast<int>(std::thread::hardware_concurrency()));
    workers = std::max(1, std::min(workers, trials));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (first_error) {
        try {
            std::rethrow_exception(first_error);
        } catch (const infeasible_error& e) {
            throw infeasible_error("trial " + std::to_string(first_error_trial) + ": " + e.what());
        } catch (const model_error& e) {
            throw model_error("trial " + std::to_string(first_error_trial) + ": " + e.what());
        }
    }

    SweepResult result;
    result.scenario_digest = scenario.digest();
    for (int t = 0; t < trials; ++t) result.channel_digest ^= trial_hash[t];

    std::vector<double> dev(trials);
    for (int c = 0; c < n_combo; ++c) {
        for (int s = 0; s < n_snr; ++s) {
            const double* x = &rates[slot(c, s, 0)];
            const double mean = pairwise_sum(x, trials) / trials;
            double se = 0.0;
            if (trials > 1) {
                for (int t = 0; t < trials; ++t) dev[t] = (x[t] - mean) * (x[t] - mean);
                const double var = pairwise_sum(dev.data(), trials) / (trials - 1);
                se = std::sqrt(var / trials);
            }
            SweepRow row;
            row.snr_db = scenario.snr_db_grid[s];
            row.method = method_name(combos[c].method);
            row.bits = combos[c].bits == 0 ? "full" : std::to_string(combos[c].bits);
            row.mean_rate = mean;
            row.stderr_ = se;
            row.trials = trials;
            result.rows.push_back(std::move(row));

            long n_fallback = 0;
            for (int t = 0; t < trials; ++t) n_fallback += fell_back[slot(c, s, t)];
            if (n_fallback > 0) {
                const std::string key = method_name(combos[c].method) + "|" +
                                        (combos[c].bits == 0 ? "full"
                                                             : std::to_string(combos[c].bits)) +
                                        "|" + fmt_short(scenario.snr_db_grid[s]);
                result.fallbacks[key] = n_fallback;
            }
        }
    }

    std::sort(result.rows.begin(), result.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
        if (a.method != b.method) return a.method < b.method;
        return bits_sort_key(a.bits) < bits_sort_key(b.bits);
    });

    result.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

SystemScenario preset(const std::string& name) {
    SystemScenario sc;
    sc.n_tx = 64;
    sc.total_power = 1.0;
    sc.trials = 200;
    sc.seed = 1;
    for (double s = -5; s <= 30; s += 5) sc.snr_db_grid.push_back(s);
    if (name == "fig2") {
        sc.users = 16;
        sc.bits = {2, 3, 4};
    } else if (name == "fig3-perfect" || name == "fig3-icsi") {
        sc.users = 8;
        sc.bits = {3, 6};
        if (name == "fig3-icsi") {
            sc.corr_coeff = 0.72;
            sc.csi_error_var = 0.16;
        }
    } else {
        throw config_error("unknown preset: " + name +
                           " (expected fig2, fig3-perfect or fig3-icsi)");
    }
    sc.n_rx_per_user.assign(sc.users, 2);
    sc.validate();
    return sc;
}

void write_results(const SweepResult& result, const std::string& path, ResultFormat format) {
    std::string body;
    if (format == ResultFormat::Csv) {
        std::ostringstream os;
        os << "snr_db,method,bits,mean_rate_bits,stderr,trials\n";
        for (const auto& r : result.rows)
            os << fmt_short(r.snr_db) << ',' << r.method << ',' << r.bits << ','
               << fmt_double(r.mean_rate) << ',' << fmt_double(r.stderr_) << ',' << r.trials
               << '\n';
        body = os.str();
    } else {
        nlohmann::json j;
        j["scenario_digest"] = result.scenario_digest;
        char hex[20];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(result.channel_digest));
        j["channel_digest"] = hex;
        j["runtime_ms"] = result.runtime_ms;
        j["fallbacks"] = result.fallbacks;
        j["rows"] = nlohmann::json::array();
        for (const auto& r : result.rows)
            j["rows"].push_back({{"snr_db", r.snr_db},
                                 {"method", r.method},
                                 {"bits", r.bits},
                                 {"mean_rate_bits", r.mean_rate},
                                 {"stderr", r.stderr_},
                                 {"trials", r.trials}});
        body = j.dump(2);
        body += '\n';
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw config_error("cannot open for writing: " + path);
    out << body;
    if (!out) throw config_error("write failed: " + path);
}

SweepResult read_results_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(path + ": " + e.what());
    }
    SweepResult r;
    try {
        r.scenario_digest = j.at("scenario_digest").get<std::string>();
        r.channel_digest = std::stoull(j.at("channel_digest").get<std::string>(), nullptr, 16);
        r.runtime_ms = j.at("runtime_ms").get<double>();
        if (j.contains("fallbacks"))
            r.fallbacks = j.at("fallbacks").get<std::map<std::string, long>>();
        for (const auto& row : j.at("rows")) {
            SweepRow sr;
            sr.snr_db = row.at("snr_db").get<double>();
            sr.method = row.at("method").get<std::string>();
            sr.bits = row.at("bits").get<std::string>();
            sr.mean_rate = row.at("mean_rate_bits").get<double>();
            sr.stderr_ = row.at("stderr").get<double>();
            sr.trials = row.at("trials").get<long>();
            r.rows.push_back(std::move(sr));
        }
    } catch (const nlohmann::json::exception& e) {
        throw config_error(path + ": " + e.what());
    }
    return r;
}

} // namespace qmimo
