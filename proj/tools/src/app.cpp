// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#include "qmimo_cli/app.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmimo/channel.hpp"
#include "qmimo/errors.hpp"
#include "qmimo/harness.hpp"
#include "qmimo/matrix_io.hpp"
#include "qmimo/power.hpp"
#include "qmimo/precoder.hpp"
#include "qmimo/quantizer.hpp"
#include "qmimo/rate.hpp"
#include "qmimo/rng.hpp"

namespace qmimo_cli {

namespace {

using namespace qmimo;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Relative output paths land in $QMIMO_OUT_DIR when it is set.
std::string resolve_out(const std::string& path) {
    if (path.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    const char* dir = std::getenv("QMIMO_OUT_DIR");
    if (!dir || !*dir) return path;
    return (std::filesystem::path(dir) / p).string();
}

ConfigMap scenario_to_config(const SystemScenario& sc) {
    ConfigMap cfg;
    cfg["n_tx"] = std::to_string(sc.n_tx);
    cfg["users"] = std::to_string(sc.users);
    std::ostringstream rx;
    for (size_t i = 0; i < sc.n_rx_per_user.size(); ++i)
        rx << (i ? "," : "") << sc.n_rx_per_user[i];
    cfg["n_rx_per_user"] = rx.str();
    std::ostringstream snr;
    for (size_t i = 0; i < sc.snr_db_grid.size(); ++i)
        snr << (i ? "," : "") << fmt17(sc.snr_db_grid[i]);
    cfg["snr_db_grid"] = snr.str();
    cfg["total_power"] = fmt17(sc.total_power);
    std::ostringstream bits;
    for (size_t i = 0; i < sc.bits.size(); ++i) bits << (i ? "," : "") << sc.bits[i];
    cfg["bits"] = bits.str();
    if (sc.corr_coeff.imag() != 0.0)
        cfg["corr_coeff"] = fmt17(sc.corr_coeff.real()) + "+" + fmt17(sc.corr_coeff.imag()) + "i";
    else
        cfg["corr_coeff"] = fmt17(sc.corr_coeff.real());
    cfg["csi_error_var"] = fmt17(sc.csi_error_var);
    cfg["trials"] = std::to_string(sc.trials);
    cfg["seed"] = std::to_string(sc.seed);
    return cfg;
}

// preset < config file < --set, later sources win key by key.
SystemScenario resolve_scenario(const CliState& state) {
    ConfigMap cfg;
    if (!state.preset_name.empty())
        cfg = scenario_to_config(preset(state.preset_name));
    if (!state.config_path.empty())
        for (const auto& [k, v] : parse_config_file(state.config_path)) cfg[k] = v;
    apply_overrides(cfg, state.overrides);
    if (cfg.empty()) throw config_error("no scenario given: use --preset, --config or --set");
    return scenario_from_config(cfg);
}

int run_sweep_cmd(const CliState& state) {
    SystemScenario scenario = resolve_scenario(state);

    std::vector<Method> methods;
    if (state.methods.empty()) {
        methods = {Method::BdFr,      Method::BdFrWf,    Method::CqaBd,
                   Method::CqaRbd,    Method::CqaBdMaas, Method::CqaRbdMaas};
    } else {
        for (const auto& group : state.methods) {
            std::istringstream in(group);
            std::string tok;
            while (std::getline(in, tok, ','))
                if (!tok.empty()) methods.push_back(method_from_name(tok));
        }
    }

    SweepOptions options;
    options.threads = state.threads;
    options.sequential = state.sequential;
    options.delta_consistent = state.delta_consistent;

    SweepResult result = run_sweep(scenario, methods, options);

    const std::string out = resolve_out(state.sweep_out);
    ResultFormat format = ResultFormat::Csv;
    if (state.sweep_format == "json")
        format = ResultFormat::Json;
    else if (state.sweep_format.empty() && out.size() >= 5 &&
             out.compare(out.size() - 5, 5, ".json") == 0)
        format = ResultFormat::Json;

    write_results(result, out, format);

    long fallback_total = 0;
    for (const auto& [k, v] : result.fallbacks) fallback_total += v;
    std::cout << "wrote " << result.rows.size() << " rows to " << out << " ("
              << result.runtime_ms / 1000.0 << " s, scenario " << result.scenario_digest;
    if (fallback_total > 0)
        std::cout << ", " << fallback_total << " equal-loading fallbacks";
    std::cout << ")\n";
    return 0;
}

int run_bussgang_check(const CliState& state) {
    StepPolicy policy = MseOptimalStep{};
    if (state.bc_step > 0) policy = state.bc_step;
    QuantizerModel model = build_quantizer(state.bc_bits, state.bc_power, state.bc_ntx, policy);
    std::mt19937_64 rng = substream(state.bc_seed, 0);
    BussgangEstimate est = estimate_bussgang_mc(model, state.bc_samples, rng);

    const double delta_err = std::abs(model.delta - est.delta_hat) / model.delta;
    const double power_err = std::abs(est.out_power - model.total_power) / model.total_power;
    std::cout << "bits " << model.bits << "  levels " << model.levels << "  step "
              << model.step << "  alpha " << model.alpha << '\n'
              << "delta_closed_form " << fmt17(model.delta) << '\n'
              << "delta_monte_carlo " << fmt17(est.delta_hat) << "  (rel err " << delta_err
              << ")\n"
              << "output_power " << fmt17(est.out_power) << "  (rel err " << power_err
              << ", budget " << model.total_power << ")\n";

    if (!state.bc_json_out.empty()) {
        nlohmann::json j{{"bits", model.bits},
                         {"levels", model.levels},
                         {"step", model.step},
                         {"alpha", model.alpha},
                         {"delta_closed_form", model.delta},
                         {"delta_monte_carlo", est.delta_hat},
                         {"delta_rel_err", delta_err},
                         {"output_power", est.out_power},
                         {"power_rel_err", power_err},
                         {"samples", state.bc_samples}};
        std::ofstream out(resolve_out(state.bc_json_out), std::ios::trunc);
        if (!out) throw config_error("cannot open for writing: " + state.bc_json_out);
        out << j.dump(2) << '\n';
    }
    return 0;
}

int run_allocate(const CliState& state) {
    Eigen::VectorXd phi = load_vector_csv(state.alloc_spectrum);
    const int n = static_cast<int>(phi.size());
    SpectrumView sp;
    sp.phi = phi;
    sp.owner.assign(n, 0);

    const double snr = std::pow(10.0, state.alloc_snr_db / 10.0);
    const double p_total = state.alloc_p_total > 0 ? state.alloc_p_total : n;
    const std::string method = lower(state.alloc_method);

    nlohmann::json j;
    AllocationResult alloc;
    if (method == "maas") {
        const double delta = state.alloc_delta > 0
                                 ? state.alloc_delta
                                 : build_quantizer(state.alloc_bits, 1.0, state.alloc_ntx).delta;
        alloc = cqa_maas(sp, snr, delta, p_total);
        j["delta"] = delta;
        j["objective_bits"] = objective_eq17(alloc.omega, sp, delta, n / snr);
    } else if (method == "wf") {
        const double n0 = state.alloc_noise_power > 0 ? state.alloc_noise_power : n / snr;
        alloc = waterfilling(sp, n0, p_total);
        j["noise_power"] = n0;
    } else if (method == "equal") {
        alloc = equal_allocation(n, p_total);
    } else {
        throw config_error("unknown allocation method: " + state.alloc_method +
                           " (expected maas, wf or equal)");
    }

    j["method"] = method;
    j["snr_db"] = state.alloc_snr_db;
    j["p_total"] = p_total;
    j["mu_opt"] = alloc.mu_opt;
    j["active"] = alloc.active;
    j["iterations"] = alloc.iterations;
    j["c1"] = alloc.c1;
    j["c2"] = alloc.c2;
    j["total"] = alloc.total;
    j["omega"] = std::vector<double>(alloc.omega.data(), alloc.omega.data() + alloc.omega.size());

    if (state.alloc_out.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        const std::string out = resolve_out(state.alloc_out);
        std::ofstream os(out, std::ios::trunc);
        if (!os) throw config_error("cannot open for writing: " + out);
        os << j.dump(2) << '\n';
    }
    return 0;
}

int run_precode(const CliState& state) {
    SystemScenario scenario = resolve_scenario(state);
    if (state.precode_trial < 0) throw config_error("--trial must be >= 0");

    std::mt19937_64 rng = substream(scenario.seed, static_cast<std::uint64_t>(state.precode_trial));
    ChannelSet ch = gen_channel(scenario, rng);
    if (scenario.corr_coeff != std::complex<double>(0.0, 0.0) || scenario.csi_error_var > 0)
        ch = apply_csi_impairment(ch, scenario.corr_coeff, scenario.csi_error_var, rng);

    const std::string kind_s = lower(state.precode_kind);
    PrecoderKind kind;
    if (kind_s == "bd")
        kind = PrecoderKind::BD;
    else if (kind_s == "rbd")
        kind = PrecoderKind::RBD;
    else
        throw config_error("unknown precoder kind: " + state.precode_kind +
                           " (expected bd or rbd)");

    const double snr = std::pow(10.0, state.precode_snr_db / 10.0);
    const double n0 = scenario.noise_power(snr);
    const int nu = scenario.n_rx_total();
    const std::string alloc_s = lower(state.precode_alloc);

    Allocator allocator;
    if (alloc_s == "equal") {
        allocator = [nu](const SpectrumView&) {
            return equal_allocation(nu, static_cast<double>(nu));
        };
    } else if (alloc_s == "wf") {
        allocator = [nu, snr](const SpectrumView& sp) {
            return waterfilling(sp, nu / snr, static_cast<double>(nu));
        };
    } else if (alloc_s == "maas") {
        const double delta =
            build_quantizer(state.precode_bits, scenario.total_power, scenario.n_tx).delta;
        allocator = [nu, snr, delta](const SpectrumView& sp) {
            return cqa_maas(sp, snr, delta, static_cast<double>(nu));
        };
    } else {
        throw config_error("unknown allocation method: " + state.precode_alloc +
                           " (expected equal, wf or maas)");
    }

    PrecoderResult pr = build_cqa_precoder(ch, scenario, kind, n0, allocator);

    const std::string out = resolve_out(state.precode_out);
    save_matrix(out, pr.p);
    std::cout << "wrote " << pr.p.rows() << "x" << pr.p.cols() << " precoder to " << out
              << "  (tr P^H P = " << pr.p.squaredNorm() << ")\n";
    if (!state.precode_channel_out.empty()) {
        const std::string ch_out = resolve_out(state.precode_channel_out);
        save_matrix(ch_out, ch.h);
        std::cout << "wrote " << ch.h.rows() << "x" << ch.h.cols() << " channel to " << ch_out
                  << '\n';
    }
    return 0;
}

int run_flops(const CliState& state) {
    if (!state.flops_kind.empty()) {
        const std::string k = lower(state.flops_kind);
        FlopsKind kind;
        if (k == "bd")
            kind = FlopsKind::BD;
        else if (k == "rbd")
            kind = FlopsKind::RBD;
        else if (k == "cqa-bd")
            kind = FlopsKind::CqaBd;
        else if (k == "cqa-rbd")
            kind = FlopsKind::CqaRbd;
        else
            throw config_error("unknown kind: " + state.flops_kind +
                               " (expected bd, rbd, cqa-bd or cqa-rbd)");
        std::cout << flops_precoder(kind, state.flops_ntx, state.flops_nrx, state.flops_nj,
                                    state.flops_bits)
                  << '\n';
        return 0;
    }
    if (!state.flops_alloc.empty()) {
        const std::string a = lower(state.flops_alloc);
        AllocMethod method;
        if (a == "wf")
            method = AllocMethod::WF;
        else if (a == "maas")
            method = AllocMethod::MAAS;
        else
            throw config_error("unknown allocation method: " + state.flops_alloc +
                               " (expected wf or maas)");
        std::cout << flops_allocation(method, state.flops_n) << '\n';
        return 0;
    }
    throw config_error("flops needs --kind or --alloc");
}

void add_scenario_options(CLI::App* cmd, CliState& state) {
    cmd->add_option("--preset", state.preset_name,
                    "canned scenario: fig2, fig3-perfect or fig3-icsi");
    cmd->add_option("--config", state.config_path, "key=value scenario file");
    cmd->add_option("--set", state.overrides,
                    "scenario override key=value, repeatable, wins over --preset/--config");
}

} // namespace

std::unique_ptr<CLI::App> build_app(CliState& state) {
    auto app = std::make_unique<CLI::App>(
        "quantized multiuser MIMO downlink simulator: block-diagonalization "
        "precoding with coarse-DAC Bussgang models and quantization-aware "
        "power loading");
    app->name("qmimo");
    app->set_version_flag("--version", "qmimo 0.1.0");
    app->require_subcommand(1);
    app->footer("Relative output paths are placed under $QMIMO_OUT_DIR when set.\n"
                "Exit codes: 0 success, 2 configuration error, 3 numeric-model error.");

    CLI::App* sweep = app->add_subcommand(
        "sweep", "Monte Carlo sum-rate sweep over SNR grid x methods x bit depths");
    add_scenario_options(sweep, state);
    sweep->add_option("--methods", state.methods,
                      "comma list from: BD-FR, BD-FR+WF, CQA-BD, CQA-RBD, CQA-BD-MAAS, "
                      "CQA-RBD-MAAS (default: all)");
    sweep->add_option("--out", state.sweep_out, "result file (default sweep.csv)");
    sweep->add_option("--format", state.sweep_format, "csv or json (default: by extension)")
        ->check(CLI::IsMember({"csv", "json"}));
    sweep->add_option("--threads", state.threads,
                      "worker thread count, 0 = hardware concurrency (count)");
    sweep->add_flag("--sequential", state.sequential,
                    "single worker, bit-exact reproducible aggregation");
    sweep->add_flag("--delta-consistent", state.delta_consistent,
                    "scale the signal term of the rate by the squared Bussgang gain "
                    "(sensitivity variant, default off)");

    CLI::App* bc = app->add_subcommand(
        "bussgang-check", "compare the closed-form quantizer gain against Monte Carlo");
    bc->add_option("--bits", state.bc_bits, "DAC resolution b, levels J = 2^b (count)")
        ->check(CLI::Range(1, 12));
    bc->add_option("--power", state.bc_power, "transmit power budget P (linear)");
    bc->add_option("--ntx", state.bc_ntx, "transmit antenna count (count)");
    bc->add_option("--samples", state.bc_samples, "Monte Carlo sample count, >= 1e4 (count)");
    bc->add_option("--step", state.bc_step,
                   "explicit quantizer step (linear input units); omit for the "
                   "distortion-minimizing step");
    bc->add_option("--seed", state.bc_seed, "random seed (count)");
    bc->add_option("--json-out", state.bc_json_out, "also write the comparison as JSON");

    CLI::App* alloc = app->add_subcommand(
        "allocate", "power allocation over an explicit gain spectrum");
    alloc->add_option("--spectrum", state.alloc_spectrum,
                      "CSV of sub-channel amplitude gains, one per line (linear)")
        ->required();
    alloc->add_option("--method", state.alloc_method, "maas, wf or equal (default maas)");
    alloc->add_option("--snr-db", state.alloc_snr_db, "operating SNR (dB)");
    alloc->add_option("--bits", state.alloc_bits,
                      "DAC resolution used to derive the quantizer gain for maas (count)")
        ->check(CLI::Range(1, 12));
    alloc->add_option("--delta", state.alloc_delta,
                      "explicit quantizer gain in (0,1], overrides --bits (linear)");
    alloc->add_option("--ntx", state.alloc_ntx,
                      "transmit antennas behind the quantizer gain (count)");
    alloc->add_option("--p-total", state.alloc_p_total,
                      "power budget; default one unit per sub-channel (linear)");
    alloc->add_option("--noise-power", state.alloc_noise_power,
                      "noise power for wf; default n/SNR (linear)");
    alloc->add_option("--out", state.alloc_out, "write JSON here instead of stdout");

    CLI::App* precode = app->add_subcommand(
        "precode", "draw one channel, build a precoder, dump the matrix");
    add_scenario_options(precode, state);
    precode->add_option("--kind", state.precode_kind, "bd or rbd (default bd)");
    precode->add_option("--alloc", state.precode_alloc, "equal, wf or maas (default equal)");
    precode->add_option("--snr-db", state.precode_snr_db, "operating SNR (dB)");
    precode->add_option("--bits", state.precode_bits,
                        "DAC resolution behind the maas gain (count)")
        ->check(CLI::Range(1, 12));
    precode->add_option("--trial", state.precode_trial,
                        "Monte Carlo substream index to draw (count)");
    precode->add_option("--out", state.precode_out,
                        "matrix dump path; .csv for text, anything else binary");
    precode->add_option("--channel-out", state.precode_channel_out,
                        "also dump the drawn channel matrix");

    CLI::App* flops = app->add_subcommand(
        "flops", "dominant-cost model of precoder builds and allocators");
    flops->add_option("--kind", state.flops_kind, "bd, rbd, cqa-bd or cqa-rbd");
    flops->add_option("--ntx", state.flops_ntx, "transmit antennas (count)");
    flops->add_option("--nrx", state.flops_nrx, "total receive antennas (count)");
    flops->add_option("--nj", state.flops_nj, "receive antennas per user (count)");
    flops->add_option("--bits", state.flops_bits,
                      "DAC resolution for the quantization-aware kinds (count)")
        ->check(CLI::Range(1, 12));
    flops->add_option("--alloc", state.flops_alloc,
                      "report the asymptotic class of an allocator: wf or maas");
    flops->add_option("--n", state.flops_n, "sub-channel count for --alloc (count)");

    return app;
}

int dispatch(const CLI::App& app, const CliState& state) {
    if (app.got_subcommand("sweep")) return run_sweep_cmd(state);
    if (app.got_subcommand("bussgang-check")) return run_bussgang_check(state);
    if (app.got_subcommand("allocate")) return run_allocate(state);
    if (app.got_subcommand("precode")) return run_precode(state);
    if (app.got_subcommand("flops")) return run_flops(state);
    throw config_error("no subcommand selected");
}

int run_cli(int argc, const char* const* argv) {
    CliState state;
    auto app = build_app(state);
    try {
        app->parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app->exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app->exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app->exit(e);
    } catch (const CLI::ParseError& e) {
        app->exit(e);
        return 2;
    }
    try {
        return dispatch(*app, state);
    } catch (const qmimo::config_error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const qmimo::model_error& e) {
        std::cerr << "model error: " << e.what() << '\n';
        return 3;
    } catch (const qmimo::infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace qmimo_cli
