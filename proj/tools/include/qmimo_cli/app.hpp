// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#ifndef QMIMO_CLI_APP_HPP
#define QMIMO_CLI_APP_HPP

#include <memory>
#include <string>
#include <vector>

namespace CLI {
class App;
}

namespace qmimo_cli {

// Option values for every subcommand; filled by the parser, consumed by the
// dispatcher. Kept in one struct so tests can build the app without running
// anything.
struct CliState {
    // shared scenario sources
    std::string preset_name;
    std::string config_path;
    std::vector<std::string> overrides;

    // sweep
    std::string sweep_out = "sweep.csv";
    std::string sweep_format;  // "csv", "json", or empty = by extension
    std::vector<std::string> methods;
    bool sequential = false;
    int threads = 0;
    bool delta_consistent = false;

    // bussgang-check
    int bc_bits = 3;
    double bc_power = 1.0;
    int bc_ntx = 64;
    long long bc_samples = 1000000;
    double bc_step = 0.0;  // 0 = mse-optimal
    std::uint64_t bc_seed = 1;
    std::string bc_json_out;

    // allocate
    std::string alloc_spectrum;
    std::string alloc_method = "maas";
    double alloc_snr_db = 10.0;
    int alloc_bits = 3;
    double alloc_delta = 0.0;  // 0 = derive from bits
    int alloc_ntx = 64;
    double alloc_p_total = 0.0;      // 0 = one unit per sub-channel
    double alloc_noise_power = 0.0;  // 0 = n / snr_linear
    std::string alloc_out;

    // precode
    std::string precode_kind = "bd";
    std::string precode_alloc = "equal";
    double precode_snr_db = 10.0;
    int precode_trial = 0;
    int precode_bits = 3;
    std::string precode_out = "precoder.bin";
    std::string precode_channel_out;

    // flops
    std::string flops_kind;
    int flops_ntx = 64;
    int flops_nrx = 32;
    int flops_nj = 2;
    int flops_bits = 3;
    std::string flops_alloc;
    int flops_n = 32;
};

// Builds the full command tree over `state`. The returned app owns no
// business logic; dispatch() runs whichever subcommand parse() selected.
std::unique_ptr<CLI::App> build_app(CliState& state);

int dispatch(const CLI::App& app, const CliState& state);

// parse + dispatch + error-to-exit-code mapping: 0 success (including help),
// 2 configuration/usage errors, 3 numeric-model or infeasibility errors.
int run_cli(int argc, const char* const* argv);

} // namespace qmimo_cli

#endif
