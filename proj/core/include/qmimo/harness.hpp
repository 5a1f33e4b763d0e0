// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#ifndef QMIMO_HARNESS_HPP
#define QMIMO_HARNESS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qmimo/scenario.hpp"

namespace qmimo {

enum class Method { BdFr, BdFrWf, CqaBd, CqaRbd, CqaBdMaas, CqaRbdMaas };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct SweepRow {
    double snr_db = 0.0;
    std::string method;
    std::string bits;       // DAC resolution, or "full" for unquantized baselines
    double mean_rate = 0.0; // bits per channel use
    double stderr_ = 0.0;   // sample std / sqrt(trials)
    long trials = 0;
};

struct SweepResult {
    std::string scenario_digest;
    std::vector<SweepRow> rows;            // sorted: snr asc, method lexical, bits asc
    double runtime_ms = 0.0;
    std::uint64_t channel_digest = 0;      // XOR of per-trial channel hashes
    std::map<std::string, long> fallbacks; // "method|bits|snr_db" -> count of
                                           // model-validity fallbacks to equal loading
};

struct SweepOptions {
    int threads = 0;          // 0 = hardware concurrency
    bool sequential = false;  // force a single worker
    bool delta_consistent = false;
};

// Monte Carlo sweep over trials x SNR x methods x bit depths. Every method
// sees the identical channel realization within a trial. Gains are computed
// once per bit depth. Quantization-aware water-filling samples that leave
// the model's validity region (saturated water level or total collapse of
// the active set) fall back to equal loading and are counted per
// (method, bits, snr) in `fallbacks`. Aggregation uses a fixed pairwise
// reduction over trial slots, so results are bit-identical for any worker
// count; `sequential` additionally forces one worker.
SweepResult run_sweep(const SystemScenario& scenario, const std::vector<Method>& methods,
                      const SweepOptions& options = {});

// Canned scenarios: "fig2" (64 BS antennas, 16 users x 2, bits 2/3/4),
// "fig3-perfect" (8 users x 2, bits 3/6), "fig3-icsi" (same with r = 0.72
// and feedback error variance 0.16).
SystemScenario preset(const std::string& name);

enum class ResultFormat { Csv, Json };

// CSV columns exactly: snr_db, method, bits, mean_rate_bits, stderr, trials.
// JSON mirrors all SweepResult fields. Output is staged in memory and
// written in one pass, so a failed run leaves no partial file.
void write_results(const SweepResult& result, const std::string& path, ResultFormat format);

SweepResult read_results_json(const std::string& path);

} // namespace qmimo

#endif
