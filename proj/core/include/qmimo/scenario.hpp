// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#ifndef QMIMO_SCENARIO_HPP
#define QMIMO_SCENARIO_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qmimo {

// Full description of one simulated downlink experiment.
//
// Power convention: `total_power` is the transmit budget P entering the
// quantizer design; allocators separately receive a stream budget of
// n_rx_total() so that equal loading means one power unit per stream.
struct SystemScenario {
    int n_tx = 64;                          // BS antennas
    int users = 1;                          // user count K
    std::vector<int> n_rx_per_user;         // antennas per user
    std::vector<double> snr_db_grid;        // sweep points, dB
    double total_power = 1.0;               // P, linear
    std::vector<int> bits;                  // DAC resolutions to sweep
    std::complex<double> corr_coeff = 0.0;  // transmit correlation r, |r| <= 1
    double csi_error_var = 0.0;             // feedback error variance
    int trials = 200;
    std::uint64_t seed = 1;

    int n_rx_total() const;

    // N_0 = P / SNR for a linear SNR point.
    double noise_power(double snr_linear) const { return total_power / snr_linear; }

    // Throws std::invalid_argument on any violated field constraint.
    void validate() const;

    // Stable hex digest of every resolved field.
    std::string digest() const;
};

using ConfigMap = std::map<std::string, std::string>;

// Key=value file, one pair per line, '#' comments, blank lines ignored.
// Recognized keys mirror SystemScenario fields:
//   n_tx, users, n_rx_per_user (int or comma list), snr_db_grid (comma list
//   or start:step:stop), total_power, bits (comma list), corr_coeff (real or
//   "a+bi"), csi_error_var, trials, seed.
ConfigMap parse_config_file(const std::string& path);

// "key=value" strings layered on top of a parsed config.
void apply_overrides(ConfigMap& cfg, const std::vector<std::string>& overrides);

// Builds and validates a scenario; unknown keys are config errors.
SystemScenario scenario_from_config(const ConfigMap& cfg);

} // namespace qmimo

#endif
