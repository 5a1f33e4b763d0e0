// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#include "qmimo/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qmimo/errors.hpp"

namespace qmimo {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw config_error("config key '" + key + "': cannot parse number from '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw config_error("config key '" + key + "': cannot parse integer from '" + v + "'");
    }
}

// "0.72", "-0.3", or "a+bi" / "a-bi" with a trailing i on the imaginary part.
std::complex<double> parse_complex(const std::string& key, const std::string& raw) {
    std::string v = trim(raw);
    if (v.empty()) throw config_error("config key '" + key + "': empty value");
    if (v.back() != 'i' && v.back() != 'I') return {parse_double(key, v), 0.0};
    std::string body = v.substr(0, v.size() - 1);
    // split at the sign of the imaginary part, skipping a leading sign and
    // exponent signs
    for (size_t k = body.size(); k-- > 1;) {
        char c = body[k];
        if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            double re = parse_double(key, body.substr(0, k));
            std::string im = body.substr(k);
            if (im == "+" || im == "-") im += "1";
            return {re, parse_double(key, im)};
        }
    }
    return {0.0, parse_double(key, body == "+" || body == "-" || body.empty() ? body + "1" : body)};
}

std::vector<double> parse_grid(const std::string& key, const std::string& v) {
    auto colon = split(v, ':');
    if (colon.size() == 3) {
        double start = parse_double(key, trim(colon[0]));
        double step = parse_double(key, trim(colon[1]));
        double stop = parse_double(key, trim(colon[2]));
        if (step <= 0) throw config_error("config key '" + key + "': step must be positive");
        std::vector<double> out;
        for (double x = start; x <= stop + 1e-12; x += step) out.push_back(x);
        return out;
    }
    std::vector<double> out;
    for (auto& tok : split(v, ',')) out.push_back(parse_double(key, trim(tok)));
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (auto& tok : split(v, ',')) out.push_back(static_cast<int>(parse_int(key, trim(tok))));
    return out;
}

} // namespace

int SystemScenario::n_rx_total() const {
    return std::accumulate(n_rx_per_user.begin(), n_rx_per_user.end(), 0);
}

void SystemScenario::validate() const {
    if (n_tx < 1) throw std::invalid_argument("n_tx must be >= 1");
    if (users < 1) throw std::invalid_argument("users must be >= 1");
    if (static_cast<int>(n_rx_per_user.size()) != users)
        throw std::invalid_argument("n_rx_per_user must list one count per user");
    for (int nj : n_rx_per_user)
        if (nj < 1) throw std::invalid_argument("every per-user antenna count must be >= 1");
    if (n_tx < n_rx_total())
        throw std::invalid_argument("n_tx must be >= total receive antennas, the interference "
                                    "null spaces are empty otherwise");
    if (snr_db_grid.empty()) throw std::invalid_argument("snr_db_grid must be nonempty");
    if (!(total_power > 0)) throw std::invalid_argument("total_power must be positive");
    if (bits.empty()) throw std::invalid_argument("bits must list at least one DAC resolution");
    for (int b : bits)
        if (b < 1 || b > 12) throw std::invalid_argument("bits entries must lie in [1, 12]");
    if (std::abs(corr_coeff) > 1.0 + 1e-12)
        throw std::invalid_argument("|corr_coeff| must be <= 1");
    if (csi_error_var < 0) throw std::invalid_argument("csi_error_var must be >= 0");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
}

std::string SystemScenario::digest() const {
    std::ostringstream os;
    os << "n_tx=" << n_tx << ";users=" << users << ";n_rx=";
    for (int nj : n_rx_per_user) os << nj << ",";
    os << ";snr=";
    for (double s : snr_db_grid) os << fmt_double(s) << ",";
    os << ";P=" << fmt_double(total_power) << ";bits=";
    for (int b : bits) os << b << ",";
    os << ";r=" << fmt_double(corr_coeff.real()) << "+" << fmt_double(corr_coeff.imag()) << "i";
    os << ";se2=" << fmt_double(csi_error_var) << ";trials=" << trials << ";seed=" << seed;
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(os.str())));
    return buf;
}

ConfigMap parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    ConfigMap cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw config_error(path + ":" + std::to_string(lineno) + ": empty key");
        cfg[key] = val;
    }
    return cfg;
}

void apply_overrides(ConfigMap& cfg, const std::vector<std::string>& overrides) {
    for (const auto& ov : overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos || eq == 0)
            throw config_error("override must look like key=value, got '" + ov + "'");
        cfg[trim(ov.substr(0, eq))] = trim(ov.substr(eq + 1));
    }
}

SystemScenario scenario_from_config(const ConfigMap& cfg) {
    static const std::set<std::string> known = {
        "n_tx",       "users",         "n_rx_per_user", "snr_db_grid", "total_power",
        "bits",       "corr_coeff",    "csi_error_var", "trials",      "seed",
    };
    for (const auto& [k, v] : cfg)
        if (!known.count(k)) throw config_error("unknown config key: " + k);

    SystemScenario sc;
    auto get = [&](const char* k) -> const std::string* {
        auto it = cfg.find(k);
        return it == cfg.end() ? nullptr : &it->second;
    };
    if (auto* v = get("n_tx")) sc.n_tx = static_cast<int>(parse_int("n_tx", *v));
    if (auto* v = get("users")) sc.users = static_cast<int>(parse_int("users", *v));
    if (auto* v = get("n_rx_per_user")) {
        auto list = parse_int_list("n_rx_per_user", *v);
        if (static_cast<int>(list.size()) == 1 && sc.users > 1)
            sc.n_rx_per_user.assign(sc.users, list[0]);
        else
            sc.n_rx_per_user = list;
    }
    if (sc.n_rx_per_user.empty()) sc.n_rx_per_user.assign(sc.users, 1);
    if (auto* v = get("snr_db_grid")) sc.snr_db_grid = parse_grid("snr_db_grid", *v);
    if (sc.snr_db_grid.empty())
        for (double s = -5; s <= 30; s += 5) sc.snr_db_grid.push_back(s);
    if (auto* v = get("total_power")) sc.total_power = parse_double("total_power", *v);
    if (auto* v = get("bits")) sc.bits = parse_int_list("bits", *v);
    if (sc.bits.empty()) sc.bits = {3};
    if (auto* v = get("corr_coeff")) sc.corr_coeff = parse_complex("corr_coeff", *v);
    if (auto* v = get("csi_error_var")) sc.csi_error_var = parse_double("csi_error_var", *v);
    if (auto* v = get("trials")) sc.trials = static_cast<int>(parse_int("trials", *v));
    if (auto* v = get("seed")) sc.seed = static_cast<std::uint64_t>(parse_int("seed", *v));

    try {
        sc.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("invalid scenario: ") + e.what());
    }
    return sc;
}

} // namespace qmimo
