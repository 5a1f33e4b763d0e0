// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "qmimo/errors.hpp"
#include "qmimo/scenario.hpp"

using namespace qmimo;

namespace {

std::string write_temp(const std::string& body) {
    static int counter = 0;
    std::string path = "scenario_test_" + std::to_string(counter++) + ".cfg";
    std::ofstream out(path, std::ios::trunc);
    out << body;
    return path;
}

} // namespace

TEST_SUITE("scenario") {

TEST_CASE("defaults validate and digest is stable across calls") {
    SystemScenario sc;
    sc.users = 4;
    sc.n_rx_per_user = {2, 2, 2, 2};
    sc.snr_db_grid = {0.0, 10.0};
    sc.bits = {3};
    sc.validate();
    CHECK(sc.n_rx_total() == 8);
    CHECK(sc.digest() == sc.digest());
}

TEST_CASE("digest separates scenarios differing in any field") {
    SystemScenario a;
    a.users = 2;
    a.n_rx_per_user = {2, 2};
    a.snr_db_grid = {0.0};
    a.bits = {3};
    SystemScenario b = a;
    CHECK(a.digest() == b.digest());
    b.seed = 2;
    CHECK(a.digest() != b.digest());
    b = a;
    b.bits = {4};
    CHECK(a.digest() != b.digest());
    b = a;
    b.csi_error_var = 0.16;
    CHECK(a.digest() != b.digest());
}

TEST_CASE("validate rejects inconsistent geometry") {
    SystemScenario sc;
    sc.users = 2;
    sc.n_rx_per_user = {2, 2};
    sc.snr_db_grid = {0.0};
    sc.bits = {3};

    SUBCASE("antenna list length") {
        sc.n_rx_per_user = {2};
        CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    }
    SUBCASE("more receive than transmit antennas") {
        sc.n_tx = 3;
        CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    }
    SUBCASE("bits out of range") {
        sc.bits = {13};
        CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    }
    SUBCASE("nonpositive power") {
        sc.total_power = 0.0;
        CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    }
    SUBCASE("empty snr grid") {
        sc.snr_db_grid.clear();
        CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    }
}

TEST_CASE("config file: comments, blanks, key=value") {
    std::string path = write_temp("# header comment\n"
                                  "n_tx = 16\n"
                                  "users = 4\n"
                                  "\n"
                                  "n_rx_per_user = 2   # one value fans out to all users\n"
                                  "snr_db_grid = 0,5,10\n"
                                  "bits = 2,3\n"
                                  "trials = 7\n"
                                  "seed = 99\n");
    ConfigMap cfg = parse_config_file(path);
    SystemScenario sc = scenario_from_config(cfg);
    CHECK(sc.n_tx == 16);
    CHECK(sc.users == 4);
    CHECK(sc.n_rx_per_user == std::vector<int>{2, 2, 2, 2});
    CHECK(sc.snr_db_grid == std::vector<double>{0.0, 5.0, 10.0});
    CHECK(sc.bits == std::vector<int>{2, 3});
    CHECK(sc.trials == 7);
    CHECK(sc.seed == 99);
    std::remove(path.c_str());
}

TEST_CASE("snr grid accepts start:step:stop") {
    ConfigMap cfg{{"users", "2"}, {"n_rx_per_user", "2,2"}, {"snr_db_grid", "-5:5:30"},
                  {"bits", "3"}};
    SystemScenario sc = scenario_from_config(cfg);
    REQUIRE(sc.snr_db_grid.size() == 8);
    CHECK(sc.snr_db_grid.front() == -5.0);
    CHECK(sc.snr_db_grid.back() == 30.0);
}

TEST_CASE("per-user antenna list may be explicit and uneven") {
    ConfigMap cfg{{"users", "3"}, {"n_rx_per_user", "1,2,3"}, {"snr_db_grid", "0"},
                  {"bits", "3"}};
    SystemScenario sc = scenario_from_config(cfg);
    CHECK(sc.n_rx_per_user == std::vector<int>{1, 2, 3});
    CHECK(sc.n_rx_total() == 6);
}

TEST_CASE("complex correlation coefficient parses from a+bi") {
    ConfigMap cfg{{"users", "2"}, {"n_rx_per_user", "2,2"}, {"snr_db_grid", "0"},
                  {"bits", "3"},  {"corr_coeff", "0.5-0.25i"}};
    SystemScenario sc = scenario_from_config(cfg);
    CHECK(sc.corr_coeff.real() == doctest::Approx(0.5));
    CHECK(sc.corr_coeff.imag() == doctest::Approx(-0.25));
}

TEST_CASE("unknown keys are refused") {
    ConfigMap cfg{{"users", "2"}, {"n_rx_per_user", "2,2"}, {"snr_db_grid", "0"},
                  {"bits", "3"},  {"n_tx_typo", "64"}};
    CHECK_THROWS_AS(scenario_from_config(cfg), config_error);
}

TEST_CASE("unparsable values are config errors, not crashes") {
    ConfigMap cfg{{"users", "two"}, {"n_rx_per_user", "2,2"}, {"snr_db_grid", "0"},
                  {"bits", "3"}};
    CHECK_THROWS_AS(scenario_from_config(cfg), config_error);
}

TEST_CASE("overrides layer on top of file values") {
    ConfigMap cfg{{"users", "2"}, {"n_rx_per_user", "2,2"}, {"snr_db_grid", "0"},
                  {"bits", "3"},  {"trials", "10"}};
    apply_overrides(cfg, {"trials=25", "seed=7"});
    SystemScenario sc = scenario_from_config(cfg);
    CHECK(sc.trials == 25);
    CHECK(sc.seed == 7);
    CHECK_THROWS_AS(apply_overrides(cfg, {"no_equals_sign"}), config_error);
}

TEST_CASE("missing config file names the path") {
    CHECK_THROWS_WITH_AS(parse_config_file("definitely_not_here.cfg"),
                         doctest::Contains("definitely_not_here.cfg"), config_error);
}

} // TEST_SUITE
