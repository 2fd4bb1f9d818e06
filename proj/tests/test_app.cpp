#include "mulsemi/app.hpp"
#include "mulsemi/parallel.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

using namespace mulsemi;
using namespace mulsemi::app;

namespace {

const std::string kDir = MULSEMI_CONFIG_DIR;

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("analyze the bundled zabczyk config") {
    const Config cfg = Config::load(kDir + "/zabczyk.json");
    const Json report = Json::parse(run_analyze(cfg));
    CHECK(report["uniform"]["verdict"] == "Stable");
    CHECK(std::abs(report["uniform"]["decay_eps"].get<double>() - 0.1) < 1e-6);
    CHECK(report["strong"]["verdict"] == "Stable");
    CHECK(report["strong"]["bound_M"].get<double>() > 1e3);
    CHECK(report["meta"]["config_hash"] == cfg.hash());
    CHECK(report["meta"]["norm"].is_string());
    CHECK(report["discrete"].is_object());
}

TEST_CASE("analyze rotation in atomic mode") {
    const Json report = Json::parse(run_analyze(Config::load(kDir + "/rotation.json")));
    CHECK(report["almost_weak"]["verdict"] == "NotStable");
    CHECK(report["uniform"]["verdict"] == "NotStable");
    // Complex values serialize as [re, im].
    const Json& w = report["almost_weak"]["witnesses"][0]["value"];
    REQUIRE(w.is_array());
    CHECK(w.size() == 2);
}

TEST_CASE("analyze is deterministic across runs and thread counts") {
    const Config cfg = Config::load(kDir + "/zabczyk.json");
    set_thread_count(1);
    const std::string a = run_analyze(cfg);
    const std::string b = run_analyze(cfg);
    set_thread_count(4);
    const std::string c = run_analyze(cfg);
    set_thread_count(0);
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("config errors carry positions") {
    try {
        Config::parse("{\n  \"family\": {\"builtin\": \"zabczyk\",, \"N\": 3}\n}");
        FAIL("expected a parse error");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() > 0);
    }
    CHECK_THROWS_AS(Config::parse("{\"family\": {\"builtin\": \"nope\"}}"), ConfigError);
    CHECK_THROWS_AS(Config::parse("{\"family\": {\"builtin\": \"zabczyk\", \"N\": 3}, \"extra\": 1}"), ConfigError);
    CHECK_THROWS_AS(Config::parse("{\"family\": {\"builtin\": \"zabczyk\", \"N\": 3}, \"p\": 0.5}"), ConfigError);
    CHECK_THROWS_AS(Config::parse("{}"), ConfigError);
    CHECK_THROWS_AS(Config::load(kDir + "/missing.json"), ConfigError);
}

TEST_CASE("config hash tracks semantic fields only") {
    const std::string base = R"({"family": {"builtin": "zabczyk", "N": 3}})";
    const Config a = Config::parse(base);
    const Config same = Config::parse(R"({"family": {"N": 3, "builtin": "zabczyk"}, "p": 2,
                                          "output": {"json_path": "x.json"}})");
    const Config other = Config::parse(R"({"family": {"builtin": "zabczyk", "N": 4}})");
    const Config tol = Config::parse(R"({"family": {"builtin": "zabczyk", "N": 3},
                                         "tolerances": {"margin": 1e-3}})");
    CHECK(a.hash() == same.hash());
    CHECK(a.hash() != other.hash());
    CHECK(a.hash() != tol.hash());
    CHECK(same.json_path() == std::optional<std::string>("x.json"));
}

TEST_CASE("seed override replaces probe and family seeds") {
    const std::string text = R"({"family": {"builtin": "random-hurwitz", "seed": 1, "n": 2, "cells": 2}})";
    const Config a = Config::parse(text);
    const Config b = Config::parse(text, Overrides{5});
    CHECK(b.normalized()["family"]["seed"] == 5);
    CHECK(b.normalized()["probes"]["seed"] == 5);
    CHECK(a.hash() != b.hash());
}

TEST_CASE("inline matrices") {
    const Json report = Json::parse(run_analyze(Config::load(kDir + "/inline_matrices.json")));
    CHECK(report["uniform"]["verdict"].is_string());
    CHECK_THROWS_AS(Config::parse(R"({"family": {"matrices": [[[[1,0]], [[0,0]]]]}})"), ConfigError);
}

TEST_CASE("sweep over truncation size") {
    const auto rows = csv_rows(run_sweep(Config::load(kDir + "/sweep_zabczyk.json")));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"param", "decay_eps", "bound_M", "max_cluster_measure"});
    const double expected[] = {0.2, 0.1, 0.05};
    for (int k = 0; k < 3; ++k) CHECK(std::abs(std::stod(rows[k + 1][1]) - expected[k]) < 1e-6);
    CHECK(std::stod(rows[3][2]) > std::stod(rows[2][2]));
}

TEST_CASE("sweep over delta") {
    const auto rows = csv_rows(run_sweep(Config::load(kDir + "/sweep_rotation_delta.json")));
    REQUIRE(rows.size() >= 3);
    const double ratio = std::stod(rows[1][3]) / std::stod(rows[2][3]);
    CHECK(std::abs(ratio - 2.0) <= 0.2);
}

TEST_CASE("sweep needs values") {
    CHECK_THROWS_AS(run_sweep(Config::parse(R"({"family": {"builtin": "zabczyk", "N": 3},
                                                "sweep": {"parameter": "N", "values": []}})")),
                    ConfigError);
    CHECK_THROWS_AS(run_sweep(Config::parse(R"({"family": {"builtin": "zabczyk", "N": 3},
                                                "sweep": {"parameter": "bogus", "values": [1]}})")),
                    ConfigError);
}

TEST_CASE("trajectory output") {
    const auto rows = csv_rows(run_trajectory(Config::load(kDir + "/diagonal_trajectory.json")));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"t", "ess_sup_norm", "probe_0"});
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(std::stod(rows[k + 1][1]) - std::exp(-k)) < 1e-9);
        CHECK(std::abs(std::stod(rows[k + 1][2]) - std::exp(-k)) < 1e-9);
    }
    CHECK(std::stod(rows[1][1]) == 1.0);
}

TEST_CASE("zabczyk trajectory shows a transient") {
    const Config cfg = Config::parse(R"({"family": {"builtin": "zabczyk", "N": 10},
                                         "time": {"horizon": 1000, "grid_points": 201}})");
    const auto rows = csv_rows(run_trajectory(cfg));
    double peak = 0.0;
    std::size_t arg = 0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double v = std::stod(rows[k][1]);
        if (v > peak) peak = v, arg = k;
    }
    CHECK(peak > 10.0);
    CHECK(std::stod(rows.back()[1]) < peak);
    CHECK(arg > 1);
    CHECK(arg < rows.size() - 1);
}
