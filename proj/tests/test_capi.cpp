// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothsel/smoothsel.h"

#include <doctest.h>

#include <chrono>
#include <memory>
#include <set>
#include <string>

namespace {

struct Config {
    smoothsel_config* raw = nullptr;
    Config() { REQUIRE(smoothsel_config_new(&raw) == SMOOTHSEL_OK); }
    ~Config() { smoothsel_config_free(raw); }
    int set(const char* k, const char* v) { return smoothsel_config_set(raw, k, v); }
    std::string get(const char* k) {
        const char* v = nullptr;
        REQUIRE(smoothsel_config_get(raw, k, &v) == SMOOTHSEL_OK);
        return v;
    }
};

using ResultPtr = std::unique_ptr<smoothsel_result, decltype(&smoothsel_result_free)>;
using DatasetPtr = std::unique_ptr<smoothsel_dataset, decltype(&smoothsel_dataset_free)>;

DatasetPtr read(const std::string& path) {
    smoothsel_dataset* d = nullptr;
    REQUIRE(smoothsel_dataset_read_csv(path.c_str(), &d) == SMOOTHSEL_OK);
    return DatasetPtr(d, smoothsel_dataset_free);
}

std::size_t column(const smoothsel_result* r, std::size_t t, const std::string& name) {
    for (std::size_t j = 0; j < smoothsel_result_column_count(r, t); ++j)
        if (name == smoothsel_result_column_name(r, t, j)) return j;
    FAIL("no column " << name);
    return 0;
}

} // namespace

TEST_CASE("defaults are filled in") {
    Config c;
    CHECK(c.set("family.name", "density") == SMOOTHSEL_OK);
    CHECK(c.set("family.x", "0") == SMOOTHSEL_OK);
    CHECK(c.get("split.p1") == "0.25");
    CHECK(c.get("split.p2") == "0.5");
    CHECK(c.get("epsilon") == "0.05");
    CHECK(c.get("alpha") == "0.05");
    CHECK(c.get("family.kernel") == "epanechnikov");
    CHECK(c.get("family.kernel_order") == "2");
    CHECK(smoothsel_config_validate(c.raw) == SMOOTHSEL_OK);
    CHECK(smoothsel_config_key_count(c.raw) > 20);
    CHECK(std::string(smoothsel_config_key(c.raw, 0)) == "seed");
}

TEST_CASE("configuration errors") {
    Config c;
    CHECK(c.set("split.p1", "0.7") == SMOOTHSEL_OK);
    CHECK(c.set("split.p2", "0.3") == SMOOTHSEL_OK);
    CHECK(smoothsel_config_validate(c.raw) == SMOOTHSEL_E_CONFIG);

    Config d;
    CHECK(d.set("bandwdith", "0.3") == SMOOTHSEL_E_CONFIG);
    CHECK(std::string(smoothsel_last_error()).find("bandwdith") != std::string::npos);
    CHECK(d.set("alpha", "abc") == SMOOTHSEL_E_CONFIG);
    CHECK(d.set("family.kernel", "triangle") == SMOOTHSEL_E_CONFIG);
    CHECK(d.set("sim.selectors", "adaptive,fixed:0.1") == SMOOTHSEL_E_CONFIG);
    CHECK(d.set("sim.selectors", "adaptive,fixed:0.1:1/7") == SMOOTHSEL_OK);
    CHECK(std::string(smoothsel_status_name(SMOOTHSEL_E_CONFIG)) != "Unknown");
    CHECK(smoothsel_config_set(nullptr, "alpha", "0.1") == SMOOTHSEL_E_INVALID_ARGUMENT);
}

TEST_CASE("estimate on the bundled density sample") {
    Config c;
    auto data = read(SMOOTHSEL_DATA_DIR "/density_sample.csv");
    CHECK(smoothsel_dataset_size(data.get()) == 2000);
    smoothsel_result* raw = nullptr;
    REQUIRE(smoothsel_estimate(c.raw, data.get(), &raw) == SMOOTHSEL_OK);
    ResultPtr r(raw, smoothsel_result_free);
    CHECK(std::string(smoothsel_result_table_name(r.get(), 0)) == "estimate");
    CHECK(smoothsel_result_row_count(r.get(), 0) == 1);
    std::set<std::string> cols;
    for (std::size_t j = 0; j < smoothsel_result_column_count(r.get(), 0); ++j)
        cols.insert(smoothsel_result_column_name(r.get(), 0, j));
    for (const char* name : {"point", "ci_low", "ci_high", "alt_ci_low", "alt_ci_high", "delta_eps", "delta_zero",
                             "r_hat", "beta_hat", "gamma_hat", "nu_hat", "c_sigma", "flags", "alpha", "n", "m"})
        CHECK(cols.count(name) == 1);
    double point = 0.0, lo = 0.0, hi = 0.0;
    REQUIRE(smoothsel_result_value(r.get(), 0, 0, column(r.get(), 0, "point"), &point) == SMOOTHSEL_OK);
    REQUIRE(smoothsel_result_value(r.get(), 0, 0, column(r.get(), 0, "ci_low"), &lo) == SMOOTHSEL_OK);
    REQUIRE(smoothsel_result_value(r.get(), 0, 0, column(r.get(), 0, "ci_high"), &hi) == SMOOTHSEL_OK);
    CHECK(lo < point);
    CHECK(point < hi);
    double dummy = 0.0;
    CHECK(smoothsel_result_value(r.get(), 0, 0, column(r.get(), 0, "flags"), &dummy) == SMOOTHSEL_E_INVALID_ARGUMENT);
    CHECK(smoothsel_result_cell(r.get(), 0, 5, 0) == nullptr);
}

TEST_CASE("select reports rates and the grid") {
    Config c;
    auto data = read(SMOOTHSEL_DATA_DIR "/density_sample.csv");
    smoothsel_result* raw = nullptr;
    REQUIRE(smoothsel_select(c.raw, data.get(), &raw) == SMOOTHSEL_OK);
    ResultPtr r(raw, smoothsel_result_free);
    REQUIRE(smoothsel_result_table_count(r.get()) == 2);
    CHECK(std::string(smoothsel_result_table_name(r.get(), 0)) == "rates");
    CHECK(std::string(smoothsel_result_table_name(r.get(), 1)) == "grid");
    CHECK(smoothsel_result_row_count(r.get(), 1) == 12);
}

TEST_CASE("simulate smoke run") {
    Config c;
    CHECK(c.set("family.name", "dose_response") == SMOOTHSEL_OK);
    CHECK(c.set("sim.n", "500") == SMOOTHSEL_OK);
    CHECK(c.set("sim.reps", "2") == SMOOTHSEL_OK);
    const auto start = std::chrono::steady_clock::now();
    smoothsel_result* raw = nullptr;
    REQUIRE(smoothsel_simulate(c.raw, &raw) == SMOOTHSEL_OK);
    ResultPtr r(raw, smoothsel_result_free);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(secs < 10.0);
    CHECK(std::string(smoothsel_result_table_name(r.get(), 0)) == "summary");
    CHECK(smoothsel_result_row_count(r.get(), 0) == 6);
    CHECK(smoothsel_result_row_count(r.get(), 1) == 12);
}

TEST_CASE("oracle truth table") {
    Config c;
    CHECK(c.set("family.name", "dose_response") == SMOOTHSEL_OK);
    smoothsel_result* raw = nullptr;
    REQUIRE(smoothsel_oracle(c.raw, &raw) == SMOOTHSEL_OK);
    ResultPtr r(raw, smoothsel_result_free);
    CHECK(smoothsel_result_row_count(r.get(), 0) == 4);
    double psi = 0.0;
    REQUIRE(smoothsel_result_value(r.get(), 0, 0, column(r.get(), 0, "psi_true"), &psi) == SMOOTHSEL_OK);
    CHECK(psi == doctest::Approx(0.6840).epsilon(1e-4));
}

TEST_CASE("datasets through the C API") {
    smoothsel_dataset* raw = nullptr;
    CHECK(smoothsel_dataset_read_csv("/nonexistent/input.csv", &raw) == SMOOTHSEL_E_DATA);
    CHECK(raw == nullptr);

    double w[40], a[20], y[20];
    for (int i = 0; i < 20; ++i) {
        w[2 * i] = 0.1 * i;
        w[2 * i + 1] = -0.1 * i;
        a[i] = i % 2;
        y[i] = (i / 2) % 2;
    }
    REQUIRE(smoothsel_dataset_from_arrays(w, 2, a, y, 20, &raw) == SMOOTHSEL_OK);
    DatasetPtr d(raw, smoothsel_dataset_free);
    CHECK(smoothsel_dataset_size(d.get()) == 20);

    Config c;
    smoothsel_result* res = nullptr;
    CHECK(smoothsel_estimate(c.raw, d.get(), &res) == SMOOTHSEL_E_SCHEMA_MISMATCH);
    CHECK(res == nullptr);

    const double o[3] = {0.0, 1.0, 2.0};
    smoothsel_dataset* s = nullptr;
    REQUIRE(smoothsel_dataset_from_scalar(o, 3, &s) == SMOOTHSEL_OK);
    DatasetPtr sd(s, smoothsel_dataset_free);
    CHECK(smoothsel_estimate(c.raw, sd.get(), &res) == SMOOTHSEL_E_SPLIT_TOO_SMALL);
}
