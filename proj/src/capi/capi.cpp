// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothsel/smoothsel.h"

#include "capi/runs.hpp"
#include "capi/settings.hpp"
#include "smoothsel/error.hpp"

#include <charconv>
#include <exception>
#include <fstream>
#include <new>
#include <string>

struct smoothsel_config {
    smoothsel::capi::Settings settings;
};

struct smoothsel_dataset {
    smoothsel::Dataset data;
};

struct smoothsel_result {
    smoothsel::capi::Result result;
};

namespace {

thread_local std::string last_error;

template <class F>
int guarded(F&& f) {
    try {
        f();
        last_error.clear();
        return SMOOTHSEL_OK;
    } catch (const smoothsel::Error& e) {
        last_error = e.what();
        return static_cast<int>(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return SMOOTHSEL_E_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return SMOOTHSEL_E_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return SMOOTHSEL_E_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (!p) smoothsel::fail(smoothsel::ErrorCode::invalid_argument, std::string(what) + " is null");
}

const smoothsel::capi::Table* table_at(const smoothsel_result* r, size_t t) {
    if (!r || t >= r->result.tables.size()) return nullptr;
    return &r->result.tables[t];
}

} // namespace

extern "C" {

const char* smoothsel_version(void) { return "1.0.0"; }

const char* smoothsel_last_error(void) { return last_error.c_str(); }

const char* smoothsel_status_name(int status) {
    if (status == SMOOTHSEL_OK) return "Ok";
    if ((status >= 1 && status <= 19) || status == SMOOTHSEL_E_INTERNAL)
        return smoothsel::error_code_name(static_cast<smoothsel::ErrorCode>(status));
    return "Unknown";
}

int smoothsel_config_new(smoothsel_config** out) {
    return guarded([&] {
        require(out, "output handle");
        *out = new smoothsel_config{};
    });
}

void smoothsel_config_free(smoothsel_config* config) { delete config; }

int smoothsel_config_set(smoothsel_config* config, const char* key, const char* value) {
    return guarded([&] {
        require(config, "config");
        require(key, "key");
        require(value, "value");
        config->settings.set(key, value);
    });
}

int smoothsel_config_get(const smoothsel_config* config, const char* key, const char** value) {
    return guarded([&] {
        require(config, "config");
        require(key, "key");
        require(value, "value");
        *value = config->settings.get(key).c_str();
    });
}

size_t smoothsel_config_key_count(const smoothsel_config* config) {
    return config ? config->settings.keys().size() : 0;
}

const char* smoothsel_config_key(const smoothsel_config* config, size_t index) {
    if (!config || index >= config->settings.keys().size()) return nullptr;
    return config->settings.keys()[index].c_str();
}

int smoothsel_config_validate(const smoothsel_config* config) {
    return guarded([&] {
        require(config, "config");
        config->settings.validate();
    });
}

int smoothsel_dataset_read_csv(const char* path, smoothsel_dataset** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "output handle");
        *out = new smoothsel_dataset{smoothsel::read_csv(path)};
    });
}

int smoothsel_dataset_from_scalar(const double* o, size_t n, smoothsel_dataset** out) {
    return guarded([&] {
        require(o, "o");
        require(out, "output handle");
        *out = new smoothsel_dataset{smoothsel::Dataset::scalar(std::vector<double>(o, o + n))};
    });
}

int smoothsel_dataset_from_arrays(const double* w, size_t dim_w, const double* a, const double* y, size_t n,
                                  smoothsel_dataset** out) {
    return guarded([&] {
        if (dim_w > 0) require(w, "w");
        require(a, "a");
        require(y, "y");
        require(out, "output handle");
        std::vector<double> wv;
        if (dim_w > 0) wv.assign(w, w + n * dim_w);
        *out = new smoothsel_dataset{smoothsel::Dataset::way(dim_w, std::move(wv), std::vector<double>(a, a + n),
                                                             std::vector<double>(y, y + n))};
    });
}

int smoothsel_dataset_sample(const smoothsel_config* config, size_t n, uint64_t seed, smoothsel_dataset** out) {
    return guarded([&] {
        require(config, "config");
        require(out, "output handle");
        *out = new smoothsel_dataset{smoothsel::sample_dgp(config->settings.dgp(), n, seed)};
    });
}

int smoothsel_dataset_write_csv(const smoothsel_dataset* data, const char* path) {
    return guarded([&] {
        require(data, "dataset");
        require(path, "path");
        std::ofstream out(path);
        if (!out) smoothsel::fail(smoothsel::ErrorCode::data_error, std::string("cannot write '") + path + "'");
        smoothsel::write_csv(data->data, out);
        if (!out) smoothsel::fail(smoothsel::ErrorCode::data_error, std::string("write to '") + path + "' failed");
    });
}

size_t smoothsel_dataset_size(const smoothsel_dataset* data) { return data ? data->data.size() : 0; }

void smoothsel_dataset_free(smoothsel_dataset* data) { delete data; }

int smoothsel_estimate(const smoothsel_config* config, const smoothsel_dataset* data, smoothsel_result** out) {
    return guarded([&] {
        require(config, "config");
        require(data, "dataset");
        require(out, "output handle");
        *out = new smoothsel_result{smoothsel::capi::run_estimate(config->settings, data->data)};
    });
}

int smoothsel_select(const smoothsel_config* config, const smoothsel_dataset* data, smoothsel_result** out) {
    return guarded([&] {
        require(config, "config");
        require(data, "dataset");
        require(out, "output handle");
        *out = new smoothsel_result{smoothsel::capi::run_select(config->settings, data->data)};
    });
}

int smoothsel_simulate(const smoothsel_config* config, smoothsel_result** out) {
    return guarded([&] {
        require(config, "config");
        require(out, "output handle");
        *out = new smoothsel_result{smoothsel::capi::run_simulate(config->settings)};
    });
}

int smoothsel_oracle(const smoothsel_config* config, smoothsel_result** out) {
    return guarded([&] {
        require(config, "config");
        require(out, "output handle");
        *out = new smoothsel_result{smoothsel::capi::run_oracle(config->settings)};
    });
}

size_t smoothsel_result_table_count(const smoothsel_result* result) {
    return result ? result->result.tables.size() : 0;
}

const char* smoothsel_result_table_name(const smoothsel_result* result, size_t table) {
    const auto* t = table_at(result, table);
    return t ? t->name.c_str() : nullptr;
}

size_t smoothsel_result_column_count(const smoothsel_result* result, size_t table) {
    const auto* t = table_at(result, table);
    return t ? t->columns.size() : 0;
}

size_t smoothsel_result_row_count(const smoothsel_result* result, size_t table) {
    const auto* t = table_at(result, table);
    return t ? t->rows.size() : 0;
}

const char* smoothsel_result_column_name(const smoothsel_result* result, size_t table, size_t column) {
    const auto* t = table_at(result, table);
    if (!t || column >= t->columns.size()) return nullptr;
    return t->columns[column].c_str();
}

const char* smoothsel_result_cell(const smoothsel_result* result, size_t table, size_t row, size_t column) {
    const auto* t = table_at(result, table);
    if (!t || row >= t->rows.size() || column >= t->columns.size()) return nullptr;
    return t->rows[row][column].c_str();
}

int smoothsel_result_value(const smoothsel_result* result, size_t table, size_t row, size_t column,
                           double* value) {
    return guarded([&] {
        require(value, "value");
        const char* cell = smoothsel_result_cell(result, table, row, column);
        if (!cell) smoothsel::fail(smoothsel::ErrorCode::invalid_argument, "cell index out of range");
        const std::string_view text(cell);
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), *value);
        if (ec != std::errc() || ptr != text.data() + text.size())
            smoothsel::fail(smoothsel::ErrorCode::invalid_argument, "cell '" + std::string(text) + "' is not a number");
    });
}

void smoothsel_result_free(smoothsel_result* result) { delete result; }

} // extern "C"
