/* Copyright (C) 2026 The smoothsel authors
 * SPDX-License-Identifier: Apache-2.0 */

/* C interface to smoothsel: data-adaptive smoothing-level selection for
 * non-regular parameters. All objects are opaque handles. Every function that
 * can fail returns a smoothsel_status; the message of the last failure on the
 * calling thread is available from smoothsel_last_error(). */

#ifndef SMOOTHSEL_H
#define SMOOTHSEL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SMOOTHSEL_BUILDING)
#    define SMOOTHSEL_API __declspec(dllexport)
#  else
#    define SMOOTHSEL_API __declspec(dllimport)
#  endif
#else
#  define SMOOTHSEL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum smoothsel_status {
    SMOOTHSEL_OK = 0,
    SMOOTHSEL_E_INVALID_ARGUMENT = 1,
    SMOOTHSEL_E_SPLIT_TOO_SMALL = 2,
    SMOOTHSEL_E_INVALID_PROPORTIONS = 3,
    SMOOTHSEL_E_EMPTY_SAMPLE = 4,
    SMOOTHSEL_E_NON_POSITIVE_BANDWIDTH = 5,
    SMOOTHSEL_E_QUADRATURE = 6,
    SMOOTHSEL_E_UNSUPPORTED_ORDER = 7,
    SMOOTHSEL_E_SCHEMA_MISMATCH = 8,
    SMOOTHSEL_E_ZERO_VARIANCE = 9,
    SMOOTHSEL_E_INFEASIBLE_ANCHORS = 10,
    SMOOTHSEL_E_NO_LINEAR_REGION = 11,
    SMOOTHSEL_E_LOG_OF_ZERO = 12,
    SMOOTHSEL_E_DEGENERATE_RATE = 13,
    SMOOTHSEL_E_INVALID_ALPHA = 14,
    SMOOTHSEL_E_NON_BINARY_OUTCOME = 15,
    SMOOTHSEL_E_PRECONDITION = 16,
    SMOOTHSEL_E_CONFIG = 17,
    SMOOTHSEL_E_DATA = 18,
    SMOOTHSEL_E_NONPOSITIVE_EXPONENT = 19,
    SMOOTHSEL_E_INTERNAL = 99
} smoothsel_status;

typedef struct smoothsel_config smoothsel_config;
typedef struct smoothsel_dataset smoothsel_dataset;
typedef struct smoothsel_result smoothsel_result;

SMOOTHSEL_API const char* smoothsel_version(void);
SMOOTHSEL_API const char* smoothsel_last_error(void);
/* Symbolic name such as "ConfigError"; "Unknown" for codes outside the enum. */
SMOOTHSEL_API const char* smoothsel_status_name(int status);

/* Configuration: a flat set of dotted keys, all pre-filled with defaults.
 * Setting a key that does not exist or a malformed value fails with
 * SMOOTHSEL_E_CONFIG and a message naming the key. */
SMOOTHSEL_API int smoothsel_config_new(smoothsel_config** out);
SMOOTHSEL_API void smoothsel_config_free(smoothsel_config* config);
SMOOTHSEL_API int smoothsel_config_set(smoothsel_config* config, const char* key, const char* value);
/* The returned string lives until the key is set again or the config is freed. */
SMOOTHSEL_API int smoothsel_config_get(const smoothsel_config* config, const char* key,
                                       const char** value);
SMOOTHSEL_API size_t smoothsel_config_key_count(const smoothsel_config* config);
SMOOTHSEL_API const char* smoothsel_config_key(const smoothsel_config* config, size_t index);
/* Cross-key checks (for example split.p1 < split.p2). Runs call this first. */
SMOOTHSEL_API int smoothsel_config_validate(const smoothsel_config* config);

/* Datasets: either scalar rows (column o) or rows (w1..wd, a, y). */
SMOOTHSEL_API int smoothsel_dataset_read_csv(const char* path, smoothsel_dataset** out);
SMOOTHSEL_API int smoothsel_dataset_from_scalar(const double* o, size_t n, smoothsel_dataset** out);
/* w is row-major, n rows of dim_w values. */
SMOOTHSEL_API int smoothsel_dataset_from_arrays(const double* w, size_t dim_w, const double* a,
                                                const double* y, size_t n,
                                                smoothsel_dataset** out);
/* n rows from the design named by dgp.name. */
SMOOTHSEL_API int smoothsel_dataset_sample(const smoothsel_config* config, size_t n, uint64_t seed,
                                           smoothsel_dataset** out);
SMOOTHSEL_API int smoothsel_dataset_write_csv(const smoothsel_dataset* data, const char* path);
SMOOTHSEL_API size_t smoothsel_dataset_size(const smoothsel_dataset* data);
SMOOTHSEL_API void smoothsel_dataset_free(smoothsel_dataset* data);

/* Runs. Each produces a result made of named tables of text cells. */
SMOOTHSEL_API int smoothsel_estimate(const smoothsel_config* config, const smoothsel_dataset* data,
                                     smoothsel_result** out);
SMOOTHSEL_API int smoothsel_select(const smoothsel_config* config, const smoothsel_dataset* data,
                                   smoothsel_result** out);
SMOOTHSEL_API int smoothsel_simulate(const smoothsel_config* config, smoothsel_result** out);
SMOOTHSEL_API int smoothsel_oracle(const smoothsel_config* config, smoothsel_result** out);

SMOOTHSEL_API size_t smoothsel_result_table_count(const smoothsel_result* result);
SMOOTHSEL_API const char* smoothsel_result_table_name(const smoothsel_result* result, size_t table);
SMOOTHSEL_API size_t smoothsel_result_column_count(const smoothsel_result* result, size_t table);
SMOOTHSEL_API size_t smoothsel_result_row_count(const smoothsel_result* result, size_t table);
SMOOTHSEL_API const char* smoothsel_result_column_name(const smoothsel_result* result, size_t table,
                                                       size_t column);
SMOOTHSEL_API const char* smoothsel_result_cell(const smoothsel_result* result, size_t table,
                                                size_t row, size_t column);
/* Numeric value of a cell; SMOOTHSEL_E_INVALID_ARGUMENT if it is not a number. */
SMOOTHSEL_API int smoothsel_result_value(const smoothsel_result* result, size_t table, size_t row,
                                         size_t column, double* value);
SMOOTHSEL_API void smoothsel_result_free(smoothsel_result* result);

#ifdef __cplusplus
}
#endif

#endif
