// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace smoothsel {

/// Error categories raised by the library. The numeric values are part of
/// the C API (see smoothsel.h) and must not be reordered.
enum class ErrorCode : int {
    ok = 0,
    invalid_argument = 1,
    split_too_small = 2,
    invalid_proportions = 3,
    empty_sample = 4,
    non_positive_bandwidth = 5,
    quadrature_failure = 6,
    unsupported_order = 7,
    schema_mismatch = 8,
    zero_variance = 9,
    infeasible_anchors = 10,
    no_linear_region = 11,
    log_of_zero = 12,
    degenerate_rate_denominator = 13,
    invalid_alpha = 14,
    non_binary_outcome = 15,
    precondition = 16,
    config_error = 17,
    data_error = 18,
    nonpositive_exponent = 19,
    internal = 99,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

} // namespace smoothsel
