// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "smoothsel/core.hpp"
#include "smoothsel/error.hpp"

#include <doctest.h>

#include <numeric>
#include <vector>

#define CHECK_FAILS_WITH(expr, expected)                                  \
    do {                                                                  \
        bool smoothsel_thrown = false;                                    \
        try {                                                             \
            (void)(expr);                                                 \
        } catch (const ::smoothsel::Error& smoothsel_err) {               \
            smoothsel_thrown = true;                                      \
            CHECK(smoothsel_err.code() == (expected));                    \
        }                                                                 \
        CHECK_MESSAGE(smoothsel_thrown, "expected an error from " #expr); \
    } while (0)

namespace smoothsel::test {

inline IndexList iota_list(std::size_t n, std::size_t from = 0) {
    IndexList idx(n);
    std::iota(idx.begin(), idx.end(), from);
    return idx;
}

} // namespace smoothsel::test
