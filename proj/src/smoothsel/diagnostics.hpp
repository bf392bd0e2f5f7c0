// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>

namespace smoothsel {

/// Non-fatal conditions recorded along a computation.
struct Diagnostics {
    std::size_t propensity_floored = 0;
    bool degenerate_regression = false;
    bool sign_flip_b_prime = false;
    bool sign_flip_sigma_prime = false;
    bool no_linear_region = false;
    bool anchors_fallback = false;
    bool delta_clamped = false;
    bool fluctuation_diverged = false;

    void merge(const Diagnostics& other);
    /// Pipe-separated flag names, "none" when nothing was recorded.
    std::string flags() const;
};

} // namespace smoothsel
