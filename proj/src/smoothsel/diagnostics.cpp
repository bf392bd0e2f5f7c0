// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothsel/diagnostics.hpp"

namespace smoothsel {

void Diagnostics::merge(const Diagnostics& other) {
    propensity_floored += other.propensity_floored;
    degenerate_regression |= other.degenerate_regression;
    sign_flip_b_prime |= other.sign_flip_b_prime;
    sign_flip_sigma_prime |= other.sign_flip_sigma_prime;
    no_linear_region |= other.no_linear_region;
    anchors_fallback |= other.anchors_fallback;
    delta_clamped |= other.delta_clamped;
    fluctuation_diverged |= other.fluctuation_diverged;
}

std::string Diagnostics::flags() const {
    std::string out;
    auto add = [&](bool on, const char* name) {
        if (!on) return;
        if (!out.empty()) out += '|';
        out += name;
    };
    add(propensity_floored > 0, "propensity_floored");
    add(degenerate_regression, "degenerate_regression");
    add(sign_flip_b_prime, "sign_flip_b_prime");
    add(sign_flip_sigma_prime, "sign_flip_sigma_prime");
    add(no_linear_region, "no_linear_region");
    add(anchors_fallback, "anchors_fallback");
    add(delta_clamped, "delta_clamped");
    add(fluctuation_diverged, "fluctuation_diverged");
    return out.empty() ? "none" : out;
}

} // namespace smoothsel
