// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace smoothsel {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule with `points` nodes mapped onto [lo, hi].
/// Supported sizes: 16, 32, 64.
QuadratureRule gauss_legendre(double lo, double hi, std::size_t points = 64);

/// Gauss-Hermite rule for E[f(Z)], Z ~ N(0, 1) (probabilists' weight,
/// weights sum to one), computed by Golub-Welsch.
QuadratureRule gauss_hermite(std::size_t points);

/// Integrate f over [lo, hi] with a `points`-node Gauss-Legendre rule.
template <class F>
double integrate(F&& f, double lo, double hi, std::size_t points = 64) {
    const QuadratureRule rule = gauss_legendre(lo, hi, points);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
    return s;
}

} // namespace smoothsel
