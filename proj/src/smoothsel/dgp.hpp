// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "smoothsel/core.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>

namespace smoothsel {

inline double expit(double x) noexcept {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

/// Continuous-dose simulation design: L ~ N(0, I4), A | L ~ Beta(lambda, 1 - lambda),
/// Y | A, L ~ Bernoulli(mu(L, A)). The cusp variant puts a kink in
/// a -> E mu(L, a) at a = 0.15.
struct DoseResponseDgp {
    enum class Variant { smooth, cusp };
    static constexpr std::size_t dim_l = 4;

    Variant variant = Variant::smooth;

    double lambda(std::span<const double> l) const noexcept;
    double mu(std::span<const double> l, double a) const noexcept;
    /// Beta(lambda(l), 1 - lambda(l)) density at a in (0, 1).
    double treatment_density(double a, std::span<const double> l) const noexcept;
};

double cusp(double a) noexcept;

/// Scalar N(mean, sd^2) observations for the density-at-a-point family.
struct NormalDensityDgp {
    double mean = 0.0;
    double sd = 1.0;

    double density(double x) const noexcept;
};

/// Binary treatment with known propensity bounded below by `g_min`:
/// W ~ N(0, I2), g(1|W) = g_min + (1 - 2 g_min) expit(W1 + 0.5 W2),
/// Qbar(a, W) = expit(-0.5 + a + 0.5 W1 - 0.5 W2).
struct BinaryTreatmentDgp {
    static constexpr std::size_t dim_w = 2;
    double g_min = 0.05;

    double propensity(std::span<const double> w) const noexcept;
    double qbar(double a, std::span<const double> w) const noexcept;
};

using Dgp = std::variant<DoseResponseDgp, NormalDensityDgp, BinaryTreatmentDgp>;

Dgp parse_dgp(std::string_view name);
std::string_view dgp_name(const Dgp& dgp);

/// n i.i.d. draws, deterministic given the seed.
Dataset sample_dgp(const Dgp& dgp, std::size_t n, std::uint64_t seed);

} // namespace smoothsel
