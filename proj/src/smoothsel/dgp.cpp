// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothsel/dgp.hpp"

#include "smoothsel/error.hpp"

#include <cmath>
#include <algorithm>
#include <numbers>
#include <random>
#include <string>

namespace smoothsel {

double DoseResponseDgp::lambda(std::span<const double> l) const noexcept {
    return expit(-0.8 + 0.1 * l[0] + 0.1 * l[1] - 0.1 * l[2] + 0.2 * l[3]);
}

double cusp(double a) noexcept { return a <= 0.15 ? a : 0.15 - 2.0 * (a - 0.15); }

double DoseResponseDgp::mu(std::span<const double> l, double a) const noexcept {
    const double base = 1.0 + 0.2 * l[0] + 0.2 * l[1] + 0.3 * l[2] - 0.1 * l[3];
    const double s = 20.0 * a;
    if (variant == Variant::smooth)
        return expit(base + s * (0.1 - 0.1 * l[0] + 0.1 * l[2] - 0.13 * 0.13 * s * s));
    return expit(base + s * (-0.1 * l[0] + 0.1 * l[2] - 0.13 * 0.13 * s * s) + 5.0 * cusp(a));
}

double DoseResponseDgp::treatment_density(double a, std::span<const double> l) const noexcept {
    if (!(a > 0.0 && a < 1.0)) return 0.0;
    const double lam = lambda(l);
    // B(lam, 1 - lam) = pi / sin(pi lam)
    const double log_b = std::log(std::numbers::pi / std::sin(std::numbers::pi * lam));
    return std::exp((lam - 1.0) * std::log(a) - lam * std::log1p(-a) - log_b);
}

double NormalDensityDgp::density(double x) const noexcept {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

double BinaryTreatmentDgp::propensity(std::span<const double> w) const noexcept {
    return g_min + (1.0 - 2.0 * g_min) * expit(w[0] + 0.5 * w[1]);
}

double BinaryTreatmentDgp::qbar(double a, std::span<const double> w) const noexcept {
    return expit(-0.5 + a + 0.5 * w[0] - 0.5 * w[1]);
}

Dgp parse_dgp(std::string_view name) {
    if (name == "smooth") return DoseResponseDgp{DoseResponseDgp::Variant::smooth};
    if (name == "cusp") return DoseResponseDgp{DoseResponseDgp::Variant::cusp};
    if (name == "normal") return NormalDensityDgp{};
    if (name == "binary") return BinaryTreatmentDgp{};
    fail(ErrorCode::invalid_argument, "unknown dgp '" + std::string(name) + "'");
}

std::string_view dgp_name(const Dgp& dgp) {
    if (const auto* d = std::get_if<DoseResponseDgp>(&dgp))
        return d->variant == DoseResponseDgp::Variant::smooth ? "smooth" : "cusp";
    if (std::holds_alternative<NormalDensityDgp>(dgp)) return "normal";
    return "binary";
}

namespace {

// Beta(p, q) via two Gamma draws; the Gamma(shape < 1) draws are
// generated as Gamma(shape + 1) * U^(1/shape) to stay accurate near zero.
double sample_beta(std::mt19937_64& gen, double p, double q) {
    auto log_gamma_draw = [&](double shape) {
        std::gamma_distribution<double> g(shape + 1.0, 1.0);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double uu = u(gen);
        while (uu <= 0.0) uu = u(gen);
        return std::log(g(gen)) + std::log(uu) / shape;
    };
    const double lx = log_gamma_draw(p);
    const double ly = log_gamma_draw(q);
    const double mx = std::max(lx, ly);
    const double x = std::exp(lx - mx);
    const double y = std::exp(ly - mx);
    double a = x / (x + y);
    // Keep draws strictly inside (0, 1) where the density is defined.
    const double tiny = 1e-12;
    return std::min(std::max(a, tiny), 1.0 - tiny);
}

} // namespace

Dataset sample_dgp(const Dgp& dgp, std::size_t n, std::uint64_t seed) {
    if (n < 1) fail(ErrorCode::precondition, "sample size must be positive");
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    if (const auto* d = std::get_if<NormalDensityDgp>(&dgp)) {
        std::vector<double> o(n);
        for (double& v : o) v = d->mean + d->sd * normal(gen);
        return Dataset::scalar(std::move(o));
    }
    if (const auto* d = std::get_if<DoseResponseDgp>(&dgp)) {
        constexpr std::size_t dim = DoseResponseDgp::dim_l;
        std::vector<double> w(n * dim), a(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::span<double> l(w.data() + i * dim, dim);
            for (double& v : l) v = normal(gen);
            const double lam = d->lambda(l);
            a[i] = sample_beta(gen, lam, 1.0 - lam);
            y[i] = unif(gen) < d->mu(l, a[i]) ? 1.0 : 0.0;
        }
        return Dataset::way(dim, std::move(w), std::move(a), std::move(y));
    }
    const auto& d = std::get<BinaryTreatmentDgp>(dgp);
    constexpr std::size_t dim = BinaryTreatmentDgp::dim_w;
    std::vector<double> w(n * dim), a(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::span<double> wi(w.data() + i * dim, dim);
        for (double& v : wi) v = normal(gen);
        a[i] = unif(gen) < d.propensity(wi) ? 1.0 : 0.0;
        y[i] = unif(gen) < d.qbar(a[i], wi) ? 1.0 : 0.0;
    }
    return Dataset::way(dim, std::move(w), std::move(a), std::move(y));
}

} // namespace smoothsel
