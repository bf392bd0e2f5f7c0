// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothsel/families.hpp"
#include "smoothsel/dgp.hpp"

#include "support.hpp"

#include <cmath>
#include <random>

using namespace smoothsel;
using smoothsel::test::iota_list;

namespace {

std::shared_ptr<const Regression> true_mu(const DoseResponseDgp& dgp) {
    return std::make_shared<InjectedRegression>(
        [dgp](double a, std::span<const double> w) { return dgp.mu(w, a); });
}

std::shared_ptr<const Regression> constant_qbar(double c) {
    return std::make_shared<InjectedRegression>([c](double, std::span<const double>) { return c; });
}

} // namespace

TEST_CASE("density nuisance is the empirical law") {
    const Dataset d = Dataset::scalar({0.1, 0.2, 0.3, 0.4});
    const auto fam = SmoothedFamily::density(0.0);
    const IndexList sub = {1, 3};
    const NuisanceFit fit = fam.fit_nuisance(d, sub);
    CHECK(fit.qbar == nullptr);
    CHECK(fit.qw_sample == sub);
    CHECK(fit.qw->size() == 2);
}

TEST_CASE("injected regression passes through") {
    const DoseResponseDgp dgp;
    const Dataset d = sample_dgp(dgp, 50, 3);
    auto fam = SmoothedFamily::dose_response(0.15, Kernel(), beta_dgp_propensity(dgp));
    fam.with_regression(true_mu(dgp));
    const NuisanceFit fit = fam.fit_nuisance(d, iota_list(50));
    std::mt19937_64 g(11);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u;
    for (int k = 0; k < 10; ++k) {
        const double l[4] = {z(g), z(g), z(g), z(g)};
        const double a = u(g);
        CHECK((*fit.qbar)(a, l) == dgp.mu(l, a));
    }
}

TEST_CASE("Nadaraya-Watson fit of the dose-response design") {
    // Threshold set from observed errors over eight seeds: sup error 0.26 to 0.64
    // and mean absolute error 0.045 to 0.076 on 100 design-distributed probes.
    const DoseResponseDgp dgp;
    const Dataset d = sample_dgp(dgp, 2000, 100);
    const Dataset probe = sample_dgp(dgp, 100, 900);
    const auto fam = SmoothedFamily::dose_response(0.15, Kernel(), beta_dgp_propensity(dgp));
    const NuisanceFit fit = fam.fit_nuisance(d, iota_list(2000));
    double worst = 0.0, total = 0.0;
    for (Index k = 0; k < probe.size(); ++k) {
        const double err = std::abs((*fit.qbar)(probe.a(k), probe.w(k)) - dgp.mu(probe.w(k), probe.a(k)));
        worst = std::max(worst, err);
        total += err;
    }
    CHECK(worst <= 0.70);
    CHECK(total / 100.0 <= 0.10);
}

TEST_CASE("plug-in values") {
    SUBCASE("point mass at x") {
        const Dataset d = Dataset::scalar(std::vector<double>(5, 0.3));
        const auto fam = SmoothedFamily::density(0.3);
        const NuisanceFit fit = fam.fit_nuisance(d, iota_list(5));
        CHECK(fam.psi_plugin(fit, 0.25) == doctest::Approx(0.75 / 0.25).epsilon(1e-15));
    }
    SUBCASE("truncation below the propensity is inactive") {
        const BinaryTreatmentDgp dgp{0.2};
        const Dataset d = sample_dgp(dgp, 40, 5);
        auto fam = SmoothedFamily::counterfactual_mean(binary_dgp_propensity(dgp));
        fam.with_regression(std::make_shared<InjectedRegression>(
            [dgp](double a, std::span<const double> w) { return dgp.qbar(a, w); }));
        const NuisanceFit fit = fam.fit_nuisance(d, iota_list(40));
        double plain = 0.0;
        for (Index i = 0; i < 40; ++i) plain += dgp.qbar(1.0, d.w(i));
        CHECK(fam.psi_plugin(fit, 0.1) == doctest::Approx(plain / 40.0).epsilon(1e-14));
        CHECK(fam.psi_plugin(fit, 0.1) == fam.psi_plugin(fit, 0.0));
    }
    SUBCASE("constant regression integrates to itself") {
        const DoseResponseDgp dgp;
        const Dataset d = sample_dgp(dgp, 20, 5);
        auto fam = SmoothedFamily::dose_response(0.5, Kernel(), beta_dgp_propensity(dgp));
        fam.with_regression(constant_qbar(0.37));
        const NuisanceFit fit = fam.fit_nuisance(d, iota_list(20));
        for (double delta : {0.01, 0.1, 0.5}) CHECK(fam.psi_plugin(fit, delta) == doctest::Approx(0.37).epsilon(1e-13));
    }
}

TEST_CASE("gradient special cases") {
    SUBCASE("density, observation outside the window") {
        const Dataset d = Dataset::scalar({0.0, 0.1, -0.2, 2.0});
        const auto fam = SmoothedFamily::density(0.0);
        const NuisanceFit fit = fam.fit_nuisance(d, iota_list(4));
        const double psi = fam.psi_plugin(fit, 0.5);
        CHECK(fam.gradient(fit, 0.5, d.row(3)) == doctest::Approx(-psi).epsilon(1e-15));
    }
    SUBCASE("truncated mean, untreated row, constant regression") {
        const Dataset d = Dataset::way(1, {0.3, -0.4}, {0.0, 1.0}, {1.0, 0.0});
        auto fam = SmoothedFamily::counterfactual_mean(constant_propensity(0.5));
        fam.with_regression(constant_qbar(0.6));
        const NuisanceFit fit = fam.fit_nuisance(d, iota_list(2));
        CHECK(fam.gradient(fit, 0.1, d.row(0)) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    }
    SUBCASE("dose response with a perfect fit has mean-zero gradient") {
        const DoseResponseDgp dgp;
        const Dataset raw = sample_dgp(dgp, 200, 8);
        std::vector<double> w, a, y;
        for (Index i = 0; i < raw.size(); ++i) {
            w.insert(w.end(), raw.w(i).begin(), raw.w(i).end());
            a.push_back(raw.a(i));
            y.push_back(dgp.mu(raw.w(i), raw.a(i)));
        }
        const Dataset d = Dataset::way(4, w, a, y);
        auto fam = SmoothedFamily::dose_response(0.15, Kernel(), beta_dgp_propensity(dgp));
        fam.with_regression(true_mu(dgp));
        const NuisanceFit fit = fam.fit_nuisance(d, iota_list(200));
        double mean = 0.0;
        for (Index i = 0; i < d.size(); ++i) mean += fam.gradient(fit, 0.08, d.row(i));
        CHECK(std::abs(mean / 200.0) < 1e-13);
    }
}

TEST_CASE("batch pseudo-outcomes agree with the gradient") {
    const DoseResponseDgp dgp;
    const Dataset d = sample_dgp(dgp, 300, 21);
    const auto fam = SmoothedFamily::dose_response(0.15, Kernel(), beta_dgp_propensity(dgp));
    const NuisanceFit fit = fam.fit_nuisance(d, iota_list(150));
    const IndexList val = iota_list(150, 150);
    const std::vector<double> deltas = {0.02, 0.05, 0.1};
    const auto u = fam.pseudo_outcomes(fit, d, val, deltas);
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        const double psi = fam.psi_plugin(fit, deltas[j]);
        for (std::size_t i = 0; i < val.size(); i += 17)
            CHECK(u[j][i] - psi == doctest::Approx(fam.gradient(fit, deltas[j], d.row(val[i]))).epsilon(1e-12));
    }
}

TEST_CASE("smoothing levels must be admissible") {
    const auto dens = SmoothedFamily::density(0.0);
    const Dataset d = Dataset::scalar({0.0, 1.0});
    const NuisanceFit fit = dens.fit_nuisance(d, iota_list(2));
    CHECK_FAILS_WITH(dens.psi_plugin(fit, 0.0), ErrorCode::non_positive_bandwidth);
    CHECK(SmoothedFamily::counterfactual_mean(constant_propensity(0.5)).allows_zero_delta());
    CHECK_FAILS_WITH(SmoothedFamily::dose_response(1.5, Kernel(), constant_propensity(1.0)),
                     ErrorCode::invalid_argument);
}

TEST_CASE("schema mismatch") {
    const auto fam = SmoothedFamily::counterfactual_mean(constant_propensity(0.5));
    const Dataset d = Dataset::scalar({0.0, 1.0});
    CHECK_FAILS_WITH(fam.fit_nuisance(d, iota_list(2)), ErrorCode::schema_mismatch);
}

TEST_CASE("feasible maximum") {
    const auto dose = SmoothedFamily::dose_response(0.15, Kernel(), constant_propensity(1.0));
    const Dataset w = Dataset::way(1, {0.0, 1.0}, {0.2, 0.4}, {0.0, 1.0});
    CHECK(dose.feasible_max(dose.fit_nuisance(w, iota_list(2))) == doctest::Approx(0.15));
    const auto dens = SmoothedFamily::density(0.0);
    const Dataset s = Dataset::scalar({-1.0, 1.0});
    CHECK(dens.feasible_max(dens.fit_nuisance(s, iota_list(2))) == doctest::Approx(3.0));
}

TEST_CASE("smoothing rule carries unit mass inside [0, 1]") {
    for (double delta : {0.01, 0.05, 0.15}) {
        const SmoothingRule r = smoothing_rule(Kernel(), delta, 0.15);
        double mass = 0.0;
        for (double w : r.weights) mass += w;
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    }
}
