// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance report: one PASS/FAIL line per criterion.
//
//   smoothsel_acceptance [--strict] [--only N[,N...]] [--workers K]
//
// Without --strict the exit status only reflects whether every criterion
// could be evaluated; with --strict any FAIL makes it nonzero.

#include "smoothsel/error.hpp"
#include "smoothsel/estimator.hpp"
#include "smoothsel/kernels.hpp"
#include "smoothsel/oracle.hpp"
#include "smoothsel/quadrature.hpp"
#include "smoothsel/selector.hpp"
#include "smoothsel/sim.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace smoothsel;

namespace {

// Tolerances and sizes, fixed here rather than on the command line.
constexpr double kExponentTol = 1e-12;
constexpr double kConstantRelTol = 1e-10;
constexpr double kPowerLawSeconds = 1.0;
constexpr double kRateLo = 0.14, kRateHi = 0.26;
constexpr double kTargetSlope = -0.183, kSlopeTol = 0.05;
constexpr double kMseRatio = 2.5;
constexpr double kSeparationSe = 3.0;
constexpr double kCoverage = 0.90, kAltCoverage = 0.95;
constexpr double kCollapseTol = 1e-12;
constexpr double kScoreTol = 1e-6;
constexpr double kMassTol = 1e-8;
constexpr double kL2Tol = 1e-10;

constexpr std::size_t kDoseN = 10000;
constexpr std::size_t kDoseReps = 100;
constexpr std::size_t kRateReps = 50;
constexpr std::size_t kStarReps = 50;
constexpr std::size_t kDensityN = 20000;
constexpr std::size_t kDensityReps = 200;
constexpr std::uint64_t kSeed = 20260101;

const OracleTarget kSmooth{DoseResponseDgp{}, 0.15, Kernel()};
const OracleTarget kNormal{NormalDensityDgp{}, 0.0, Kernel()};

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size();
    return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

std::size_t g_workers = 1;

// The n = 1e4 dose-response benchmark is shared by criteria 2 and 4: the
// replicate datasets depend only on (seed, n, replicate), so the first 50
// adaptive replicates are the criterion-2 sample.
const BenchmarkResult& dose_benchmark() {
    static const BenchmarkResult result = [] {
        BenchmarkConfig c;
        c.target = kSmooth;
        c.selectors = {SelectorSpec::adaptive(), SelectorSpec::fixed_rate(0.05, 1.0 / 7.0),
                       SelectorSpec::fixed_rate(0.1, 1.0 / 7.0), SelectorSpec::oracle_grid()};
        c.n_list = {kDoseN};
        c.reps = kDoseReps;
        c.seed = kSeed;
        c.workers = g_workers;
        c.estimate.shuffle_seed.reset();
        c.oracle_grid = log_grid(0.005, 0.15, 16);
        return run_benchmark(c);
    }();
    return result;
}

// 1. Exact power laws recover exponents and constants.
Outcome power_law_exactness() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 g(kSeed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_exp = 0.0, worst_const = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double beta = 1.2 + 2.0 * u(g), gamma = 0.1 + 1.4 * u(g), nu = -3.0 + 2.5 * u(g);
        const double cb = 0.1 + 5.0 * u(g), cs = 0.1 + 5.0 * u(g), csp = 0.1 + 5.0 * u(g);
        CurveProbe p([=](double d, double) { return cb * std::pow(d, beta - 1.0); },
                     [=](double d) { return cs * std::pow(d, -gamma); },
                     [=](double d, double) { return -csp * std::pow(d, nu); });
        const double d1 = 0.05 + 0.5 * u(g), d2 = d1 * (0.2 + 0.6 * u(g)), d3 = d2 * (0.3 + 0.7 * u(g));
        const RateEstimates r = estimate_rates(p, {d1, d2, d3, d2 / 4.0});
        worst_exp = std::max({worst_exp, std::abs(r.beta_hat - beta), std::abs(r.gamma_hat - gamma),
                              std::abs(r.nu_hat - nu)});
        worst_const = std::max({worst_const, std::abs(r.c_bprime / cb - 1.0), std::abs(r.c_sigma / cs - 1.0),
                                std::abs(r.c_sigmaprime / csp - 1.0)});
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {worst_exp <= kExponentTol && worst_const <= kConstantRelTol && secs < kPowerLawSeconds,
            fmt("200 random power laws: max exponent error %.2e (tol %.0e), max relative constant error %.2e "
                "(tol %.0e), %.3f s",
                worst_exp, kExponentTol, worst_const, kConstantRelTol, secs)};
}

// 2. r = 1/5 from the classical rates, and the median estimated rate on the smooth design.
Outcome classical_rate() {
    RateEstimates r;
    r.beta_hat = 2.0;
    r.gamma_hat = 0.5;
    r.nu_hat = -1.5;
    r.c_bprime = r.c_sigma = r.c_sigmaprime = 1.0;
    const double exact = select_smoothing(r, 1000, 0.0).r_hat;

    std::vector<double> all, ok;
    std::size_t failures = 0;
    for (const auto& rec : dose_benchmark().records) {
        if (rec.selector != "adaptive" || rec.replicate >= kRateReps) continue;
        if (rec.ok) {
            all.push_back(rec.r_hat);
            ok.push_back(rec.r_hat);
        } else {
            // No finite rate was produced; it cannot count as inside the band.
            all.push_back(std::numeric_limits<double>::infinity());
            ++failures;
        }
    }
    const double med = median(all);
    const double med_ok = ok.empty() ? std::nan("") : median(ok);
    return {exact == 0.2 && med >= kRateLo && med <= kRateHi,
            fmt("exact case r = %.17g; smooth design n = %zu, %zu replicates: median r_hat %.3f (band [%.2f, %.2f]), "
                "%zu failed selections counted as infinite, median over the %zu successes %.3f",
                exact, kDoseN, kRateReps, med, kRateLo, kRateHi, failures, ok.size(), med_ok)};
}

// 3. Oracle exponent of delta* over n.
Outcome oracle_exponent() {
    const std::vector<std::size_t> ns = {3162, 10000, 31623};
    const std::vector<double> grid = log_grid(0.005, 0.15, 20);
    std::vector<double> x, y;
    std::string stars;
    for (std::size_t n : ns) {
        const DeltaStar ds = oracle_delta_star(kSmooth, family_for(kSmooth), n, grid, kStarReps, 42, g_workers);
        x.push_back(std::log(static_cast<double>(n)));
        y.push_back(std::log(ds.delta_star));
        stars += fmt("%s%zu:%.4f", stars.empty() ? "" : ", ", n, ds.delta_star);
    }
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxy / sxx;
    const double constant = std::exp(my - slope * mx);
    return {std::abs(slope - kTargetSlope) <= kSlopeTol,
            fmt("delta* {%s}; fit %.3f n^%.3f, target slope %.3f +/- %.2f", stars.c_str(), constant, slope,
                kTargetSlope, kSlopeTol)};
}

// 4. Adaptive MSE against the oracle grid minimum and the n^(-1/7) competitors.
Outcome adaptive_vs_oracle() {
    const BenchmarkResult& b = dose_benchmark();
    const BenchmarkRow* adaptive = nullptr;
    const BenchmarkRow* oracle = nullptr;
    const BenchmarkRow* worst = nullptr;
    for (const auto& row : b.rows) {
        if (row.selector == "adaptive") adaptive = &row;
        else if (row.selector == "oracle_grid") oracle = &row;
        else if (!worst || row.mse > worst->mse) worst = &row;
    }
    const double ratio = adaptive->mse / oracle->mse;
    const double gap = worst->mse - adaptive->mse;
    const double combined = std::hypot(worst->mse_se, adaptive->mse_se);
    return {ratio <= kMseRatio && gap >= kSeparationSe * combined,
            fmt("n = %zu, %zu replicates: adaptive MSE %.3e (SE %.1e, %zu failures), oracle grid min %.3e "
                "(SE %.1e), ratio %.2f (limit %.1f); worst C n^-1/7 (%s) %.3e (SE %.1e), margin %.2f "
                "combined SEs (need %.0f)",
                kDoseN, kDoseReps, adaptive->mse, adaptive->mse_se, adaptive->failures, oracle->mse,
                oracle->mse_se, ratio, kMseRatio, worst->selector.c_str(), worst->mse, worst->mse_se,
                gap / combined, kSeparationSe)};
}

// 5. Coverage of both intervals for a normal density at zero.
Outcome coverage() {
    BenchmarkConfig c;
    c.target = kNormal;
    c.selectors = {SelectorSpec::adaptive()};
    c.n_list = {kDensityN};
    c.reps = kDensityReps;
    c.seed = kSeed;
    c.workers = g_workers;
    c.estimate.shuffle_seed.reset();
    const BenchmarkResult b = run_benchmark(c);
    std::size_t hits = 0, alt_hits = 0, failures = 0;
    for (const auto& rec : b.records) {
        hits += rec.ok && rec.covered;
        alt_hits += rec.ok && rec.alt_covered;
        failures += !rec.ok;
    }
    // Failed replicates count as misses.
    const double cov = static_cast<double>(hits) / kDensityReps;
    const double alt = static_cast<double>(alt_hits) / kDensityReps;
    return {cov >= kCoverage && alt >= kAltCoverage,
            fmt("n = %zu, %zu replicates, nominal 0.95: CI coverage %.3f (need %.2f), CI' coverage %.3f "
                "(need %.2f), %zu failures counted as misses",
                kDensityN, kDensityReps, cov, kCoverage, alt, kAltCoverage, failures)};
}

// 6. The density one-step collapses to the evaluation-split KDE.
Outcome linearity_collapse() {
    std::mt19937_64 g(kSeed + 6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const KernelShape shapes[] = {KernelShape::epanechnikov, KernelShape::gaussian, KernelShape::uniform};
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 20 + static_cast<std::size_t>(2000 * u(g));
        const double x = -2.0 + 4.0 * u(g), delta = 0.01 + 2.0 * u(g);
        const double p1 = 0.1 + 0.4 * u(g), p2 = p1 + 0.1 + (0.85 - p1) * u(g);
        Kernel kernel(shapes[k % 3]);
        if (k % 2) kernel = make_higher_order(kernel, 4);
        const Dataset d = sample_dgp(NormalDensityDgp{u(g), 0.5 + u(g)}, n, g());
        const SplitPlan sp = three_way_split(n, p1, p2, g());
        const auto fam = SmoothedFamily::density(x, kernel);
        const double est = one_step(fam, fam.fit_nuisance(d, sp.s12()), d, sp.s3, delta);
        double kde = 0.0;
        for (Index i : sp.s3) kde += kernel((d.o(i) - x) / delta) / delta;
        kde /= static_cast<double>(sp.s3.size());
        worst = std::max(worst, std::abs(est - kde));
    }
    return {worst <= kCollapseTol,
            fmt("100 random configurations: max |one-step - KDE| %.2e (tol %.0e)", worst, kCollapseTol)};
}

// 7. Truncation below the propensity floor changes nothing.
Outcome truncation_inactivity() {
    const BinaryTreatmentDgp dgp{0.2};
    const auto fam = SmoothedFamily::counterfactual_mean(binary_dgp_propensity(dgp));
    std::size_t identical = 0;
    const std::size_t trials = 20;
    for (std::size_t k = 0; k < trials; ++k) {
        const Dataset d = sample_dgp(dgp, 400 + 100 * k, derive_seed(kSeed, 7, k));
        const SplitPlan sp = three_way_split(d.size(), 0.25, 0.5, k);
        const NuisanceFit fit = fam.fit_nuisance(d, sp.s12());
        const double at = one_step(fam, fit, d, sp.s3, 0.1);
        const double zero = one_step(fam, fit, d, sp.s3, 0.0);
        identical += at == zero && fam.psi_plugin(fit, 0.1) == fam.psi_plugin(fit, 0.0);
    }
    return {identical == trials,
            fmt("g0 >= 0.2, delta = 0.1: %zu of %zu datasets give bit-identical estimates", identical, trials)};
}

// 8. The CV-TMLE update solves its score equation.
Outcome cv_tmle_score() {
    std::mt19937_64 g(kSeed + 8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    std::size_t diverged = 0;
    for (int k = 0; k < 20; ++k) {
        const DoseResponseDgp dgp{k % 2 ? DoseResponseDgp::Variant::cusp : DoseResponseDgp::Variant::smooth};
        const double a0 = 0.1 + 0.4 * u(g);
        const double delta = (0.02 + 0.8 * u(g)) * std::min(a0, 1.0 - a0);
        const std::size_t n = 500 + static_cast<std::size_t>(2500 * u(g));
        const auto fam = SmoothedFamily::dose_response(a0, Kernel(), beta_dgp_propensity(dgp));
        const CvTmleResult r = cv_tmle(sample_dgp(dgp, n, g()), fam, delta, 2 + k % 9, g());
        worst = std::max(worst, std::abs(r.score));
        diverged += r.diverged;
    }
    return {worst <= kScoreTol && diverged == 0,
            fmt("20 random dose-response configurations: max |pooled score| %.2e (tol %.0e), %zu diverged", worst,
                kScoreTol, diverged)};
}

// 9. Variance-perturbation bounds with oracle quantities.
Outcome lemma_bounds() {
    std::mt19937_64 g(kSeed + 9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t trunc_ok = 0, dose_ok = 0;
    double trunc_ratio = 0.0, dose_ratio = 0.0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 200 + static_cast<std::size_t>(3000 * u(g));
        const BinaryTreatmentDgp bin{0.02 + 0.2 * u(g)};
        const LemmaCheck t = truncation_variance_bound(bin, 0.01 + 0.5 * u(g), n, g());
        trunc_ok += t.holds;
        trunc_ratio = std::max(trunc_ratio, t.lhs / t.rhs);

        const double a0 = 0.15 + 0.5 * u(g);
        const double delta = (0.05 + 0.9 * u(g)) * std::min(a0, 1.0 - a0);
        const LemmaCheck d = dose_variance_bound(DoseResponseDgp{}, a0, Kernel(), delta, n, g(), 400);
        dose_ok += d.holds;
        dose_ratio = std::max(dose_ratio, d.lhs / d.rhs);
    }
    return {trunc_ok == 50 && dose_ok == 50,
            fmt("50 random (delta, n): truncation bound holds %zu/50 (max lhs/rhs %.3f), dose-response bound "
                "holds %zu/50 (max lhs/rhs %.3f)",
                trunc_ok, trunc_ratio, dose_ok, dose_ratio)};
}

// 10. Kernel mass and the Epanechnikov L2 norm.
Outcome kernel_invariants() {
    double worst = 0.0;
    const KernelShape shapes[] = {KernelShape::epanechnikov, KernelShape::gaussian, KernelShape::uniform};
    for (KernelShape s : shapes) {
        for (int order : {2, 4}) {
            const Kernel k = make_higher_order(Kernel(s), order);
            for (double delta : {0.01, 0.1, 1.0}) {
                const double x = 0.3;
                const double half = k.support_radius() * delta;
                // Panels so the Gaussian body is resolved; the support edges are panel edges.
                const int panels = 32;
                double mass = 0.0;
                for (int p = 0; p < panels; ++p) {
                    const double lo = x - half + 2.0 * half * p / panels;
                    const double hi = x - half + 2.0 * half * (p + 1) / panels;
                    mass += integrate([&](double o) { return scaled_kernel_eval(k, delta, x, o); }, lo, hi, 32);
                }
                worst = std::max(worst, std::abs(mass - 1.0));
            }
        }
    }
    const double l2 = kernel_l2sq(Kernel());
    const double l2_direct = integrate([](double v) { return std::pow(0.75 * (1 - v * v), 2); }, -1.0, 1.0, 16);
    const double l2_err = std::max(std::abs(l2 - 0.6), std::abs(l2_direct - 0.6));
    return {worst <= kMassTol && l2_err <= kL2Tol,
            fmt("3 shapes x orders {2, 4} x delta {0.01, 0.1, 1}: max |mass - 1| %.2e (tol %.0e); Epanechnikov "
                "int K^2 error %.2e (tol %.0e)",
                worst, kMassTol, l2_err, kL2Tol)};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance report"};
    bool strict = false;
    std::vector<int> only;
    app.add_flag("--strict", strict, "Exit nonzero when any criterion fails");
    app.add_option("--only", only, "Run only these criteria")->delimiter(',');
    app.add_option("--workers", g_workers, "Worker threads for the simulations");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
        {1, power_law_exactness}, {2, classical_rate},        {3, oracle_exponent}, {4, adaptive_vs_oracle},
        {5, coverage},            {6, linearity_collapse},    {7, truncation_inactivity},
        {8, cv_tmle_score},       {9, lemma_bounds},          {10, kernel_invariants},
    };
    const std::set<int> wanted(only.begin(), only.end());
    int failed = 0, errors = 0;
    for (const auto& [id, fn] : criteria) {
        if (!wanted.empty() && !wanted.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        bool error = false;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
            error = true;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %d: %s  %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
        errors += error;
    }
    std::printf("summary: %d failed\n", failed);
    if (errors) return 2;
    return strict && failed ? 1 : 0;
}
