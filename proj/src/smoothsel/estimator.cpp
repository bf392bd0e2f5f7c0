// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothsel/estimator.hpp"

#include "smoothsel/error.hpp"
#include "smoothsel/quadrature.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace smoothsel {

double one_step(const SmoothedFamily& family, const NuisanceFit& fit2, const Dataset& data,
                std::span<const Index> s3, double delta) {
    const double d[1] = {delta};
    return one_step(family, fit2, data, s3, d)[0];
}

std::vector<double> one_step(const SmoothedFamily& family, const NuisanceFit& fit2,
                             const Dataset& data, std::span<const Index> s3,
                             std::span<const double> deltas, Diagnostics* diag) {
    const auto u = family.pseudo_outcomes(fit2, data, s3, deltas, diag);
    std::vector<double> out(deltas.size());
    for (std::size_t j = 0; j < deltas.size(); ++j) out[j] = empirical_mean(u[j]);
    return out;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::invalid_alpha, "quantile level must lie in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double se_scale(const RateEstimates& rates, const SmoothingSelection& selection) {
    if (selection.m < 2) fail(ErrorCode::precondition, "interval needs m >= 2");
    const double exponent = 0.5 - (selection.r_hat + selection.epsilon) * rates.gamma_hat;
    if (!(exponent > 0.0))
        fail(ErrorCode::nonpositive_exponent,
             "standard-error exponent 1/2 - (r + eps) gamma = " + std::to_string(exponent) +
                 " is not positive");
    return rates.c_sigma * std::pow(static_cast<double>(selection.m), -exponent);
}

std::pair<double, double> wald_ci(double point, const RateEstimates& rates,
                                  const SmoothingSelection& selection, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::invalid_alpha, "alpha must lie in (0, 1)");
    const double half = normal_quantile(1.0 - alpha / 2.0) * se_scale(rates, selection);
    return {point - half, point + half};
}

AnchorMode parse_anchor_mode(std::string_view name) {
    if (name == "auto") return AnchorMode::automatic;
    if (name == "fixed") return AnchorMode::fixed;
    if (name == "scan") return AnchorMode::scan;
    fail(ErrorCode::invalid_argument, "unknown anchor mode '" + std::string(name) + "'");
}

std::string_view anchor_mode_name(AnchorMode mode) {
    switch (mode) {
    case AnchorMode::automatic: return "auto";
    case AnchorMode::fixed: return "fixed";
    case AnchorMode::scan: return "scan";
    }
    return "auto";
}

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.code(), std::string(name) + ": " + e.what());
    }
}

} // namespace

EstimateReport estimate_adaptive(const Dataset& data, const SmoothedFamily& family,
                                 const EstimateConfig& config) {
    if (!(config.alpha > 0.0 && config.alpha < 1.0))
        fail(ErrorCode::invalid_alpha, "alpha must lie in (0, 1)");
    EstimateReport rep;
    rep.alpha = config.alpha;
    rep.split = stage("split", [&] {
        return three_way_split(data.size(), config.p1, config.p2, config.shuffle_seed);
    });
    const SplitPlan& sp = rep.split;

    const NuisanceFit fit1 = stage("fit S1", [&] { return family.fit_nuisance(data, sp.s1); });
    rep.diagnostics.degenerate_regression |= fit1.degenerate_regression;
    rep.feasible_max = family.feasible_max(fit1);
    CrossFitProbe probe(family, fit1, data, sp.s2);

    AnchorConfig anchors = stage("anchors", [&] {
        if (config.anchor_mode == AnchorMode::fixed) return config.anchors;
        return default_anchors(sp.n, sp.l1, sp.l2, rep.feasible_max, config.anchor_rule);
    });
    if (config.anchor_mode == AnchorMode::scan) {
        const double lo = config.grid_min > 0.0 ? config.grid_min : rep.feasible_max / 50.0;
        const double hi = config.grid_max > 0.0 ? config.grid_max : rep.feasible_max / 1.5;
        const auto grid = stage("anchor scan", [&] { return log_grid(lo, hi, config.grid_points); });
        try {
            ScanResult scan = scan_anchors(probe, grid, anchors.gap);
            anchors = scan.anchors;
            rep.grid = std::move(scan.grid);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::no_linear_region) throw Error(e.code(), std::string("anchor scan: ") + e.what());
            rep.diagnostics.no_linear_region = true;
            rep.diagnostics.anchors_fallback = true;
        }
    }

    rep.rates = stage("rates", [&] { return estimate_rates(probe, anchors); });
    rep.diagnostics.sign_flip_b_prime = rep.rates.sign_flip_b_prime;
    rep.diagnostics.sign_flip_sigma_prime = rep.rates.sign_flip_sigma_prime;
    rep.diagnostics.merge(probe.diagnostics());

    rep.selection = stage("selection", [&] {
        return select_smoothing(rep.rates, sp.m(), config.epsilon, rep.feasible_max);
    });
    rep.diagnostics.delta_clamped = rep.selection.clamped;

    const IndexList s12 = sp.s12();
    const NuisanceFit fit2 = stage("fit S1+S2", [&] { return family.fit_nuisance(data, s12); });
    rep.diagnostics.degenerate_regression |= fit2.degenerate_regression;
    const double deltas[2] = {rep.selection.delta_eps, rep.selection.delta_zero};
    const auto points = stage("one-step", [&] {
        return one_step(family, fit2, data, sp.s3, deltas, &rep.diagnostics);
    });
    rep.point = points[0];
    rep.point_at_delta_zero = points[1];

    stage("interval", [&] {
        rep.se_scale = se_scale(rep.rates, rep.selection);
        std::tie(rep.ci_low, rep.ci_high) = wald_ci(rep.point, rep.rates, rep.selection, config.alpha);
        std::tie(rep.alt_ci_low, rep.alt_ci_high) =
            wald_ci(rep.point_at_delta_zero, rep.rates, rep.selection, config.alpha);
        return 0;
    });
    return rep;
}

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

// One validation row: the fluctuation acts on the residual term through
// (offset, h) and on the plug-in term through (plug_offset, plug_h, plug_w).
struct TmleRow {
    double y = 0.0;
    double weight = 0.0;
    double offset = 0.0;
    double h = 0.0;
    std::vector<double> plug_offset;
    std::vector<double> plug_h;
    std::vector<double> plug_w;
    std::size_t fold = 0;
};

double weighted_score(const std::vector<TmleRow>& rows, double eps, double* info) {
    double s = 0.0, d = 0.0;
    for (const auto& r : rows) {
        const double q = expit(r.offset + eps * r.h);
        s += r.weight * r.h * (r.y - q);
        d += r.weight * r.h * r.h * q * (1.0 - q);
    }
    if (info) *info = d;
    return s;
}

} // namespace

CvTmleResult cv_tmle(const Dataset& data, const SmoothedFamily& family, double delta,
                     std::size_t folds, std::uint64_t seed) {
    if (family.kind() == FamilyKind::density_at_point)
        fail(ErrorCode::precondition, "CV-TMLE needs a counterfactual-mean or dose-response family");
    if (data.schema() != Schema::way) fail(ErrorCode::schema_mismatch, "CV-TMLE needs (W, A, Y) rows");
    if (folds < 2) fail(ErrorCode::precondition, "CV-TMLE needs at least two folds");
    if (data.size() < 2 * folds) fail(ErrorCode::split_too_small, "too few rows for the folds");
    if (family.allows_zero_delta() ? !(delta >= 0.0) : !(delta > 0.0))
        fail(ErrorCode::non_positive_bandwidth, "smoothing level must be positive");
    for (std::size_t i = 0; i < data.size(); ++i)
        if (data.y(i) != 0.0 && data.y(i) != 1.0)
            fail(ErrorCode::non_binary_outcome, "CV-TMLE needs outcomes in {0, 1}");

    IndexList order(data.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::mt19937_64 gen(seed);
    std::shuffle(order.begin(), order.end(), gen);

    const bool dose = family.kind() == FamilyKind::dose_response;
    const Kernel& k = family.kernel();
    const double a0 = family.target_point();
    const SmoothingRule rule = dose ? smoothing_rule(k, delta, a0) : SmoothingRule{};
    const Propensity& g = family.propensity();

    std::vector<TmleRow> rows;
    rows.reserve(data.size());
    const std::size_t n = data.size();
    for (std::size_t v = 0; v < folds; ++v) {
        const std::size_t lo = v * n / folds, hi = (v + 1) * n / folds;
        IndexList valid(order.begin() + static_cast<std::ptrdiff_t>(lo),
                        order.begin() + static_cast<std::ptrdiff_t>(hi));
        IndexList train;
        train.reserve(n - valid.size());
        train.insert(train.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(lo));
        train.insert(train.end(), order.begin() + static_cast<std::ptrdiff_t>(hi), order.end());

        const NuisanceFit fit = family.fit_nuisance(data, train);
        auto slice = fit.qbar->make_slice();
        const double weight = 1.0 / (static_cast<double>(folds) * static_cast<double>(valid.size()));
        for (Index r : valid) {
            const auto w = data.w(r);
            const double a = data.a(r);
            slice->bind(w);
            TmleRow row;
            row.y = data.y(r);
            row.weight = weight;
            row.fold = v;
            row.offset = logit((*slice)(a));
            if (dose) {
                row.h = scaled_kernel_eval(k, delta, a0, a) / std::max(g(a, w), kPropensityFloor);
                for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
                    const double x = rule.nodes[j];
                    row.plug_offset.push_back(logit((*slice)(x)));
                    row.plug_h.push_back(scaled_kernel_eval(k, delta, a0, x) /
                                         std::max(g(x, w), kPropensityFloor));
                    row.plug_w.push_back(rule.weights[j]);
                }
            } else {
                const double g1 = g(1.0, w);
                const double gd = std::max(g1, delta);
                row.h = a / gd;
                row.plug_offset.push_back(logit((*slice)(1.0)));
                row.plug_h.push_back(1.0 / gd);
                row.plug_w.push_back(g1 / gd);
            }
            rows.push_back(std::move(row));
        }
    }

    // The weighted score is decreasing in eps: Newton steps, safeguarded by
    // bisection inside a bracket that widens up to the divergence bound.
    CvTmleResult res;
    double lo = -kFluctuationBound, hi = kFluctuationBound;
    const double s_lo = weighted_score(rows, lo, nullptr);
    const double s_hi = weighted_score(rows, hi, nullptr);
    double eps = 0.0;
    if (s_lo < 0.0 || s_hi > 0.0) {
        res.diverged = true;
        eps = std::abs(s_lo) < std::abs(s_hi) ? lo : hi;
    } else {
        for (res.iterations = 1; res.iterations <= 200; ++res.iterations) {
            double info = 0.0;
            const double s = weighted_score(rows, eps, &info);
            if (std::abs(s) <= 1e-12) break;
            if (s > 0.0) lo = eps; else hi = eps;
            double next = info > 0.0 ? eps + s / info : 0.5 * (lo + hi);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (hi - lo < 1e-15) break;
            eps = next;
        }
    }
    res.epsilon = eps;

    std::vector<double> fold_psi(folds, 0.0), fold_count(folds, 0.0);
    std::vector<double> plug(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        double s = 0.0;
        for (std::size_t j = 0; j < r.plug_w.size(); ++j)
            s += r.plug_w[j] * expit(r.plug_offset[j] + eps * r.plug_h[j]);
        plug[i] = s;
        fold_psi[r.fold] += s;
        fold_count[r.fold] += 1.0;
    }
    for (std::size_t v = 0; v < folds; ++v) fold_psi[v] /= fold_count[v];

    double score = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const double q = expit(r.offset + eps * r.h);
        score += r.weight * (r.h * (r.y - q) + plug[i] - fold_psi[r.fold]);
    }
    res.score = score;
    res.estimate = std::accumulate(fold_psi.begin(), fold_psi.end(), 0.0) / static_cast<double>(folds);
    return res;
}

} // namespace smoothsel
