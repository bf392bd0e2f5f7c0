// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothsel/selector.hpp"

#include "smoothsel/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace smoothsel {

CurveProbe::CurveProbe(Curve psi, Curve sigma)
    : b_prime_([psi](double d, double gap) { return (psi(d + gap) - psi(d)) / gap; }),
      sigma_(sigma),
      sigma_prime_([sigma](double d, double gap) { return (sigma(d + gap) - sigma(d)) / gap; }) {}

CurveProbe::CurveProbe(Derivative b_prime, Curve sigma, Derivative sigma_prime)
    : b_prime_(std::move(b_prime)), sigma_(std::move(sigma)), sigma_prime_(std::move(sigma_prime)) {}

CrossFitProbe::CrossFitProbe(const SmoothedFamily& family, const NuisanceFit& fit1,
                             const Dataset& data, std::span<const Index> s2)
    : family_(family), fit_(fit1), data_(data), s2_(s2.begin(), s2.end()) {
    if (s2_.size() < 2) fail(ErrorCode::empty_sample, "validation split needs at least two rows");
}

void CrossFitProbe::prefetch(std::span<const double> deltas) {
    std::vector<double> missing;
    for (double d : deltas)
        if (!cache_.contains(d) && std::find(missing.begin(), missing.end(), d) == missing.end())
            missing.push_back(d);
    if (missing.empty()) return;
    const auto u = family_.pseudo_outcomes(fit_, data_, s2_, missing, &diag_);
    for (std::size_t j = 0; j < missing.size(); ++j)
        cache_[missing[j]] = {empirical_mean(u[j]),
                              std::sqrt(empirical_centered_second_moment(u[j]))};
}

const CrossFitProbe::Point& CrossFitProbe::at(double delta) {
    auto it = cache_.find(delta);
    if (it == cache_.end()) {
        prefetch(std::span<const double>(&delta, 1));
        it = cache_.find(delta);
    }
    return it->second;
}

double CrossFitProbe::psi(double delta) { return at(delta).psi; }

double CrossFitProbe::sigma(double delta) { return at(delta).sigma; }

double CrossFitProbe::b_prime(double delta, double gap) {
    if (!(gap > 0.0)) fail(ErrorCode::precondition, "finite-difference gap must be positive");
    const double pts[2] = {delta, delta + gap};
    prefetch(pts);
    return (psi(delta + gap) - psi(delta)) / gap;
}

double CrossFitProbe::sigma_prime(double delta, double gap) {
    if (!(gap > 0.0)) fail(ErrorCode::precondition, "finite-difference gap must be positive");
    const double pts[2] = {delta, delta + gap};
    prefetch(pts);
    return (sigma(delta + gap) - sigma(delta)) / gap;
}

double cv_psi_hat(const SmoothedFamily& family, const NuisanceFit& fit1, const Dataset& data,
                  std::span<const Index> s2, double delta) {
    const double d[1] = {delta};
    return empirical_mean(family.pseudo_outcomes(fit1, data, s2, d)[0]);
}

double sigma_hat(const SmoothedFamily& family, const NuisanceFit& fit1, const Dataset& data,
                 std::span<const Index> s2, double delta) {
    const double d[1] = {delta};
    return std::sqrt(empirical_centered_second_moment(family.pseudo_outcomes(fit1, data, s2, d)[0]));
}

double finite_diff_b_prime(const SmoothedFamily& family, const NuisanceFit& fit1,
                           const Dataset& data, std::span<const Index> s2, double delta,
                           double gap) {
    CrossFitProbe probe(family, fit1, data, s2);
    return probe.b_prime(delta, gap);
}

double finite_diff_sigma_prime(const SmoothedFamily& family, const NuisanceFit& fit1,
                               const Dataset& data, std::span<const Index> s2, double delta,
                               double gap) {
    CrossFitProbe probe(family, fit1, data, s2);
    return probe.sigma_prime(delta, gap);
}

AnchorConfig default_anchors(std::size_t n, std::size_t l1, std::size_t l2, double feasible_max,
                             AnchorRule rule) {
    if (!(l2 > l1) || l2 > n) fail(ErrorCode::precondition, "anchors need l1 < l2 <= n");
    const double size = static_cast<double>(l2 - l1);
    const double shrink = std::pow(size, -rule.shrink);
    AnchorConfig a;
    a.delta1 = rule.c1_fraction * feasible_max * shrink;
    a.delta2 = rule.c2_fraction * feasible_max * shrink;
    a.delta3 = a.delta2;
    if (!(a.delta2 > 2.0 * std::numeric_limits<double>::epsilon()) || !(a.delta1 > a.delta2) ||
        !std::isfinite(a.delta1))
        fail(ErrorCode::infeasible_anchors,
             "no feasible anchors for feasible maximum " + std::to_string(feasible_max));
    a.gap = std::min(std::pow(size, -0.25), a.delta2 / 2.0);
    return a;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0 && hi > lo) || points < 2)
        fail(ErrorCode::precondition, "log grid needs 0 < lo < hi and two points");
    std::vector<double> g(points);
    const double step = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
    g.back() = hi;
    return g;
}

namespace {

double fit_rss(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - my - slope * (x[i] - mx);
        rss += r * r;
    }
    return rss;
}

double log_slope(double y1, double y2, double d1, double d2) {
    return (std::log(y2) - std::log(y1)) / (std::log(d2) - std::log(d1));
}

} // namespace

ScanResult scan_anchors(RateProbe& probe, std::span<const double> grid, double gap) {
    if (grid.size() < 8) fail(ErrorCode::precondition, "anchor scan needs at least 8 grid points");
    if (!(gap > 0.0)) fail(ErrorCode::precondition, "finite-difference gap must be positive");
    std::vector<double> sorted(grid.begin(), grid.end());
    std::sort(sorted.begin(), sorted.end());
    if (!(sorted.front() > 0.0)) fail(ErrorCode::precondition, "grid must be positive");

    std::vector<double> wanted;
    for (double d : sorted) {
        const double g = std::min(gap, d / 2.0);
        wanted.push_back(d);
        wanted.push_back(d + g);
    }
    probe.prefetch(wanted);

    ScanResult result;
    const std::size_t k = sorted.size();
    std::vector<double> x(k), lb(k), ls(k);
    std::vector<bool> ok(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double d = sorted[i];
        const double g = std::min(gap, d / 2.0);
        GridPoint p{d, probe.b_prime(d, g), probe.sigma(d), probe.sigma_prime(d, g)};
        result.grid.push_back(p);
        x[i] = std::log(d);
        ok[i] = std::abs(p.b_prime) > 0.0 && p.sigma > 0.0 && std::isfinite(p.b_prime) &&
                std::isfinite(p.sigma);
        lb[i] = ok[i] ? std::log(std::abs(p.b_prime)) : 0.0;
        ls[i] = ok[i] ? std::log(p.sigma) : 0.0;
    }

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_lo = 0, best_hi = 0;
    for (std::size_t lo = 0; lo < k; ++lo) {
        for (std::size_t hi = lo + 3; hi < k; ++hi) {
            if (!ok[hi]) break;
            bool valid = true;
            for (std::size_t i = lo; i <= hi && valid; ++i) valid = ok[i];
            if (!valid) break;
            const std::size_t len = hi - lo + 1;
            std::span<const double> xs(x.data() + lo, len);
            const double rss = std::max(fit_rss(xs, {lb.data() + lo, len}),
                                        fit_rss(xs, {ls.data() + lo, len}));
            const double score = rss / (x[hi] - x[lo]);
            const bool wider = len > best_hi - best_lo + 1;
            // Residuals of exact power laws are rounding noise; treat them as ties.
            if (score < best - 1e-12 || (std::abs(score - best) <= 1e-12 && wider)) {
                best = score;
                best_lo = lo;
                best_hi = hi;
            }
        }
    }
    if (!(best <= kScanThreshold))
        fail(ErrorCode::no_linear_region,
             std::isfinite(best) ? "no linear log-log region (best score " + std::to_string(best) + ")"
                                 : "no linear log-log region (curves vanish on the grid)");

    result.score = best;
    result.anchors.delta1 = sorted[best_hi];
    result.anchors.delta2 = sorted[best_lo];
    result.anchors.delta3 = result.anchors.delta2;
    result.anchors.gap = std::min(gap, result.anchors.delta2 / 2.0);
    return result;
}

RateEstimates estimate_rates(RateProbe& probe, const AnchorConfig& anchors) {
    const double d1 = anchors.delta1, d2 = anchors.delta2, d3 = anchors.delta3, gap = anchors.gap;
    if (!(d1 > d2 && d2 >= d3 && d3 > 0.0 && gap > 0.0))
        fail(ErrorCode::precondition, "anchors must satisfy delta1 > delta2 >= delta3 > 0, gap > 0");
    const double pts[6] = {d1, d1 + gap, d2, d2 + gap, d3, d3 + gap};
    probe.prefetch(pts);

    RateEstimates r;
    r.anchors = anchors;
    const double ds[3] = {d1, d2, d3};
    for (int i = 0; i < 3; ++i) {
        r.b_prime[i] = probe.b_prime(ds[i], gap);
        r.sigma[i] = probe.sigma(ds[i]);
        r.sigma_prime[i] = probe.sigma_prime(ds[i], gap);
    }
    for (int i = 0; i < 3; ++i) {
        if (r.b_prime[i] == 0.0) fail(ErrorCode::log_of_zero, "estimated b' vanishes at an anchor");
        if (r.sigma[i] == 0.0) fail(ErrorCode::log_of_zero, "estimated sigma vanishes at an anchor");
        if (r.sigma_prime[i] == 0.0)
            fail(ErrorCode::log_of_zero, "estimated sigma' vanishes at an anchor");
    }
    r.sign_flip_b_prime = std::signbit(r.b_prime[0]) != std::signbit(r.b_prime[1]);
    r.sign_flip_sigma_prime = std::signbit(r.sigma_prime[0]) != std::signbit(r.sigma_prime[1]);

    const double bp1 = std::abs(r.b_prime[0]), bp2 = std::abs(r.b_prime[1]);
    const double sp1 = std::abs(r.sigma_prime[0]), sp2 = std::abs(r.sigma_prime[1]);
    r.beta_hat = log_slope(bp1, bp2, d1, d2) + 1.0;
    r.gamma_hat = -log_slope(r.sigma[0], r.sigma[1], d1, d2);
    r.nu_hat = log_slope(sp1, sp2, d1, d2);
    r.c_bprime = std::abs(r.b_prime[2]) * std::pow(d3, -(r.beta_hat - 1.0));
    r.c_sigma = r.sigma[2] * std::pow(d3, r.gamma_hat);
    r.c_sigmaprime = std::abs(r.sigma_prime[2]) * std::pow(d3, -r.nu_hat);
    return r;
}

SmoothingSelection select_smoothing(const RateEstimates& rates, std::size_t m, double epsilon,
                                    double feasible_max) {
    if (m < 2) fail(ErrorCode::precondition, "selection needs m >= 2");
    if (!(epsilon >= 0.0)) fail(ErrorCode::invalid_argument, "epsilon must be non-negative");
    const double denom = 2.0 * rates.beta_hat - 1.0 + rates.gamma_hat - rates.nu_hat;
    if (!(denom > 0.0) || !std::isfinite(denom))
        fail(ErrorCode::degenerate_rate_denominator,
             "rate denominator 2 beta - 1 + gamma - nu = " + std::to_string(denom) + " is not positive");
    SmoothingSelection s;
    s.epsilon = epsilon;
    s.m = m;
    s.r_hat = 1.0 / denom;
    s.c_hat = std::pow(rates.c_sigma * rates.c_sigmaprime * rates.beta_hat /
                           (rates.c_bprime * rates.c_bprime),
                       s.r_hat);
    if (!(s.c_hat > 0.0) || !std::isfinite(s.c_hat))
        fail(ErrorCode::degenerate_rate_denominator, "selection constant is not positive and finite");
    const double md = static_cast<double>(m);
    s.delta_zero = s.c_hat * std::pow(md, -s.r_hat);
    s.delta_eps = s.c_hat * std::pow(md, -s.r_hat - epsilon);
    const double lo = 2.0 * std::numeric_limits<double>::epsilon();
    auto clamp = [&](double d) {
        const double c = std::clamp(d, lo, feasible_max);
        if (c != d) s.clamped = true;
        return c;
    };
    s.delta_zero = clamp(s.delta_zero);
    s.delta_eps = clamp(s.delta_eps);
    return s;
}

} // namespace smoothsel
