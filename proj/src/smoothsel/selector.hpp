// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "smoothsel/core.hpp"
#include "smoothsel/diagnostics.hpp"
#include "smoothsel/families.hpp"

#include <functional>
#include <limits>
#include <map>
#include <span>
#include <vector>

namespace smoothsel {

/// Anchor smoothing levels delta1 > delta2 >= delta3 and the finite-difference gap.
struct AnchorConfig {
    double delta1 = 0.0;
    double delta2 = 0.0;
    double delta3 = 0.0;
    double gap = 0.0;
};

struct RateEstimates {
    double beta_hat = 0.0;
    double gamma_hat = 0.0;
    double nu_hat = 0.0;
    double c_bprime = 0.0;
    double c_sigma = 0.0;
    double c_sigmaprime = 0.0;
    AnchorConfig anchors;
    // Raw curve values at (delta1, delta2, delta3).
    double b_prime[3] = {0.0, 0.0, 0.0};
    double sigma[3] = {0.0, 0.0, 0.0};
    double sigma_prime[3] = {0.0, 0.0, 0.0};
    bool sign_flip_b_prime = false;
    bool sign_flip_sigma_prime = false;
};

struct SmoothingSelection {
    double r_hat = 0.0;
    double c_hat = 0.0;
    double epsilon = 0.0;
    std::size_t m = 0;
    double delta_eps = 0.0;
    double delta_zero = 0.0;
    bool clamped = false;
};

/// Source of the three curves the selector differentiates and logs.
class RateProbe {
public:
    virtual ~RateProbe() = default;
    virtual double b_prime(double delta, double gap) = 0;
    virtual double sigma(double delta) = 0;
    virtual double sigma_prime(double delta, double gap) = 0;
    /// Hint that these smoothing levels are about to be requested.
    virtual void prefetch(std::span<const double>) {}
};

/// Probe over caller-supplied curves. b' and sigma' default to forward
/// differences of psi and sigma when not given directly.
class CurveProbe final : public RateProbe {
public:
    using Curve = std::function<double(double)>;
    using Derivative = std::function<double(double, double)>;

    CurveProbe(Curve psi, Curve sigma);
    CurveProbe(Derivative b_prime, Curve sigma, Derivative sigma_prime);

    double b_prime(double delta, double gap) override { return b_prime_(delta, gap); }
    double sigma(double delta) override { return sigma_(delta); }
    double sigma_prime(double delta, double gap) override { return sigma_prime_(delta, gap); }

private:
    Derivative b_prime_;
    Curve sigma_;
    Derivative sigma_prime_;
};

/// The data-driven probe: cross-validated one-step and its standard
/// deviation, nuisance fitted on S1 and averaged over S2. Curve values are
/// cached per smoothing level.
class CrossFitProbe final : public RateProbe {
public:
    CrossFitProbe(const SmoothedFamily& family, const NuisanceFit& fit1, const Dataset& data,
                  std::span<const Index> s2);

    double psi(double delta);
    double b_prime(double delta, double gap) override;
    double sigma(double delta) override;
    double sigma_prime(double delta, double gap) override;
    void prefetch(std::span<const double> deltas) override;

    const Diagnostics& diagnostics() const noexcept { return diag_; }

private:
    struct Point {
        double psi;
        double sigma;
    };
    const Point& at(double delta);

    const SmoothedFamily& family_;
    const NuisanceFit& fit_;
    const Dataset& data_;
    IndexList s2_;
    std::map<double, Point> cache_;
    Diagnostics diag_;
};

double cv_psi_hat(const SmoothedFamily& family, const NuisanceFit& fit1, const Dataset& data,
                  std::span<const Index> s2, double delta);
double sigma_hat(const SmoothedFamily& family, const NuisanceFit& fit1, const Dataset& data,
                 std::span<const Index> s2, double delta);
double finite_diff_b_prime(const SmoothedFamily& family, const NuisanceFit& fit1,
                           const Dataset& data, std::span<const Index> s2, double delta,
                           double gap);
double finite_diff_sigma_prime(const SmoothedFamily& family, const NuisanceFit& fit1,
                               const Dataset& data, std::span<const Index> s2, double delta,
                               double gap);

/// Slowly shrinking anchors: delta_i = c_i * (l2 - l1)^(-shrink) with
/// c1 = 0.6 * feasible_max, c2 = 0.3 * feasible_max, and gap
/// min((l2 - l1)^(-1/4), delta2 / 2).
struct AnchorRule {
    double c1_fraction = 0.6;
    double c2_fraction = 0.3;
    double shrink = 0.05;
};
AnchorConfig default_anchors(std::size_t n, std::size_t l1, std::size_t l2, double feasible_max,
                             AnchorRule rule = {});

/// Log-log diagnostic curve at one grid point.
struct GridPoint {
    double delta = 0.0;
    double b_prime = 0.0;
    double sigma = 0.0;
    double sigma_prime = 0.0;
};

struct ScanResult {
    AnchorConfig anchors;
    std::vector<GridPoint> grid;
    double score = 0.0;
};

constexpr double kScanThreshold = 0.5;

/// Picks the widest contiguous window of at least four grid points on which
/// both log|b'| and log sigma are closest to straight lines. The score of a
/// window is max(RSS_b, RSS_sigma) divided by its log-span; `gap` is used for
/// the finite differences and is capped at delta2 / 2 in the result.
ScanResult scan_anchors(RateProbe& probe, std::span<const double> grid, double gap);

std::vector<double> log_grid(double lo, double hi, std::size_t points);

RateEstimates estimate_rates(RateProbe& probe, const AnchorConfig& anchors);

/// r = 1 / (2 beta - 1 + gamma - nu), C = (C_sigma C_sigma' beta / C_b'^2)^r,
/// delta_eps = C m^(-r - eps) and delta_zero = C m^(-r), both clamped to
/// (machine epsilon, feasible_max].
SmoothingSelection select_smoothing(const RateEstimates& rates, std::size_t m, double epsilon,
                                    double feasible_max = std::numeric_limits<double>::infinity());

} // namespace smoothsel
