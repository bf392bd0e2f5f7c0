// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "smoothsel/core.hpp"
#include "smoothsel/diagnostics.hpp"
#include "smoothsel/families.hpp"
#include "smoothsel/selector.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace smoothsel {

/// Cross-validated one-step Psi_delta(P2) + P3 D*_delta(P2).
double one_step(const SmoothedFamily& family, const NuisanceFit& fit2, const Dataset& data,
                std::span<const Index> s3, double delta);
/// Same, for several smoothing levels sharing one pass over the data.
std::vector<double> one_step(const SmoothedFamily& family, const NuisanceFit& fit2,
                             const Dataset& data, std::span<const Index> s3,
                             std::span<const double> deltas, Diagnostics* diag = nullptr);

double normal_quantile(double p);

/// C_sigma * m^-(1/2 - (r + eps) gamma). Throws NonPositiveSeExponent when
/// the exponent is not positive.
double se_scale(const RateEstimates& rates, const SmoothingSelection& selection);

/// point -/+ q_{1 - alpha/2} * se_scale. The same width serves the interval
/// centred at the delta_eps estimate and the one centred at delta_zero.
std::pair<double, double> wald_ci(double point, const RateEstimates& rates,
                                  const SmoothingSelection& selection, double alpha);

enum class AnchorMode { automatic, fixed, scan };

AnchorMode parse_anchor_mode(std::string_view name);
std::string_view anchor_mode_name(AnchorMode mode);

struct EstimateConfig {
    double p1 = 0.25;
    double p2 = 0.5;
    /// Permute rows before splitting; identity order when empty.
    std::optional<std::uint64_t> shuffle_seed;
    double epsilon = 0.05;
    double alpha = 0.05;
    AnchorMode anchor_mode = AnchorMode::automatic;
    AnchorConfig anchors;  ///< used when anchor_mode is fixed
    AnchorRule anchor_rule;
    /// Scan grid; zero bounds mean [feasible_max / 50, feasible_max / 1.5].
    double grid_min = 0.0;
    double grid_max = 0.0;
    std::size_t grid_points = 12;
};

struct EstimateReport {
    double point = 0.0;
    double point_at_delta_zero = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double alt_ci_low = 0.0;
    double alt_ci_high = 0.0;
    double alpha = 0.0;
    double se_scale = 0.0;
    double feasible_max = 0.0;
    SmoothingSelection selection;
    RateEstimates rates;
    SplitPlan split;
    Diagnostics diagnostics;
    /// Log-log curve from the anchor scan, when one ran.
    std::vector<GridPoint> grid;
};

/// Split, fit on S1, learn rates on S2, select delta, refit on S1 u S2 and
/// evaluate the one-step on S3. Errors carry the failing stage in the message.
EstimateReport estimate_adaptive(const Dataset& data, const SmoothedFamily& family,
                                 const EstimateConfig& config);

struct CvTmleResult {
    double estimate = 0.0;
    double epsilon = 0.0;
    /// Fold-averaged validation mean of the gradient at the fluctuated fit.
    double score = 0.0;
    int iterations = 0;
    bool diverged = false;
};

constexpr double kFluctuationBound = 10.0;

/// V-fold CV-TMLE with the logistic clever-covariate fluctuation. One
/// fluctuation parameter is shared by all folds and solves the pooled score.
CvTmleResult cv_tmle(const Dataset& data, const SmoothedFamily& family, double delta,
                     std::size_t folds, std::uint64_t seed);

} // namespace smoothsel
