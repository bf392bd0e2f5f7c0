// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "smoothsel/dgp.hpp"
#include "smoothsel/estimator.hpp"
#include "smoothsel/families.hpp"
#include "smoothsel/oracle.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace smoothsel {

enum class SelectorKind { adaptive, fixed_rate, oracle_grid };

SelectorKind parse_selector_kind(std::string_view name);
std::string_view selector_kind_name(SelectorKind kind);

/// adaptive runs estimate_adaptive; fixed_rate uses delta = c n^-r; oracle_grid
/// reports the grid point with the smallest MSE over the cell's replicates.
struct SelectorSpec {
    SelectorKind kind = SelectorKind::adaptive;
    double c = 0.0;
    double r = 0.0;
    std::string label;

    static SelectorSpec adaptive(std::string label = "adaptive");
    static SelectorSpec fixed_rate(double c, double r, std::string label = {});
    static SelectorSpec oracle_grid(std::string label = "oracle_grid");
};

/// Family matching a design: density at `point`, dose response at a0 = `point`
/// with the known Beta propensity, or the truncated counterfactual mean.
SmoothedFamily family_for(const OracleTarget& target);

struct BenchmarkConfig {
    OracleTarget target;
    std::vector<SelectorSpec> selectors;
    std::vector<std::size_t> n_list;
    std::size_t reps = 100;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    EstimateConfig estimate;
    /// Smoothing levels scanned by oracle_grid selectors.
    std::vector<double> oracle_grid;
};

struct ReplicateRecord {
    std::string selector;
    std::size_t n = 0;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double delta = 0.0;
    double estimate = 0.0;
    double sq_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    bool covered = false;
    bool alt_covered = false;
    double r_hat = 0.0;
};

struct BenchmarkRow {
    std::string selector;
    std::size_t n = 0;
    std::size_t replicates = 0;  ///< successful replicates
    std::size_t failures = 0;
    double mse = 0.0;
    double mse_se = 0.0;         ///< jackknife
    double coverage = 0.0;
    double alt_coverage = 0.0;   ///< adaptive only: interval centred at delta_zero
    double mean_delta = 0.0;
    double mean_r_hat = 0.0;     ///< adaptive only
};

struct BenchmarkResult {
    double psi_true = 0.0;
    std::vector<BenchmarkRow> rows;
    std::vector<ReplicateRecord> records;
};

/// Deterministic given the config: the dataset of replicate i at size n is
/// drawn from derive_seed(seed, n, i) and shared by every selector, and the
/// output does not depend on `workers`.
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

/// Leave-one-out jackknife SE of a plain mean (equals sd / sqrt(R)).
double jackknife_mean_se(const std::vector<double>& values);

/// Jackknife SE of min_j mean(columns[j]), all columns of equal length.
double jackknife_min_mean_se(const std::vector<std::vector<double>>& columns);

} // namespace smoothsel
