// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "smoothsel/dgp.hpp"
#include "smoothsel/families.hpp"
#include "smoothsel/kernels.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace smoothsel {

/// Ground truth for one simulation design. `point` is x for the density
/// design and a0 for the dose-response designs; the binary-treatment design
/// targets E Qbar(1, W) and ignores it.
struct OracleTarget {
    Dgp dgp;
    double point = 0.0;
    Kernel kernel;
};

struct TruthEntry {
    double delta = 0.0;
    double psi_delta = 0.0;
    double b0 = 0.0;
    double sigma_inf = 0.0;
    double psi_se = 0.0;    ///< Monte-Carlo SE, 0 for quadrature values
    double sigma_se = 0.0;
};

struct TruthBundle {
    double psi_true = 0.0;
    double psi_true_se = 0.0;
    std::vector<TruthEntry> smoothed;
    std::size_t mc_size = 0;  ///< 0 when every entry came from quadrature
};

/// Psi(P0) by quadrature: closed form for the density design, product
/// Gauss-Hermite (32 nodes per coordinate) for the Gaussian-covariate designs.
double true_psi(const OracleTarget& target);
/// Psi(P0) by plain Monte Carlo over the covariate law.
double true_psi_mc(const OracleTarget& target, std::size_t draws, std::uint64_t seed, double* se);

double true_smoothed_psi(const OracleTarget& target, double delta);

/// sigma_inf(delta): standard deviation of the true-nuisance gradient.
double true_sigma_inf(const OracleTarget& target, double delta);
/// The same from `draws` simulated observations; `se` receives its MC SE.
double true_sigma_inf_mc(const OracleTarget& target, double delta, std::size_t draws,
                         std::uint64_t seed, double* se);

/// Quadrature bundle, or Monte Carlo with `mc_draws` > 0.
TruthBundle truth_bundle(const OracleTarget& target, std::span<const double> deltas,
                         std::size_t mc_draws = 0, std::uint64_t seed = 0);

struct DeltaStar {
    double delta_star = 0.0;     ///< parabola-refined minimiser in log delta
    double grid_argmin = 0.0;    ///< raw grid minimiser
    std::size_t argmin_index = 0;
    std::vector<double> grid;
    std::vector<double> mse;
    std::vector<double> mse_se;
    std::size_t failures = 0;
};

/// MSE(delta) of the cross-validated one-step with the standard split over
/// `reps` simulated datasets, and its minimiser on the grid. The grid curve is
/// evaluated on common datasets so its shape is not blurred by replicate noise.
DeltaStar oracle_delta_star(const OracleTarget& target, const SmoothedFamily& family,
                            std::size_t n, std::span<const double> delta_grid, std::size_t reps,
                            std::uint64_t seed, std::size_t workers = 1, double p1 = 0.25,
                            double p2 = 0.5);

/// Both sides of a variance-perturbation bound under a discrete law P0: the
/// empirical law of `w_draws` covariate vectors with the design's exact
/// conditional laws of A and Y. The regression is fitted on a simulated sample
/// of size n.
struct LemmaCheck {
    double sigma_fit = 0.0;   ///< sd of D*_delta at the fitted nuisance
    double sigma_inf = 0.0;   ///< sd of D*_delta at the true nuisance
    double lhs = 0.0;         ///< |sigma_fit - sigma_inf|
    double rhs = 0.0;
    double qbar_error = 0.0;  ///< L2 norm (truncation) or sup norm (dose response)
    bool holds = false;
};

/// |sigma_1n - sigma_inf| <= delta^(-1/2) ||Qbar_n(1, .) - Qbar_0(1, .)||_{L2}.
LemmaCheck truncation_variance_bound(const BinaryTreatmentDgp& dgp, double delta, std::size_t n,
                                     std::uint64_t seed, std::size_t w_draws = 2000);

/// |sigma_1n - sigma_inf| <= (delta^-1 ||1/g0||_inf int K^2)^(1/2) ||Qbar_n - Qbar_0||_inf,
/// sup norms over the kernel window.
LemmaCheck dose_variance_bound(const DoseResponseDgp& dgp, double a0, const Kernel& kernel,
                               double delta, std::size_t n, std::uint64_t seed,
                               std::size_t w_draws = 1000);

} // namespace smoothsel
