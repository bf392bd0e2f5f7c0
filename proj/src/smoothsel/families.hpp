// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "smoothsel/core.hpp"
#include "smoothsel/diagnostics.hpp"
#include "smoothsel/dgp.hpp"
#include "smoothsel/kernels.hpp"
#include "smoothsel/regression.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace smoothsel {

enum class FamilyKind { density_at_point, counterfactual_mean, dose_response };

FamilyKind parse_family_kind(std::string_view name);
std::string_view family_kind_name(FamilyKind kind);

/// Known treatment mechanism g0(a | w): a probability for binary treatment,
/// a density for continuous treatment.
using Propensity = std::function<double(double, std::span<const double>)>;

Propensity constant_propensity(double value);
/// Beta(lambda(w), 1 - lambda(w)) density of the continuous-dose design.
Propensity beta_dgp_propensity(const DoseResponseDgp& dgp);
/// g0(a | w) of the binary-treatment design (a is 0 or 1).
Propensity binary_dgp_propensity(const BinaryTreatmentDgp& dgp);

constexpr double kPropensityFloor = 1e-6;

/// Estimated nuisance parameters. `qw` holds the rows of the fitting
/// subsample (the empirical covariate law); `qbar` is null for the density
/// family, where the plug-in is the empirical distribution itself.
struct NuisanceFit {
    IndexList qw_sample;
    IndexList fit_subsample;
    std::shared_ptr<const Dataset> qw;
    std::shared_ptr<const Regression> qbar;
    bool degenerate_regression = false;
};

/// A family of smoothed parameters delta -> Psi_delta together with its
/// canonical gradient and nuisance estimator.
///
/// All three families share one structure: the cross-validated one-step
/// Psi_delta(P1) + P2 D*_delta(P1) equals the mean of a per-row pseudo-outcome
/// U_delta(O), and D*_delta(O) = U_delta(O) - Psi_delta(P1). The batch entry
/// point `pseudo_outcomes` evaluates U for many deltas at once.
class SmoothedFamily {
public:
    static SmoothedFamily density(double x, Kernel kernel = Kernel());
    static SmoothedFamily counterfactual_mean(Propensity g);
    static SmoothedFamily dose_response(double a0, Kernel kernel, Propensity g);

    /// Replace the Nadaraya-Watson fit with a fixed regression.
    SmoothedFamily& with_regression(std::shared_ptr<const Regression> qbar);
    SmoothedFamily& with_nuisance_options(NadarayaWatson::Options options);

    FamilyKind kind() const noexcept { return kind_; }
    double target_point() const noexcept { return target_; }
    const Kernel& kernel() const noexcept { return kernel_; }
    const Propensity& propensity() const noexcept { return g_; }
    bool injected() const noexcept { return static_cast<bool>(injected_); }
    /// Truncation at zero is the untruncated parameter; kernel families need delta > 0.
    bool allows_zero_delta() const noexcept { return kind_ == FamilyKind::counterfactual_mean; }

    NuisanceFit fit_nuisance(const Dataset& data, std::span<const Index> subsample) const;

    double psi_plugin(const NuisanceFit& fit, double delta) const;
    double gradient(const NuisanceFit& fit, double delta, const Observation& obs,
                    Diagnostics* diag = nullptr) const;

    /// U_delta(O_i) for each delta (outer) and each row of `idx` (inner).
    std::vector<std::vector<double>> pseudo_outcomes(const NuisanceFit& fit, const Dataset& data,
                                                     std::span<const Index> idx,
                                                     std::span<const double> deltas,
                                                     Diagnostics* diag = nullptr) const;

    /// Largest smoothing level the selector may use: the kernel window must
    /// stay inside [0, 1] for the dose-response curve; for the density it is
    /// three sample standard deviations; for truncation the largest propensity.
    double feasible_max(const NuisanceFit& fit) const;

private:
    SmoothedFamily(FamilyKind kind, double target, Kernel kernel, Propensity g);

    void check_delta(double delta) const;
    double single_pseudo_outcome(const NuisanceFit& fit, double delta, const Observation& obs,
                                 Diagnostics* diag) const;

    FamilyKind kind_;
    double target_ = 0.0;
    Kernel kernel_;
    Propensity g_;
    std::shared_ptr<const Regression> injected_;
    NadarayaWatson::Options nw_options_;
};

/// Nodes and kernel-weighted quadrature weights for
/// integral K_{delta,a0}(a) f(a) da over the kernel window intersected
/// with [0, 1], split at a0.
struct SmoothingRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
SmoothingRule smoothing_rule(const Kernel& kernel, double delta, double a0);

} // namespace smoothsel
