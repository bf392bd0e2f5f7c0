// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "smoothsel/core.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace smoothsel {

/// Outcome regression evaluated along the treatment axis at a fixed covariate
/// value. Binding a covariate once and then sweeping `a` is the hot loop of
/// the dose-response family, so implementations precompute there.
class RegressionSlice {
public:
    virtual ~RegressionSlice() = default;
    virtual void bind(std::span<const double> w) = 0;
    virtual double operator()(double a) const = 0;
};

/// Qbar(a, w) = E[Y | A = a, W = w].
class Regression {
public:
    virtual ~Regression() = default;
    virtual double operator()(double a, std::span<const double> w) const;
    virtual std::unique_ptr<RegressionSlice> make_slice() const = 0;
};

/// Wraps a caller-supplied closed-form regression (e.g. the true Qbar of a
/// simulation design).
class InjectedRegression final : public Regression {
public:
    using Fn = std::function<double(double, std::span<const double>)>;
    explicit InjectedRegression(Fn fn) : fn_(std::move(fn)) {}

    double operator()(double a, std::span<const double> w) const override { return fn_(a, w); }
    std::unique_ptr<RegressionSlice> make_slice() const override;

private:
    Fn fn_;
};

/// Nadaraya-Watson regression of Y on (A, W): Gaussian product kernel in the
/// covariates, Epanechnikov kernel in the treatment. Bandwidths follow the
/// rule of thumb h_j = scale * sd_j * m^(-1 / (4 + d + 1)).
class NadarayaWatson final : public Regression {
public:
    struct Options {
        double bandwidth_scale = 1.06;
        /// Clamp predictions into [1e-6, 1 - 1e-6] (binary outcomes).
        bool clamp_unit = true;
    };

    NadarayaWatson(const Dataset& data, std::span<const Index> subsample, Options options);

    std::unique_ptr<RegressionSlice> make_slice() const override;

    double bandwidth_a() const noexcept { return h_a_; }
    const std::vector<double>& bandwidth_w() const noexcept { return h_w_; }
    /// True when every training outcome is identical (the fit is constant).
    bool degenerate() const noexcept { return degenerate_; }
    std::size_t size() const noexcept { return a_.size(); }

private:
    friend class NadarayaWatsonSlice;

    std::size_t dim_ = 0;
    Options options_;
    double h_a_ = 0.0;
    std::vector<double> h_w_;
    // Training rows sorted by treatment; covariates pre-divided by h_w.
    std::vector<double> a_;
    std::vector<double> y_;
    std::vector<double> w_scaled_;
    double y_mean_ = 0.0;
    bool degenerate_ = false;
};

constexpr double kQbarFloor = 1e-6;

} // namespace smoothsel
