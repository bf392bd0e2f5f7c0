// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace smoothsel {

enum class KernelShape { epanechnikov, gaussian, uniform };

KernelShape parse_kernel_shape(std::string_view name);
std::string_view kernel_shape_name(KernelShape shape);

/// Symmetric univariate smoothing kernel, optionally polynomial-multiplied
/// to fourth order: K4(u) = (c0 + c2 u^2) K(u). Immutable; moments are
/// computed once at construction.
class Kernel {
public:
    explicit Kernel(KernelShape shape = KernelShape::epanechnikov);

    double operator()(double u) const noexcept {
        if (u < -radius_ || u > radius_) return 0.0;
        const double base = base_eval(u);
        return order_ == 2 ? base : (c0_ + c2_ * u * u) * base;
    }

    KernelShape shape() const noexcept { return shape_; }
    int order() const noexcept { return order_; }
    /// Half-width of the support; Gaussian kernels are truncated at 8.
    double support_radius() const noexcept { return radius_; }
    /// Cached integral of K^2.
    double l2sq() const noexcept { return l2sq_; }
    /// Integral of u^power K(u) over the support.
    double moment(int power) const;

    friend Kernel make_higher_order(const Kernel& base, int target_order);
    friend bool operator==(const Kernel&, const Kernel&) = default;

private:
    double base_eval(double u) const noexcept;
    void verify() const;

    KernelShape shape_;
    int order_ = 2;
    double c0_ = 1.0;
    double c2_ = 0.0;
    double radius_ = 1.0;
    double l2sq_ = 0.0;
};

/// Order 2 returns `base`; order 4 returns the polynomial-multiplied kernel
/// with unit mass and vanishing second moment.
Kernel make_higher_order(const Kernel& base, int target_order);

/// K_{delta,center}(point) = K((point - center) / delta) / delta.
double scaled_kernel_eval(const Kernel& k, double delta, double center, double point);

double kernel_l2sq(const Kernel& k);

} // namespace smoothsel
