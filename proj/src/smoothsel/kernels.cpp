// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothsel/kernels.hpp"

#include "smoothsel/error.hpp"
#include "smoothsel/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace smoothsel {

namespace {

constexpr double kGaussianTruncation = 8.0;
constexpr double kMomentTolerance = 1e-8;

// Composite Gauss-Legendre over [-r, r]; `panels` equal pieces.
template <class F>
double integrate_support(F&& f, double r, int panels) {
    double s = 0.0;
    const double h = 2.0 * r / panels;
    for (int p = 0; p < panels; ++p) s += integrate(f, -r + p * h, -r + (p + 1) * h, 64);
    return s;
}

} // namespace

KernelShape parse_kernel_shape(std::string_view name) {
    if (name == "epanechnikov") return KernelShape::epanechnikov;
    if (name == "gaussian") return KernelShape::gaussian;
    if (name == "uniform") return KernelShape::uniform;
    fail(ErrorCode::invalid_argument, "unknown kernel '" + std::string(name) + "'");
}

std::string_view kernel_shape_name(KernelShape shape) {
    switch (shape) {
    case KernelShape::epanechnikov: return "epanechnikov";
    case KernelShape::gaussian: return "gaussian";
    case KernelShape::uniform: return "uniform";
    }
    return "unknown";
}

Kernel::Kernel(KernelShape shape) : shape_(shape) {
    radius_ = shape == KernelShape::gaussian ? kGaussianTruncation : 1.0;
    l2sq_ = kernel_l2sq(*this);
    verify();
}

double Kernel::base_eval(double u) const noexcept {
    switch (shape_) {
    case KernelShape::epanechnikov: return 0.75 * (1.0 - u * u);
    case KernelShape::gaussian: return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    case KernelShape::uniform: return 0.5;
    }
    return 0.0;
}

double Kernel::moment(int power) const {
    return integrate_support([&](double u) { return std::pow(u, power) * (*this)(u); }, radius_, 1);
}

void Kernel::verify() const {
    const double mass = moment(0);
    if (std::abs(mass - 1.0) > kMomentTolerance)
        fail(ErrorCode::quadrature_failure, "kernel mass " + std::to_string(mass) + " != 1");
    for (int p = 1; p < order_; ++p) {
        const double mp = moment(p);
        if (std::abs(mp) > kMomentTolerance)
            fail(ErrorCode::quadrature_failure,
                 "kernel moment " + std::to_string(p) + " = " + std::to_string(mp) + " != 0");
    }
    if (!std::isfinite(l2sq_) || l2sq_ <= 0.0)
        fail(ErrorCode::quadrature_failure, "kernel has no finite L2 norm");
}

Kernel make_higher_order(const Kernel& base, int target_order) {
    if (target_order == 2 && base.order_ == 2) return base;
    if (target_order != 4 || base.order_ != 2)
        fail(ErrorCode::unsupported_order,
             "kernel order " + std::to_string(target_order) + " is not supported (2 or 4)");
    const double mu2 = base.moment(2);
    const double mu4 = base.moment(4);
    const double det = mu4 - mu2 * mu2;
    Kernel k = base;
    k.order_ = 4;
    k.c0_ = mu4 / det;
    k.c2_ = -mu2 / det;
    k.l2sq_ = kernel_l2sq(k);
    k.verify();
    return k;
}

double scaled_kernel_eval(const Kernel& k, double delta, double center, double point) {
    if (!(delta > 0.0)) fail(ErrorCode::non_positive_bandwidth, "bandwidth must be positive");
    return k((point - center) / delta) / delta;
}

double kernel_l2sq(const Kernel& k) {
    auto sq = [&](double u) {
        const double v = k(u);
        return v * v;
    };
    const double coarse = integrate_support(sq, k.support_radius(), 1);
    const double fine = integrate_support(sq, k.support_radius(), 2);
    if (std::abs(coarse - fine) > 1e-8 * std::abs(fine))
        fail(ErrorCode::quadrature_failure, "integral of K^2 did not converge");
    return fine;
}

} // namespace smoothsel
