// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothsel/families.hpp"

#include "smoothsel/error.hpp"
#include "smoothsel/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace smoothsel {

FamilyKind parse_family_kind(std::string_view name) {
    if (name == "density" || name == "density_at_point") return FamilyKind::density_at_point;
    if (name == "counterfactual_mean") return FamilyKind::counterfactual_mean;
    if (name == "dose_response") return FamilyKind::dose_response;
    fail(ErrorCode::invalid_argument, "unknown family '" + std::string(name) + "'");
}

std::string_view family_kind_name(FamilyKind kind) {
    switch (kind) {
    case FamilyKind::density_at_point: return "density";
    case FamilyKind::counterfactual_mean: return "counterfactual_mean";
    case FamilyKind::dose_response: return "dose_response";
    }
    return "unknown";
}

Propensity constant_propensity(double value) {
    if (!(value > 0.0)) fail(ErrorCode::invalid_argument, "propensity must be positive");
    return [value](double, std::span<const double>) { return value; };
}

Propensity beta_dgp_propensity(const DoseResponseDgp& dgp) {
    return [dgp](double a, std::span<const double> w) { return dgp.treatment_density(a, w); };
}

Propensity binary_dgp_propensity(const BinaryTreatmentDgp& dgp) {
    return [dgp](double a, std::span<const double> w) {
        const double p = dgp.propensity(w);
        return a > 0.5 ? p : 1.0 - p;
    };
}

SmoothingRule smoothing_rule(const Kernel& kernel, double delta, double a0) {
    const double reach = delta * kernel.support_radius();
    const double lo = std::max(0.0, a0 - reach);
    const double hi = std::min(1.0, a0 + reach);
    SmoothingRule rule;
    auto add_panel = [&](double from, double to) {
        if (!(to > from)) return;
        const QuadratureRule q = gauss_legendre(from, to, 32);
        for (std::size_t k = 0; k < q.nodes.size(); ++k) {
            rule.nodes.push_back(q.nodes[k]);
            rule.weights.push_back(q.weights[k] * kernel((q.nodes[k] - a0) / delta) / delta);
        }
    };
    add_panel(lo, std::min(a0, hi));
    add_panel(std::max(a0, lo), hi);
    return rule;
}

SmoothedFamily::SmoothedFamily(FamilyKind kind, double target, Kernel kernel, Propensity g)
    : kind_(kind), target_(target), kernel_(kernel), g_(std::move(g)) {}

SmoothedFamily SmoothedFamily::density(double x, Kernel kernel) {
    if (!std::isfinite(x)) fail(ErrorCode::invalid_argument, "target point must be finite");
    return SmoothedFamily(FamilyKind::density_at_point, x, kernel, nullptr);
}

SmoothedFamily SmoothedFamily::counterfactual_mean(Propensity g) {
    if (!g) fail(ErrorCode::invalid_argument, "counterfactual mean needs a propensity");
    return SmoothedFamily(FamilyKind::counterfactual_mean, 1.0, Kernel(), std::move(g));
}

SmoothedFamily SmoothedFamily::dose_response(double a0, Kernel kernel, Propensity g) {
    if (!(a0 >= 0.0 && a0 <= 1.0))
        fail(ErrorCode::invalid_argument, "dose-response target must lie in [0, 1]");
    if (!g) fail(ErrorCode::invalid_argument, "dose response needs a propensity");
    return SmoothedFamily(FamilyKind::dose_response, a0, kernel, std::move(g));
}

SmoothedFamily& SmoothedFamily::with_regression(std::shared_ptr<const Regression> qbar) {
    injected_ = std::move(qbar);
    return *this;
}

SmoothedFamily& SmoothedFamily::with_nuisance_options(NadarayaWatson::Options options) {
    nw_options_ = options;
    return *this;
}

void SmoothedFamily::check_delta(double delta) const {
    if (allows_zero_delta() ? !(delta >= 0.0) : !(delta > 0.0))
        fail(ErrorCode::non_positive_bandwidth, "smoothing level must be positive");
}

NuisanceFit SmoothedFamily::fit_nuisance(const Dataset& data,
                                         std::span<const Index> subsample) const {
    if (subsample.empty()) fail(ErrorCode::empty_sample, "empty nuisance subsample");
    const bool scalar = kind_ == FamilyKind::density_at_point;
    if (scalar != (data.schema() == Schema::scalar))
        fail(ErrorCode::schema_mismatch, std::string(family_kind_name(kind_)) +
                                             " family does not accept this dataset schema");
    NuisanceFit fit;
    fit.qw_sample.assign(subsample.begin(), subsample.end());
    fit.fit_subsample = fit.qw_sample;
    fit.qw = std::make_shared<const Dataset>(data.subset(subsample));
    if (scalar) return fit;
    if (injected_) {
        fit.qbar = injected_;
    } else {
        auto nw = std::make_shared<const NadarayaWatson>(data, subsample, nw_options_);
        fit.degenerate_regression = nw->degenerate();
        fit.qbar = std::move(nw);
    }
    return fit;
}

double SmoothedFamily::psi_plugin(const NuisanceFit& fit, double delta) const {
    check_delta(delta);
    const Dataset& qw = *fit.qw;
    const std::size_t n = qw.size();
    std::vector<double> terms(n);
    if (kind_ == FamilyKind::density_at_point) {
        for (std::size_t i = 0; i < n; ++i)
            terms[i] = scaled_kernel_eval(kernel_, delta, target_, qw.o(i));
        return empirical_mean(terms);
    }
    auto slice = fit.qbar->make_slice();
    if (kind_ == FamilyKind::counterfactual_mean) {
        for (std::size_t i = 0; i < n; ++i) {
            slice->bind(qw.w(i));
            const double g = g_(1.0, qw.w(i));
            terms[i] = g / std::max(g, delta) * (*slice)(1.0);
        }
        return empirical_mean(terms);
    }
    const SmoothingRule rule = smoothing_rule(kernel_, delta, target_);
    for (std::size_t i = 0; i < n; ++i) {
        slice->bind(qw.w(i));
        double s = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * (*slice)(rule.nodes[k]);
        terms[i] = s;
    }
    return empirical_mean(terms);
}

double SmoothedFamily::single_pseudo_outcome(const NuisanceFit& fit, double delta,
                                             const Observation& obs, Diagnostics* diag) const {
    if (kind_ == FamilyKind::density_at_point) {
        if (!obs.o) fail(ErrorCode::schema_mismatch, "density family needs scalar rows");
        return scaled_kernel_eval(kernel_, delta, target_, *obs.o);
    }
    if (obs.o) fail(ErrorCode::schema_mismatch, "family needs (W, A, Y) rows");
    auto slice = fit.qbar->make_slice();
    slice->bind(obs.w);
    if (kind_ == FamilyKind::counterfactual_mean) {
        const double g = g_(1.0, obs.w);
        const double gd = std::max(g, delta);
        return obs.a / gd * (obs.y - (*slice)(obs.a)) + g / gd * (*slice)(1.0);
    }
    double g = g_(obs.a, obs.w);
    if (g < kPropensityFloor) {
        g = kPropensityFloor;
        if (diag) ++diag->propensity_floored;
    }
    const SmoothingRule rule = smoothing_rule(kernel_, delta, target_);
    double s = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * (*slice)(rule.nodes[k]);
    return scaled_kernel_eval(kernel_, delta, target_, obs.a) / g * (obs.y - (*slice)(obs.a)) + s;
}

double SmoothedFamily::gradient(const NuisanceFit& fit, double delta, const Observation& obs,
                                Diagnostics* diag) const {
    check_delta(delta);
    return single_pseudo_outcome(fit, delta, obs, diag) - psi_plugin(fit, delta);
}

std::vector<std::vector<double>> SmoothedFamily::pseudo_outcomes(const NuisanceFit& fit,
                                                                 const Dataset& data,
                                                                 std::span<const Index> idx,
                                                                 std::span<const double> deltas,
                                                                 Diagnostics* diag) const {
    for (double d : deltas) check_delta(d);
    const bool scalar = kind_ == FamilyKind::density_at_point;
    if (scalar != (data.schema() == Schema::scalar))
        fail(ErrorCode::schema_mismatch, "dataset schema does not match the family");

    std::vector<std::vector<double>> out(deltas.size(), std::vector<double>(idx.size()));
    if (scalar) {
        for (std::size_t j = 0; j < deltas.size(); ++j)
            for (std::size_t i = 0; i < idx.size(); ++i)
                out[j][i] = scaled_kernel_eval(kernel_, deltas[j], target_, data.o(idx[i]));
        return out;
    }

    auto slice = fit.qbar->make_slice();
    if (kind_ == FamilyKind::counterfactual_mean) {
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const Index r = idx[i];
            slice->bind(data.w(r));
            const double g = g_(1.0, data.w(r));
            const double a = data.a(r);
            const double resid = data.y(r) - (*slice)(a);
            const double q1 = (*slice)(1.0);
            for (std::size_t j = 0; j < deltas.size(); ++j) {
                const double gd = std::max(g, deltas[j]);
                out[j][i] = a / gd * resid + g / gd * q1;
            }
        }
        return out;
    }

    std::vector<SmoothingRule> rules;
    rules.reserve(deltas.size());
    for (double d : deltas) rules.push_back(smoothing_rule(kernel_, d, target_));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const Index r = idx[i];
        const double a = data.a(r);
        slice->bind(data.w(r));
        double g = g_(a, data.w(r));
        if (g < kPropensityFloor) {
            g = kPropensityFloor;
            if (diag) ++diag->propensity_floored;
        }
        const double weighted_resid = (data.y(r) - (*slice)(a)) / g;
        for (std::size_t j = 0; j < deltas.size(); ++j) {
            const SmoothingRule& rule = rules[j];
            double s = 0.0;
            for (std::size_t k = 0; k < rule.nodes.size(); ++k)
                s += rule.weights[k] * (*slice)(rule.nodes[k]);
            out[j][i] = scaled_kernel_eval(kernel_, deltas[j], target_, a) * weighted_resid + s;
        }
    }
    return out;
}

double SmoothedFamily::feasible_max(const NuisanceFit& fit) const {
    switch (kind_) {
    case FamilyKind::density_at_point: {
        const auto o = fit.qw->o_column();
        if (o.size() < 2) return 0.0;
        return 3.0 * std::sqrt(empirical_centered_second_moment(o));
    }
    case FamilyKind::dose_response:
        return std::min(target_, 1.0 - target_) / kernel_.support_radius();
    case FamilyKind::counterfactual_mean: {
        double best = 0.0;
        for (std::size_t i = 0; i < fit.qw->size(); ++i) best = std::max(best, g_(1.0, fit.qw->w(i)));
        return best;
    }
    }
    return 0.0;
}

} // namespace smoothsel
