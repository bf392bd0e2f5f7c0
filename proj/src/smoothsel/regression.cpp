// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothsel/regression.hpp"

#include "smoothsel/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace smoothsel {

double Regression::operator()(double a, std::span<const double> w) const {
    auto slice = make_slice();
    slice->bind(w);
    return (*slice)(a);
}

namespace {

class InjectedSlice final : public RegressionSlice {
public:
    explicit InjectedSlice(const InjectedRegression::Fn& fn) : fn_(fn) {}
    void bind(std::span<const double> w) override { w_.assign(w.begin(), w.end()); }
    double operator()(double a) const override { return fn_(a, w_); }

private:
    const InjectedRegression::Fn& fn_;
    std::vector<double> w_;
};

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace

std::unique_ptr<RegressionSlice> InjectedRegression::make_slice() const {
    return std::make_unique<InjectedSlice>(fn_);
}

NadarayaWatson::NadarayaWatson(const Dataset& data, std::span<const Index> subsample,
                               Options options)
    : dim_(data.dim_w()), options_(options) {
    if (data.schema() != Schema::way)
        fail(ErrorCode::schema_mismatch, "regression needs (W, A, Y) rows");
    if (subsample.empty()) fail(ErrorCode::empty_sample, "empty regression subsample");
    if (!(options.bandwidth_scale > 0.0))
        fail(ErrorCode::non_positive_bandwidth, "bandwidth scale must be positive");

    const std::size_t m = subsample.size();
    IndexList order(subsample.begin(), subsample.end());
    std::stable_sort(order.begin(), order.end(),
                     [&](Index i, Index j) { return data.a(i) < data.a(j); });

    a_.resize(m);
    y_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        a_[k] = data.a(order[k]);
        y_[k] = data.y(order[k]);
    }
    const double rate = std::pow(static_cast<double>(m), -1.0 / (4.0 + dim_ + 1.0));
    h_a_ = options.bandwidth_scale * sample_sd(a_) * rate;

    h_w_.assign(dim_, 0.0);
    w_scaled_.assign(m * dim_, 0.0);
    std::vector<double> col(m);
    for (std::size_t j = 0; j < dim_; ++j) {
        for (std::size_t k = 0; k < m; ++k) col[k] = data.w(order[k])[j];
        h_w_[j] = options.bandwidth_scale * sample_sd(col) * rate;
        // A constant covariate carries no information; it is left out of the kernel.
        if (h_w_[j] > 0.0)
            for (std::size_t k = 0; k < m; ++k) w_scaled_[k * dim_ + j] = col[k] / h_w_[j];
    }

    y_mean_ = std::accumulate(y_.begin(), y_.end(), 0.0) / static_cast<double>(m);
    degenerate_ = std::all_of(y_.begin(), y_.end(), [&](double v) { return v == y_[0]; });
}

/// Covariate weights are fixed at bind time; prefix sums over the
/// treatment-sorted rows then give each evaluation in O(log m).
class NadarayaWatsonSlice final : public RegressionSlice {
public:
    explicit NadarayaWatsonSlice(const NadarayaWatson& nw)
        : nw_(nw), weight_(nw.size()), prefix_(6 * (nw.size() + 1), 0.0), z_(nw.dim_) {}

    void bind(std::span<const double> w) override {
        if (nw_.degenerate_) return;
        const std::size_t m = nw_.size();
        const std::size_t d = nw_.dim_;
        for (std::size_t j = 0; j < d; ++j) z_[j] = nw_.h_w_[j] > 0.0 ? w[j] / nw_.h_w_[j] : 0.0;

        double max_log = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < m; ++k) {
            const double* row = nw_.w_scaled_.data() + k * d;
            double q = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                if (nw_.h_w_[j] <= 0.0) continue;
                const double u = z_[j] - row[j];
                q += u * u;
            }
            weight_[k] = -0.5 * q;
            max_log = std::max(max_log, weight_[k]);
        }
        double* p = prefix_.data();
        double wsum = 0.0, wysum = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double om = std::exp(weight_[k] - max_log);
            const double a = nw_.a_[k];
            const double y = nw_.y_[k];
            double* prev = p + 6 * k;
            double* next = p + 6 * (k + 1);
            next[0] = prev[0] + om;
            next[1] = prev[1] + om * a;
            next[2] = prev[2] + om * a * a;
            next[3] = prev[3] + om * y;
            next[4] = prev[4] + om * y * a;
            next[5] = prev[5] + om * y * a * a;
            wsum += om;
            wysum += om * y;
        }
        fallback_ = wysum / wsum;
        total_ = wsum;
    }

    double operator()(double a) const override {
        if (nw_.degenerate_) return clamp(nw_.y_mean_);
        const double h = nw_.h_a_;
        if (!(h > 0.0)) return clamp(fallback_);
        const auto lo = std::upper_bound(nw_.a_.begin(), nw_.a_.end(), a - h) - nw_.a_.begin();
        const auto hi = std::lower_bound(nw_.a_.begin(), nw_.a_.end(), a + h) - nw_.a_.begin();
        if (hi <= lo) return clamp(fallback_);
        const double* p_lo = prefix_.data() + 6 * lo;
        const double* p_hi = prefix_.data() + 6 * hi;
        // sum over the window of w * (h^2 - (A - a)^2), for w = omega and omega * y
        auto window = [&](int off) {
            const double s0 = p_hi[off] - p_lo[off];
            const double s1 = p_hi[off + 1] - p_lo[off + 1];
            const double s2 = p_hi[off + 2] - p_lo[off + 2];
            return (h * h - a * a) * s0 + 2.0 * a * s1 - s2;
        };
        const double den = window(0);
        if (!(den > 1e-10 * h * h * total_)) return clamp(fallback_);
        return clamp(window(3) / den);
    }

private:
    double clamp(double v) const {
        if (!nw_.options_.clamp_unit) return v;
        return std::min(std::max(v, kQbarFloor), 1.0 - kQbarFloor);
    }

    const NadarayaWatson& nw_;
    std::vector<double> weight_;
    std::vector<double> prefix_;
    std::vector<double> z_;
    double fallback_ = 0.0;
    double total_ = 0.0;
};

std::unique_ptr<RegressionSlice> NadarayaWatson::make_slice() const {
    return std::make_unique<NadarayaWatsonSlice>(*this);
}

} // namespace smoothsel
