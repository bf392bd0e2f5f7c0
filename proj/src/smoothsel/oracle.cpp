// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothsel/oracle.hpp"

#include "smoothsel/error.hpp"
#include "smoothsel/estimator.hpp"
#include "smoothsel/parallel.hpp"
#include "smoothsel/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace smoothsel {

namespace {

constexpr std::size_t kFullHermiteNodes = 32;
constexpr std::size_t kReducedHermiteNodes = 40;

struct WeightedPoint {
    std::vector<double> x;
    double weight;
};

// Product Gauss-Hermite rule for a standard normal vector in `dim` coordinates.
std::vector<WeightedPoint> hermite_product(std::size_t dim, std::size_t nodes) {
    const QuadratureRule gh = gauss_hermite(nodes);
    std::vector<WeightedPoint> out;
    std::vector<std::size_t> idx(dim, 0);
    for (;;) {
        WeightedPoint p{std::vector<double>(dim), 1.0};
        for (std::size_t j = 0; j < dim; ++j) {
            p.x[j] = gh.nodes[idx[j]];
            p.weight *= gh.weights[idx[j]];
        }
        out.push_back(std::move(p));
        std::size_t j = 0;
        while (j < dim && ++idx[j] == nodes) idx[j++] = 0;
        if (j == dim) break;
    }
    return out;
}

// For L ~ N(0, I) and a function of L only through Z = B L, integrate over Z
// with a product rule and map each node back to the minimum-norm L with B L = Z.
std::vector<WeightedPoint> reduced_gaussian_rule(const Eigen::MatrixXd& b, std::size_t nodes) {
    const Eigen::MatrixXd cov = b * b.transpose();
    const Eigen::MatrixXd chol = cov.llt().matrixL();
    const Eigen::MatrixXd back = b.transpose() * cov.inverse();
    auto base = hermite_product(static_cast<std::size_t>(b.rows()), nodes);
    for (auto& p : base) {
        const Eigen::VectorXd xi = Eigen::Map<const Eigen::VectorXd>(p.x.data(), b.rows());
        const Eigen::VectorXd l = back * (chol * xi);
        p.x.assign(l.data(), l.data() + l.size());
    }
    return base;
}

// mu depends on L through (c, d); lambda adds e.
Eigen::MatrixXd dose_projection(bool with_lambda) {
    Eigen::MatrixXd b(with_lambda ? 3 : 2, 4);
    b.row(0) << 0.2, 0.2, 0.3, -0.1;
    b.row(1) << -0.1, 0.0, 0.1, 0.0;
    if (with_lambda) b.row(2) << 0.1, 0.1, -0.1, 0.2;
    return b;
}

// Treatment nodes a_k and weights w_k * K_delta(a_k - a0) over the kernel
// window intersected with [0, 1], split at a0.
struct WindowRule {
    std::vector<double> a;
    std::vector<double> w;   // plain Gauss-Legendre weights
    std::vector<double> k;   // K_delta(a - a0)
};

WindowRule window_rule(const Kernel& kernel, double delta, double a0) {
    WindowRule r;
    const double reach = delta * kernel.support_radius();
    const double lo = std::max(0.0, a0 - reach), hi = std::min(1.0, a0 + reach);
    auto panel = [&](double from, double to) {
        if (!(to > from)) return;
        const QuadratureRule q = gauss_legendre(from, to, 32);
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            r.a.push_back(q.nodes[i]);
            r.w.push_back(q.weights[i]);
            r.k.push_back(kernel((q.nodes[i] - a0) / delta) / delta);
        }
    };
    panel(lo, std::min(a0, hi));
    panel(std::max(a0, lo), hi);
    return r;
}

double density_moment(const NormalDensityDgp& d, const Kernel& kernel, double x, double delta,
                      int power) {
    // integral of K(u)^power * phi(x + delta u) du over the kernel support
    const double r = kernel.support_radius();
    const int panels = kernel.shape() == KernelShape::gaussian ? 16 : 2;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = -r + 2.0 * r * p / panels, hi = -r + 2.0 * r * (p + 1) / panels;
        s += integrate([&](double u) { return std::pow(kernel(u), power) * d.density(x + delta * u); },
                       lo, hi, 64);
    }
    return s;
}

void check_delta(double delta) {
    if (!(delta > 0.0)) fail(ErrorCode::non_positive_bandwidth, "smoothing level must be positive");
}

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;
};

// Weighted mean and variance of f over a rule.
template <class F>
MeanVar weighted_moments(const std::vector<WeightedPoint>& rule, F&& f) {
    long double s1 = 0.0L, s2 = 0.0L;
    for (const auto& p : rule) {
        const double v = f(p.x);
        s1 += p.weight * v;
        s2 += p.weight * v * v;
    }
    return {static_cast<double>(s1), static_cast<double>(s2 - s1 * s1)};
}

} // namespace

double true_psi(const OracleTarget& target) {
    if (const auto* d = std::get_if<NormalDensityDgp>(&target.dgp)) return d->density(target.point);
    if (const auto* d = std::get_if<DoseResponseDgp>(&target.dgp)) {
        const auto rule = hermite_product(DoseResponseDgp::dim_l, kFullHermiteNodes);
        return weighted_moments(rule, [&](const std::vector<double>& l) { return d->mu(l, target.point); }).mean;
    }
    const auto& b = std::get<BinaryTreatmentDgp>(target.dgp);
    const auto rule = hermite_product(BinaryTreatmentDgp::dim_w, 64);
    return weighted_moments(rule, [&](const std::vector<double>& w) { return b.qbar(1.0, w); }).mean;
}

double true_psi_mc(const OracleTarget& target, std::size_t draws, std::uint64_t seed, double* se) {
    if (draws < 2) fail(ErrorCode::precondition, "Monte Carlo needs at least two draws");
    if (const auto* d = std::get_if<NormalDensityDgp>(&target.dgp)) {
        if (se) *se = 0.0;
        return d->density(target.point);
    }
    const Dataset data = sample_dgp(target.dgp, draws, seed);
    std::vector<double> v(draws);
    for (std::size_t i = 0; i < draws; ++i) {
        if (const auto* d = std::get_if<DoseResponseDgp>(&target.dgp))
            v[i] = d->mu(data.w(i), target.point);
        else
            v[i] = std::get<BinaryTreatmentDgp>(target.dgp).qbar(1.0, data.w(i));
    }
    const double mean = empirical_mean(v);
    if (se) *se = std::sqrt(empirical_centered_second_moment(v) / static_cast<double>(draws));
    return mean;
}

double true_smoothed_psi(const OracleTarget& target, double delta) {
    check_delta(delta);
    if (const auto* d = std::get_if<NormalDensityDgp>(&target.dgp))
        return density_moment(*d, target.kernel, target.point, delta, 1);
    if (const auto* d = std::get_if<DoseResponseDgp>(&target.dgp)) {
        const WindowRule wr = window_rule(target.kernel, delta, target.point);
        const auto rule = reduced_gaussian_rule(dose_projection(false), kReducedHermiteNodes);
        return weighted_moments(rule, [&](const std::vector<double>& l) {
            double s = 0.0;
            for (std::size_t k = 0; k < wr.a.size(); ++k) s += wr.w[k] * wr.k[k] * d->mu(l, wr.a[k]);
            return s;
        }).mean;
    }
    const auto& b = std::get<BinaryTreatmentDgp>(target.dgp);
    const auto rule = hermite_product(BinaryTreatmentDgp::dim_w, 64);
    return weighted_moments(rule, [&](const std::vector<double>& w) {
        const double g = b.propensity(w);
        return g / std::max(g, delta) * b.qbar(1.0, w);
    }).mean;
}

double true_sigma_inf(const OracleTarget& target, double delta) {
    check_delta(delta);
    if (const auto* d = std::get_if<NormalDensityDgp>(&target.dgp)) {
        const double psi = density_moment(*d, target.kernel, target.point, delta, 1);
        const double second = density_moment(*d, target.kernel, target.point, delta, 2) / delta;
        return std::sqrt(std::max(0.0, second - psi * psi));
    }
    if (const auto* d = std::get_if<DoseResponseDgp>(&target.dgp)) {
        // Var U = E_W int K^2 / g * mu (1 - mu) da + Var_W int K mu da
        const WindowRule wr = window_rule(target.kernel, delta, target.point);
        const auto rule = reduced_gaussian_rule(dose_projection(true), kReducedHermiteNodes);
        long double inner = 0.0L;
        const MeanVar mv = weighted_moments(rule, [&](const std::vector<double>& l) {
            double m = 0.0;
            for (std::size_t k = 0; k < wr.a.size(); ++k) m += wr.w[k] * wr.k[k] * d->mu(l, wr.a[k]);
            return m;
        });
        for (const auto& p : rule) {
            double v = 0.0;
            for (std::size_t k = 0; k < wr.a.size(); ++k) {
                const double mu = d->mu(p.x, wr.a[k]);
                const double g = std::max(d->treatment_density(wr.a[k], p.x), kPropensityFloor);
                v += wr.w[k] * wr.k[k] * wr.k[k] / g * mu * (1.0 - mu);
            }
            inner += p.weight * v;
        }
        return std::sqrt(static_cast<double>(inner) + mv.var);
    }
    const auto& b = std::get<BinaryTreatmentDgp>(target.dgp);
    const auto rule = hermite_product(BinaryTreatmentDgp::dim_w, 64);
    long double inner = 0.0L;
    const MeanVar mv = weighted_moments(rule, [&](const std::vector<double>& w) {
        const double g = b.propensity(w);
        return g / std::max(g, delta) * b.qbar(1.0, w);
    });
    for (const auto& p : rule) {
        const double g = b.propensity(p.x), gd = std::max(g, delta), q = b.qbar(1.0, p.x);
        inner += p.weight * g * q * (1.0 - q) / (gd * gd);
    }
    return std::sqrt(static_cast<double>(inner) + mv.var);
}

double true_sigma_inf_mc(const OracleTarget& target, double delta, std::size_t draws,
                         std::uint64_t seed, double* se) {
    check_delta(delta);
    if (draws < 2) fail(ErrorCode::precondition, "Monte Carlo needs at least two draws");
    const Dataset data = sample_dgp(target.dgp, draws, seed);
    std::vector<double> u(draws);
    if (const auto* d = std::get_if<NormalDensityDgp>(&target.dgp)) {
        (void)d;
        for (std::size_t i = 0; i < draws; ++i)
            u[i] = target.kernel((data.o(i) - target.point) / delta) / delta;
    } else if (const auto* d = std::get_if<DoseResponseDgp>(&target.dgp)) {
        const WindowRule wr = window_rule(target.kernel, delta, target.point);
        for (std::size_t i = 0; i < draws; ++i) {
            const auto l = data.w(i);
            const double a = data.a(i);
            double m = 0.0;
            for (std::size_t k = 0; k < wr.a.size(); ++k) m += wr.w[k] * wr.k[k] * d->mu(l, wr.a[k]);
            const double kk = target.kernel((a - target.point) / delta) / delta;
            const double g = std::max(d->treatment_density(a, l), kPropensityFloor);
            u[i] = (kk == 0.0 ? 0.0 : kk / g * (data.y(i) - d->mu(l, a))) + m;
        }
    } else {
        const auto& b = std::get<BinaryTreatmentDgp>(target.dgp);
        for (std::size_t i = 0; i < draws; ++i) {
            const auto w = data.w(i);
            const double g = b.propensity(w), gd = std::max(g, delta);
            u[i] = data.a(i) / gd * (data.y(i) - b.qbar(data.a(i), w)) + g / gd * b.qbar(1.0, w);
        }
    }
    const double mean = empirical_mean(u);
    long double m2 = 0.0L, m4 = 0.0L;
    for (double v : u) {
        const long double c = v - mean;
        m2 += c * c;
        m4 += c * c * c * c;
    }
    const double nd = static_cast<double>(draws);
    const double var = static_cast<double>(m2 / nd);
    const double sigma = std::sqrt(var);
    if (se) {
        const double var_se = std::sqrt(std::max(0.0, static_cast<double>(m4 / nd) - var * var) / nd);
        *se = sigma > 0.0 ? var_se / (2.0 * sigma) : 0.0;
    }
    return sigma;
}

TruthBundle truth_bundle(const OracleTarget& target, std::span<const double> deltas,
                         std::size_t mc_draws, std::uint64_t seed) {
    TruthBundle t;
    t.mc_size = mc_draws;
    t.psi_true = mc_draws > 0 ? true_psi_mc(target, mc_draws, derive_seed(seed, 0), &t.psi_true_se)
                              : true_psi(target);
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        TruthEntry e;
        e.delta = deltas[j];
        e.psi_delta = true_smoothed_psi(target, deltas[j]);
        e.b0 = e.psi_delta - t.psi_true;
        e.psi_se = t.psi_true_se;
        e.sigma_inf = mc_draws > 0
                          ? true_sigma_inf_mc(target, deltas[j], mc_draws, derive_seed(seed, 1, j), &e.sigma_se)
                          : true_sigma_inf(target, deltas[j]);
        t.smoothed.push_back(e);
    }
    return t;
}

DeltaStar oracle_delta_star(const OracleTarget& target, const SmoothedFamily& family,
                            std::size_t n, std::span<const double> delta_grid, std::size_t reps,
                            std::uint64_t seed, std::size_t workers, double p1, double p2) {
    if (delta_grid.empty()) fail(ErrorCode::precondition, "oracle grid is empty");
    if (reps < 1) fail(ErrorCode::precondition, "oracle needs at least one replicate");
    DeltaStar out;
    out.grid.assign(delta_grid.begin(), delta_grid.end());
    std::sort(out.grid.begin(), out.grid.end());
    const double truth = true_psi(target);
    const std::size_t k = out.grid.size();

    std::vector<std::vector<double>> sq(reps);
    parallel_for(reps, workers, [&](std::size_t r) {
        try {
            const Dataset data = sample_dgp(target.dgp, n, derive_seed(seed, n, r));
            const SplitPlan sp = three_way_split(n, p1, p2, derive_seed(seed, n + 1, r));
            const NuisanceFit fit2 = family.fit_nuisance(data, sp.s12());
            const auto est = one_step(family, fit2, data, sp.s3, out.grid);
            std::vector<double> e(k);
            for (std::size_t j = 0; j < k; ++j) e[j] = (est[j] - truth) * (est[j] - truth);
            sq[r] = std::move(e);
        } catch (const Error&) {
            sq[r].clear();
        }
    });

    std::vector<std::vector<double>> cols(k);
    for (const auto& e : sq) {
        if (e.empty()) {
            ++out.failures;
            continue;
        }
        for (std::size_t j = 0; j < k; ++j) cols[j].push_back(e[j]);
    }
    if (cols[0].empty()) fail(ErrorCode::internal, "every oracle replicate failed");
    for (std::size_t j = 0; j < k; ++j) {
        out.mse.push_back(empirical_mean(cols[j]));
        out.mse_se.push_back(cols[j].size() > 1
                                 ? std::sqrt(empirical_centered_second_moment(cols[j]) /
                                             static_cast<double>(cols[j].size() - 1))
                                 : 0.0);
    }
    out.argmin_index = static_cast<std::size_t>(
        std::min_element(out.mse.begin(), out.mse.end()) - out.mse.begin());
    out.grid_argmin = out.grid[out.argmin_index];
    out.delta_star = out.grid_argmin;
    const std::size_t i = out.argmin_index;
    if (i > 0 && i + 1 < k) {
        // Vertex of the parabola through the three points around the minimum.
        const double x0 = std::log(out.grid[i - 1]), x1 = std::log(out.grid[i]), x2 = std::log(out.grid[i + 1]);
        const double y0 = out.mse[i - 1], y1 = out.mse[i], y2 = out.mse[i + 1];
        const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
        const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
        if (den != 0.0) {
            const double x = x1 - 0.5 * num / den;
            if (x > x0 && x < x2) out.delta_star = std::exp(x);
        }
    }
    return out;
}

LemmaCheck truncation_variance_bound(const BinaryTreatmentDgp& dgp, double delta, std::size_t n,
                                     std::uint64_t seed, std::size_t w_draws) {
    check_delta(delta);
    const Dataset train = sample_dgp(dgp, n, derive_seed(seed, 0));
    IndexList all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    const NadarayaWatson nw(train, all, {});
    auto slice = nw.make_slice();

    std::mt19937_64 gen(derive_seed(seed, 1));
    std::normal_distribution<double> normal;
    long double s_fit1 = 0, s_fit2 = 0, s_inf1 = 0, s_inf2 = 0, l2 = 0;
    std::array<double, 2> w{};
    for (std::size_t i = 0; i < w_draws; ++i) {
        for (double& v : w) v = normal(gen);
        slice->bind(w);
        const double g = dgp.propensity(w), gd = std::max(g, delta);
        const double q0 = dgp.qbar(1.0, w), q = (*slice)(1.0);
        // Conditional moments of U = A/gd (Y - Q(1, W)) + g/gd Q(1, W) given W.
        auto moments = [&](double qq, long double& m1, long double& m2) {
            const double c = g / gd * qq, e = q0 - qq;
            const double er2 = q0 * (1.0 - q0) + e * e;
            m1 += g / gd * q0;
            m2 += g * er2 / (gd * gd) + 2.0 * g * c * e / gd + c * c;
        };
        moments(q, s_fit1, s_fit2);
        moments(q0, s_inf1, s_inf2);
        l2 += (q - q0) * (q - q0);
    }
    const long double nd = static_cast<long double>(w_draws);
    LemmaCheck c;
    c.sigma_fit = std::sqrt(static_cast<double>(s_fit2 / nd - (s_fit1 / nd) * (s_fit1 / nd)));
    c.sigma_inf = std::sqrt(static_cast<double>(s_inf2 / nd - (s_inf1 / nd) * (s_inf1 / nd)));
    c.qbar_error = std::sqrt(static_cast<double>(l2 / nd));
    c.lhs = std::abs(c.sigma_fit - c.sigma_inf);
    c.rhs = c.qbar_error / std::sqrt(delta);
    c.holds = c.lhs <= c.rhs;
    return c;
}

LemmaCheck dose_variance_bound(const DoseResponseDgp& dgp, double a0, const Kernel& kernel,
                               double delta, std::size_t n, std::uint64_t seed,
                               std::size_t w_draws) {
    check_delta(delta);
    const Dataset train = sample_dgp(dgp, n, derive_seed(seed, 0));
    IndexList all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    const NadarayaWatson nw(train, all, {});
    auto slice = nw.make_slice();
    const WindowRule wr = window_rule(kernel, delta, a0);

    std::mt19937_64 gen(derive_seed(seed, 1));
    std::normal_distribution<double> normal;
    long double s_fit1 = 0, s_fit2 = 0, s_inf1 = 0, s_inf2 = 0;
    double sup_err = 0.0, sup_inv_g = 0.0;
    std::array<double, DoseResponseDgp::dim_l> l{};
    std::vector<double> q(wr.a.size()), q0(wr.a.size()), g(wr.a.size());
    for (std::size_t i = 0; i < w_draws; ++i) {
        for (double& v : l) v = normal(gen);
        slice->bind(l);
        for (std::size_t k = 0; k < wr.a.size(); ++k) {
            q[k] = (*slice)(wr.a[k]);
            q0[k] = dgp.mu(l, wr.a[k]);
            g[k] = dgp.treatment_density(wr.a[k], l);
            sup_err = std::max(sup_err, std::abs(q[k] - q0[k]));
            sup_inv_g = std::max(sup_inv_g, 1.0 / g[k]);
        }
        // Conditional moments of U = K(A)/g (Y - Q(A, W)) + int K Q da given W,
        // with A restricted to the quadrature atoms inside the kernel window.
        auto moments = [&](const std::vector<double>& qq, long double& m1, long double& m2) {
            double mq = 0.0, mean_shift = 0.0, second = 0.0;
            for (std::size_t k = 0; k < wr.a.size(); ++k) {
                const double e = q0[k] - qq[k];
                mq += wr.w[k] * wr.k[k] * qq[k];
                mean_shift += wr.w[k] * wr.k[k] * e;
                second += wr.w[k] * wr.k[k] * wr.k[k] / g[k] * (q0[k] * (1.0 - q0[k]) + e * e);
            }
            m1 += mq + mean_shift;
            m2 += second + 2.0 * mq * mean_shift + mq * mq;
        };
        moments(q, s_fit1, s_fit2);
        moments(q0, s_inf1, s_inf2);
    }
    const long double nd = static_cast<long double>(w_draws);
    LemmaCheck c;
    c.sigma_fit = std::sqrt(static_cast<double>(s_fit2 / nd - (s_fit1 / nd) * (s_fit1 / nd)));
    c.sigma_inf = std::sqrt(static_cast<double>(s_inf2 / nd - (s_inf1 / nd) * (s_inf1 / nd)));
    c.qbar_error = sup_err;
    c.lhs = std::abs(c.sigma_fit - c.sigma_inf);
    c.rhs = std::sqrt(sup_inv_g * kernel.l2sq() / delta) * sup_err;
    c.holds = c.lhs <= c.rhs;
    return c;
}

} // namespace smoothsel
