// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothsel/sim.hpp"

#include "smoothsel/error.hpp"
#include "smoothsel/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace smoothsel {

SelectorKind parse_selector_kind(std::string_view name) {
    if (name == "adaptive") return SelectorKind::adaptive;
    if (name == "fixed_rate" || name == "fixed") return SelectorKind::fixed_rate;
    if (name == "oracle_grid" || name == "oracle") return SelectorKind::oracle_grid;
    fail(ErrorCode::invalid_argument, "unknown selector '" + std::string(name) + "'");
}

std::string_view selector_kind_name(SelectorKind kind) {
    switch (kind) {
    case SelectorKind::adaptive: return "adaptive";
    case SelectorKind::fixed_rate: return "fixed_rate";
    case SelectorKind::oracle_grid: return "oracle_grid";
    }
    return "adaptive";
}

SelectorSpec SelectorSpec::adaptive(std::string label) {
    return {SelectorKind::adaptive, 0.0, 0.0, std::move(label)};
}

SelectorSpec SelectorSpec::fixed_rate(double c, double r, std::string label) {
    if (!(c > 0.0) || !(r >= 0.0))
        fail(ErrorCode::invalid_argument, "fixed_rate needs c > 0 and r >= 0");
    if (label.empty()) {
        std::ostringstream s;
        s << "fixed_c" << c << "_r" << r;
        label = s.str();
    }
    return {SelectorKind::fixed_rate, c, r, std::move(label)};
}

SelectorSpec SelectorSpec::oracle_grid(std::string label) {
    return {SelectorKind::oracle_grid, 0.0, 0.0, std::move(label)};
}

SmoothedFamily family_for(const OracleTarget& target) {
    if (std::holds_alternative<NormalDensityDgp>(target.dgp))
        return SmoothedFamily::density(target.point, target.kernel);
    if (const auto* d = std::get_if<DoseResponseDgp>(&target.dgp))
        return SmoothedFamily::dose_response(target.point, target.kernel, beta_dgp_propensity(*d));
    return SmoothedFamily::counterfactual_mean(
        binary_dgp_propensity(std::get<BinaryTreatmentDgp>(target.dgp)));
}

double jackknife_mean_se(const std::vector<double>& values) {
    const std::size_t r = values.size();
    if (r < 2) return 0.0;
    const double total = [&] {
        long double s = 0.0L;
        for (double v : values) s += v;
        return static_cast<double>(s);
    }();
    const double rd = static_cast<double>(r);
    std::vector<double> loo(r);
    for (std::size_t i = 0; i < r; ++i) loo[i] = (total - values[i]) / (rd - 1.0);
    return std::sqrt((rd - 1.0) * empirical_centered_second_moment(loo));
}

double jackknife_min_mean_se(const std::vector<std::vector<double>>& columns) {
    if (columns.empty()) return 0.0;
    const std::size_t r = columns[0].size();
    if (r < 2) return 0.0;
    const double rd = static_cast<double>(r);
    std::vector<double> totals;
    for (const auto& c : columns) {
        long double s = 0.0L;
        for (double v : c) s += v;
        totals.push_back(static_cast<double>(s));
    }
    std::vector<double> loo(r);
    for (std::size_t i = 0; i < r; ++i) {
        double best = INFINITY;
        for (std::size_t j = 0; j < columns.size(); ++j)
            best = std::min(best, (totals[j] - columns[j][i]) / (rd - 1.0));
        loo[i] = best;
    }
    return std::sqrt((rd - 1.0) * empirical_centered_second_moment(loo));
}

namespace {

// Everything one replicate produces for every selector.
struct ReplicateOutput {
    std::vector<ReplicateRecord> records;              // one per selector
    std::vector<double> grid_est;                      // oracle grid estimates
    bool grid_ok = false;
};

ReplicateOutput run_replicate(const BenchmarkConfig& cfg, const SmoothedFamily& family,
                              double truth, std::size_t n, std::size_t rep) {
    ReplicateOutput out;
    const std::uint64_t seed = derive_seed(cfg.seed, n, rep);
    const Dataset data = sample_dgp(cfg.target.dgp, n, seed);
    const double q = normal_quantile(1.0 - cfg.alpha / 2.0);

    bool need_fit2 = false;
    for (const auto& s : cfg.selectors) need_fit2 |= s.kind != SelectorKind::adaptive;

    std::optional<SplitPlan> split;
    std::optional<NuisanceFit> fit2;
    std::string fit_error;
    if (need_fit2) {
        try {
            split = three_way_split(n, cfg.estimate.p1, cfg.estimate.p2, cfg.estimate.shuffle_seed);
            fit2 = family.fit_nuisance(data, split->s12());
        } catch (const Error& e) {
            fit_error = e.what();
        }
    }

    for (const auto& s : cfg.selectors) {
        ReplicateRecord rec;
        rec.selector = s.label;
        rec.n = n;
        rec.replicate = rep;
        rec.seed = seed;
        try {
            if (s.kind == SelectorKind::adaptive) {
                EstimateConfig ec = cfg.estimate;
                ec.alpha = cfg.alpha;
                const EstimateReport r = estimate_adaptive(data, family, ec);
                rec.delta = r.selection.delta_eps;
                rec.estimate = r.point;
                rec.ci_low = r.ci_low;
                rec.ci_high = r.ci_high;
                rec.covered = r.ci_low <= truth && truth <= r.ci_high;
                rec.alt_covered = r.alt_ci_low <= truth && truth <= r.alt_ci_high;
                rec.r_hat = r.selection.r_hat;
            } else if (s.kind == SelectorKind::fixed_rate) {
                if (!fit2) fail(ErrorCode::internal, fit_error);
                const double delta = std::min(s.c * std::pow(static_cast<double>(n), -s.r),
                                              family.feasible_max(*fit2));
                const double d[1] = {delta};
                const auto u = family.pseudo_outcomes(*fit2, data, split->s3, d);
                const double half = q * std::sqrt(empirical_centered_second_moment(u[0]) /
                                                  static_cast<double>(split->m()));
                rec.delta = delta;
                rec.estimate = empirical_mean(u[0]);
                rec.ci_low = rec.estimate - half;
                rec.ci_high = rec.estimate + half;
                rec.covered = rec.ci_low <= truth && truth <= rec.ci_high;
            } else {
                // Filled in after aggregation; here only the grid curve is recorded.
                if (!fit2) fail(ErrorCode::internal, fit_error);
                if (!out.grid_ok) {
                    const auto est = one_step(family, *fit2, data, split->s3, cfg.oracle_grid);
                    out.grid_est = est;
                    out.grid_ok = true;
                }
            }
            rec.sq_error = (rec.estimate - truth) * (rec.estimate - truth);
            rec.ok = true;
        } catch (const Error& e) {
            rec.ok = false;
            rec.error = e.what();
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

} // namespace

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
    if (cfg.reps < 2) fail(ErrorCode::precondition, "benchmark needs at least two replicates");
    if (cfg.selectors.empty()) fail(ErrorCode::precondition, "benchmark needs at least one selector");
    if (cfg.n_list.empty()) fail(ErrorCode::precondition, "benchmark needs at least one sample size");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        fail(ErrorCode::invalid_alpha, "alpha must lie in (0, 1)");
    const bool has_oracle = std::any_of(cfg.selectors.begin(), cfg.selectors.end(), [](const auto& s) {
        return s.kind == SelectorKind::oracle_grid;
    });
    if (has_oracle && cfg.oracle_grid.empty())
        fail(ErrorCode::precondition, "oracle_grid selector needs a non-empty grid");

    const SmoothedFamily family = family_for(cfg.target);
    BenchmarkResult result;
    result.psi_true = true_psi(cfg.target);

    for (std::size_t n : cfg.n_list) {
        std::vector<ReplicateOutput> outs(cfg.reps);
        parallel_for(cfg.reps, cfg.workers, [&](std::size_t rep) {
            outs[rep] = run_replicate(cfg, family, result.psi_true, n, rep);
        });

        // Oracle grid: per-point MSE over the replicates where the curve exists.
        std::vector<std::vector<double>> grid_cols(cfg.oracle_grid.size());
        std::size_t grid_fail = 0;
        for (const auto& o : outs) {
            if (!o.grid_ok) {
                ++grid_fail;
                continue;
            }
            for (std::size_t j = 0; j < o.grid_est.size(); ++j) {
                const double e = o.grid_est[j] - result.psi_true;
                grid_cols[j].push_back(e * e);
            }
        }
        std::size_t best = 0;
        double best_mse = INFINITY;
        if (has_oracle && !grid_cols[0].empty()) {
            for (std::size_t j = 0; j < grid_cols.size(); ++j) {
                const double mse = empirical_mean(grid_cols[j]);
                if (mse < best_mse) {
                    best_mse = mse;
                    best = j;
                }
            }
        }

        for (std::size_t k = 0; k < cfg.selectors.size(); ++k) {
            const SelectorSpec& s = cfg.selectors[k];
            BenchmarkRow row;
            row.selector = s.label;
            row.n = n;
            if (s.kind == SelectorKind::oracle_grid) {
                row.failures = grid_fail;
                row.replicates = cfg.reps - grid_fail;
                if (row.replicates > 0) {
                    row.mse = best_mse;
                    row.mse_se = jackknife_min_mean_se(grid_cols);
                    row.mean_delta = cfg.oracle_grid[best];
                }
                for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
                    ReplicateRecord& rec = outs[rep].records[k];
                    if (!rec.ok) continue;
                    rec.delta = cfg.oracle_grid[best];
                    rec.estimate = outs[rep].grid_est[best];
                    rec.sq_error = (rec.estimate - result.psi_true) * (rec.estimate - result.psi_true);
                }
                result.rows.push_back(row);
                continue;
            }
            std::vector<double> sq;
            std::size_t hits = 0, alt_hits = 0;
            double delta_sum = 0.0, r_sum = 0.0;
            for (const auto& o : outs) {
                const ReplicateRecord& rec = o.records[k];
                if (!rec.ok) {
                    ++row.failures;
                    continue;
                }
                sq.push_back(rec.sq_error);
                hits += rec.covered;
                alt_hits += rec.alt_covered;
                delta_sum += rec.delta;
                r_sum += rec.r_hat;
            }
            row.replicates = sq.size();
            if (!sq.empty()) {
                const double cnt = static_cast<double>(sq.size());
                row.mse = empirical_mean(sq);
                row.mse_se = jackknife_mean_se(sq);
                row.coverage = static_cast<double>(hits) / cnt;
                row.alt_coverage = s.kind == SelectorKind::adaptive ? static_cast<double>(alt_hits) / cnt : 0.0;
                row.mean_delta = delta_sum / cnt;
                row.mean_r_hat = s.kind == SelectorKind::adaptive ? r_sum / cnt : 0.0;
            }
            result.rows.push_back(row);
        }
        for (auto& o : outs)
            for (auto& rec : o.records) result.records.push_back(std::move(rec));
    }
    return result;
}

} // namespace smoothsel
