// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "capi/runs.hpp"

#include "smoothsel/error.hpp"

#include <charconv>
#include <cmath>

namespace smoothsel::capi {

void Table::add_row(std::vector<std::string> row) {
    if (row.size() != columns.size()) fail(ErrorCode::internal, "row width does not match table '" + name + "'");
    rows.push_back(std::move(row));
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) fail(ErrorCode::internal, "number formatting failed");
    return std::string(buf, ptr);
}

std::string format_number(std::size_t value) { return std::to_string(value); }

namespace {

using N = std::string;

N num(double v) { return format_number(v); }
N num(std::size_t v) { return format_number(v); }
N yes_no(bool v) { return v ? "1" : "0"; }

} // namespace

Result run_estimate(const Settings& settings, const Dataset& data) {
    settings.validate();
    const SmoothedFamily family = settings.family();
    const EstimateReport r = estimate_adaptive(data, family, settings.estimate_config(data.size()));

    Table t{"estimate",
            {"point", "ci_low", "ci_high", "alt_ci_low", "alt_ci_high", "delta_eps", "delta_zero", "r_hat",
             "beta_hat", "gamma_hat", "nu_hat", "c_sigma", "flags", "point_at_delta_zero", "alpha",
             "se_scale", "c_hat", "c_bprime", "c_sigmaprime", "delta1", "delta2", "delta3", "gap",
             "feasible_max", "n", "l1", "l2", "m"},
            {}};
    t.add_row({num(r.point), num(r.ci_low), num(r.ci_high), num(r.alt_ci_low), num(r.alt_ci_high),
               num(r.selection.delta_eps), num(r.selection.delta_zero), num(r.selection.r_hat),
               num(r.rates.beta_hat), num(r.rates.gamma_hat), num(r.rates.nu_hat), num(r.rates.c_sigma),
               r.diagnostics.flags(), num(r.point_at_delta_zero), num(r.alpha), num(r.se_scale),
               num(r.selection.c_hat), num(r.rates.c_bprime), num(r.rates.c_sigmaprime),
               num(r.rates.anchors.delta1), num(r.rates.anchors.delta2), num(r.rates.anchors.delta3),
               num(r.rates.anchors.gap), num(r.feasible_max), num(r.split.n), num(r.split.l1),
               num(r.split.l2), num(r.split.m())});
    Result out;
    out.tables.push_back(std::move(t));
    if (!r.grid.empty()) {
        Table g{"grid", {"delta", "b_prime", "sigma", "sigma_prime"}, {}};
        for (const auto& p : r.grid) g.add_row({num(p.delta), num(p.b_prime), num(p.sigma), num(p.sigma_prime)});
        out.tables.push_back(std::move(g));
    }
    return out;
}

Result run_select(const Settings& settings, const Dataset& data) {
    settings.validate();
    const SmoothedFamily family = settings.family();
    const EstimateConfig cfg = settings.estimate_config(data.size());
    const SplitPlan sp = three_way_split(data.size(), cfg.p1, cfg.p2, cfg.shuffle_seed);
    const NuisanceFit fit1 = family.fit_nuisance(data, sp.s1);
    const double feasible = family.feasible_max(fit1);
    CrossFitProbe probe(family, fit1, data, sp.s2);

    AnchorConfig anchors = cfg.anchor_mode == AnchorMode::fixed
                               ? cfg.anchors
                               : default_anchors(sp.n, sp.l1, sp.l2, feasible, cfg.anchor_rule);
    const double lo = cfg.grid_min > 0.0 ? cfg.grid_min : feasible / 50.0;
    const double hi = cfg.grid_max > 0.0 ? cfg.grid_max : feasible / 1.5;
    const std::vector<double> grid = log_grid(lo, hi, cfg.grid_points);
    std::vector<GridPoint> curve;
    std::string scan_status = "not_run";
    if (cfg.anchor_mode == AnchorMode::scan) {
        try {
            ScanResult scan = scan_anchors(probe, grid, anchors.gap);
            anchors = scan.anchors;
            curve = std::move(scan.grid);
            scan_status = "ok";
        } catch (const Error& e) {
            if (e.code() != ErrorCode::no_linear_region) throw;
            scan_status = "no_linear_region";
        }
    }
    if (curve.empty()) {
        probe.prefetch(grid);
        for (double d : grid)
            curve.push_back({d, probe.b_prime(d, anchors.gap), probe.sigma(d), probe.sigma_prime(d, anchors.gap)});
    }

    Result out;
    Table rates{"rates",
                {"delta1", "delta2", "delta3", "gap", "beta_hat", "gamma_hat", "nu_hat", "c_bprime", "c_sigma",
                 "c_sigmaprime", "r_hat", "c_hat", "delta_eps", "delta_zero", "feasible_max", "m", "scan",
                 "status"},
                {}};
    std::vector<std::string> row = {num(anchors.delta1), num(anchors.delta2), num(anchors.delta3),
                                    num(anchors.gap)};
    try {
        const RateEstimates re = estimate_rates(probe, anchors);
        const SmoothingSelection sel = select_smoothing(re, sp.m(), cfg.epsilon, feasible);
        for (double v : {re.beta_hat, re.gamma_hat, re.nu_hat, re.c_bprime, re.c_sigma, re.c_sigmaprime,
                         sel.r_hat, sel.c_hat, sel.delta_eps, sel.delta_zero})
            row.push_back(num(v));
        row.push_back(num(feasible));
        row.push_back(num(sp.m()));
        row.push_back(scan_status);
        row.push_back("ok");
    } catch (const Error& e) {
        // Diagnostics are still useful when the rates cannot be formed.
        while (row.size() < 14) row.push_back("nan");
        row.push_back(num(feasible));
        row.push_back(num(sp.m()));
        row.push_back(scan_status);
        row.push_back(error_code_name(e.code()));
    }
    rates.add_row(std::move(row));
    out.tables.push_back(std::move(rates));

    Table g{"grid", {"delta", "b_prime", "sigma", "sigma_prime", "log_delta", "log_abs_b_prime", "log_sigma"}, {}};
    for (const auto& p : curve)
        g.add_row({num(p.delta), num(p.b_prime), num(p.sigma), num(p.sigma_prime), num(std::log(p.delta)),
                   num(std::log(std::abs(p.b_prime))), num(std::log(p.sigma))});
    out.tables.push_back(std::move(g));
    return out;
}

Result run_simulate(const Settings& settings) {
    settings.validate();
    BenchmarkConfig cfg;
    cfg.target = settings.target();
    cfg.selectors = settings.selectors();
    cfg.n_list = settings.counts("sim.n");
    cfg.reps = settings.count("sim.reps");
    cfg.alpha = settings.real("alpha");
    cfg.seed = settings.count("seed");
    cfg.workers = settings.count("workers");
    cfg.estimate = settings.estimate_config(cfg.n_list.empty() ? 0 : cfg.n_list.front());
    cfg.estimate.shuffle_seed.reset();
    cfg.oracle_grid = settings.oracle_grid();
    const BenchmarkResult b = run_benchmark(cfg);

    Result out;
    Table t{"summary",
            {"selector", "n", "replicates", "failures", "mse", "mse_se", "coverage", "alt_coverage",
             "mean_delta", "mean_r_hat", "psi_true"},
            {}};
    for (const auto& r : b.rows)
        t.add_row({r.selector, num(r.n), num(r.replicates), num(r.failures), num(r.mse), num(r.mse_se),
                   num(r.coverage), num(r.alt_coverage), num(r.mean_delta), num(r.mean_r_hat), num(b.psi_true)});
    out.tables.push_back(std::move(t));

    Table rep{"replicates",
              {"selector", "n", "replicate", "seed", "ok", "delta", "estimate", "sq_error", "ci_low", "ci_high",
               "covered", "alt_covered", "r_hat", "error"},
              {}};
    for (const auto& r : b.records)
        rep.add_row({r.selector, num(r.n), num(r.replicate), std::to_string(r.seed), yes_no(r.ok), num(r.delta),
                     num(r.estimate), num(r.sq_error), num(r.ci_low), num(r.ci_high), yes_no(r.covered),
                     yes_no(r.alt_covered), num(r.r_hat), r.error});
    out.tables.push_back(std::move(rep));
    return out;
}

Result run_oracle(const Settings& settings) {
    settings.validate();
    const OracleTarget target = settings.target();
    const std::vector<double> deltas = settings.reals("oracle.deltas");
    const TruthBundle tb = truth_bundle(target, deltas, settings.count("oracle.mc_draws"), settings.count("seed"));

    Result out;
    Table t{"truth", {"delta", "psi_delta", "b0", "sigma_inf", "psi_se", "sigma_se", "psi_true", "psi_true_se"}, {}};
    for (const auto& e : tb.smoothed)
        t.add_row({num(e.delta), num(e.psi_delta), num(e.b0), num(e.sigma_inf), num(e.psi_se), num(e.sigma_se),
                   num(tb.psi_true), num(tb.psi_true_se)});
    out.tables.push_back(std::move(t));

    const std::size_t reps = settings.count("oracle.dstar_reps");
    if (reps == 0) return out;
    const SmoothedFamily family = family_for(target);
    const auto grid = settings.oracle_grid();
    Table star{"delta_star", {"n", "delta_star", "grid_argmin", "failures"}, {}};
    Table curve{"mse_curve", {"n", "delta", "mse", "mse_se"}, {}};
    std::vector<double> x, y;
    for (std::size_t n : settings.counts("sim.n")) {
        const DeltaStar ds = oracle_delta_star(target, family, n, grid, reps, settings.count("seed"),
                                               settings.count("workers"), settings.real("split.p1"),
                                               settings.real("split.p2"));
        star.add_row({num(n), num(ds.delta_star), num(ds.grid_argmin), num(ds.failures)});
        for (std::size_t j = 0; j < ds.grid.size(); ++j)
            curve.add_row({num(n), num(ds.grid[j]), num(ds.mse[j]), num(ds.mse_se[j])});
        x.push_back(std::log(static_cast<double>(n)));
        y.push_back(std::log(ds.delta_star));
    }
    out.tables.push_back(std::move(star));
    out.tables.push_back(std::move(curve));
    if (x.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            mx += x[i];
            my += y[i];
        }
        mx /= static_cast<double>(x.size());
        my /= static_cast<double>(x.size());
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
        }
        const double slope = sxy / sxx;
        Table fit{"delta_star_fit", {"slope", "constant"}, {}};
        fit.add_row({num(slope), num(std::exp(my - slope * mx))});
        out.tables.push_back(std::move(fit));
    }
    return out;
}

} // namespace smoothsel::capi
