// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "capi/settings.hpp"

#include "smoothsel/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace smoothsel::capi {

namespace {

[[noreturn]] void config_fail(std::string_view key, const std::string& why) {
    fail(ErrorCode::config_error, std::string(key) + ": " + why);
}

std::vector<std::string_view> split_list(std::string_view text) {
    std::vector<std::string_view> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        std::string_view item = text.substr(0, comma);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

double parse_plain(std::string_view text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
        fail(ErrorCode::config_error, "not a number: '" + std::string(text) + "'");
    return v;
}

std::size_t parse_count(std::string_view text) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        fail(ErrorCode::config_error, "not a non-negative integer: '" + std::string(text) + "'");
    return v;
}

bool parse_bool(std::string_view text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    fail(ErrorCode::config_error, "not a boolean: '" + std::string(text) + "'");
}

SelectorSpec parse_selector(std::string_view item) {
    if (item == "adaptive") return SelectorSpec::adaptive();
    if (item == "oracle_grid") return SelectorSpec::oracle_grid();
    if (item.substr(0, 6) == "fixed:") {
        std::string_view rest = item.substr(6);
        const auto colon = rest.find(':');
        if (colon == std::string_view::npos)
            fail(ErrorCode::config_error, "fixed selector needs fixed:C:R, got '" + std::string(item) + "'");
        const double c = parse_number(rest.substr(0, colon));
        const double r = parse_number(rest.substr(colon + 1));
        return SelectorSpec::fixed_rate(c, r, std::string(item));
    }
    fail(ErrorCode::config_error, "unknown selector '" + std::string(item) + "'");
}

} // namespace

double parse_number(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse_plain(text);
    const double num = parse_plain(text.substr(0, slash));
    const double den = parse_plain(text.substr(slash + 1));
    if (den == 0.0) fail(ErrorCode::config_error, "zero denominator in '" + std::string(text) + "'");
    return num / den;
}

const std::vector<SettingSpec>& setting_specs() {
    using K = ValueKind;
    static const std::vector<SettingSpec> specs = {
        {"seed", "1", K::count, {}},
        {"workers", "1", K::count, {}},
        {"family.name", "density", K::choice, {"density", "counterfactual_mean", "dose_response"}},
        {"family.x", "0", K::real, {}},
        {"family.a0", "0.15", K::real, {}},
        {"family.kernel", "epanechnikov", K::choice, {"epanechnikov", "gaussian", "uniform"}},
        {"family.kernel_order", "2", K::choice, {"2", "4"}},
        {"family.propensity", "dgp", K::choice, {"dgp", "constant"}},
        {"family.propensity_value", "1", K::real, {}},
        {"dgp.name", "smooth", K::choice, {"smooth", "cusp", "normal", "binary"}},
        {"dgp.g_min", "0.05", K::real, {}},
        {"split.p1", "0.25", K::real, {}},
        {"split.p2", "0.5", K::real, {}},
        {"split.shuffle", "true", K::boolean, {}},
        {"epsilon", "0.05", K::real, {}},
        {"alpha", "0.05", K::real, {}},
        {"anchors.mode", "auto", K::choice, {"auto", "fixed", "scan"}},
        {"anchors.delta1", "0", K::real, {}},
        {"anchors.delta2", "0", K::real, {}},
        {"anchors.delta3", "0", K::real, {}},
        {"anchors.gap", "0", K::real, {}},
        {"anchors.c1", "0.6", K::real, {}},
        {"anchors.c2", "0.3", K::real, {}},
        {"anchors.s", "0.05", K::real, {}},
        {"grid.min", "0", K::real, {}},
        {"grid.max", "0", K::real, {}},
        {"grid.points", "12", K::count, {}},
        {"nuisance.bandwidth_scale", "1.06", K::real, {}},
        {"sim.n", "3162,10000,31623", K::count_list, {}},
        {"sim.reps", "100", K::count, {}},
        {"sim.selectors", "adaptive,fixed:0.05:1/5,fixed:0.1:1/5,fixed:0.05:1/7,fixed:0.1:1/7,oracle_grid",
         K::selector_list, {}},
        {"sim.grid_min", "0", K::real, {}},
        {"sim.grid_max", "0", K::real, {}},
        {"sim.grid_points", "16", K::count, {}},
        {"oracle.deltas", "0.01,0.02,0.04,0.08", K::real_list, {}},
        {"oracle.mc_draws", "0", K::count, {}},
        {"oracle.dstar_reps", "0", K::count, {}},
    };
    return specs;
}

Settings::Settings() {
    for (const auto& s : setting_specs()) {
        order_.push_back(s.key);
        values_.emplace(s.key, s.default_value);
    }
}

const SettingSpec& Settings::spec(std::string_view key) const {
    const auto& specs = setting_specs();
    const auto it = std::find_if(specs.begin(), specs.end(), [&](const auto& s) { return s.key == key; });
    if (it == specs.end()) fail(ErrorCode::config_error, "unknown key '" + std::string(key) + "'");
    return *it;
}

void Settings::set(std::string_view key, std::string_view value) {
    const SettingSpec& s = spec(key);
    try {
        switch (s.kind) {
        case ValueKind::real: parse_number(value); break;
        case ValueKind::count: parse_count(value); break;
        case ValueKind::boolean: parse_bool(value); break;
        case ValueKind::choice:
            if (std::find(s.choices.begin(), s.choices.end(), value) == s.choices.end())
                fail(ErrorCode::config_error, "'" + std::string(value) + "' is not one of the allowed values");
            break;
        case ValueKind::real_list:
            for (auto item : split_list(value)) parse_number(item);
            break;
        case ValueKind::count_list:
            for (auto item : split_list(value)) parse_count(item);
            break;
        case ValueKind::selector_list:
            for (auto item : split_list(value)) parse_selector(item);
            break;
        }
    } catch (const Error& e) {
        config_fail(key, e.what());
    }
    values_.find(key)->second = std::string(value);
}

const std::string& Settings::get(std::string_view key) const {
    spec(key);
    return values_.find(key)->second;
}

double Settings::real(std::string_view key) const { return parse_number(get(key)); }
std::size_t Settings::count(std::string_view key) const { return parse_count(get(key)); }
bool Settings::flag(std::string_view key) const { return parse_bool(get(key)); }

std::vector<double> Settings::reals(std::string_view key) const {
    std::vector<double> out;
    for (auto item : split_list(get(key))) out.push_back(parse_number(item));
    return out;
}

std::vector<std::size_t> Settings::counts(std::string_view key) const {
    std::vector<std::size_t> out;
    for (auto item : split_list(get(key))) out.push_back(parse_count(item));
    return out;
}

void Settings::validate() const {
    const double p1 = real("split.p1"), p2 = real("split.p2");
    if (!(p1 > 0.0 && p1 < p2 && p2 < 1.0))
        config_fail("split.p1", "need 0 < split.p1 < split.p2 < 1, got " + get("split.p1") + " and " +
                                    get("split.p2"));
    const double alpha = real("alpha");
    if (!(alpha > 0.0 && alpha < 1.0)) config_fail("alpha", "must lie in (0, 1)");
    if (!(real("epsilon") >= 0.0)) config_fail("epsilon", "must be non-negative");
    if (get("anchors.mode") == "fixed") {
        const double d1 = real("anchors.delta1"), d2 = real("anchors.delta2");
        if (!(d2 > 0.0 && d1 > d2)) config_fail("anchors.delta1", "fixed anchors need delta1 > delta2 > 0");
    }
    if (!(real("anchors.c1") > real("anchors.c2") && real("anchors.c2") > 0.0))
        config_fail("anchors.c1", "need anchors.c1 > anchors.c2 > 0");
    if (count("grid.points") < 8) config_fail("grid.points", "the anchor scan needs at least 8 points");
    if (!(real("nuisance.bandwidth_scale") > 0.0)) config_fail("nuisance.bandwidth_scale", "must be positive");
    const double g_min = real("dgp.g_min");
    if (!(g_min > 0.0 && g_min < 0.5)) config_fail("dgp.g_min", "must lie in (0, 0.5)");
    if (get("family.propensity") == "constant" && !(real("family.propensity_value") > 0.0))
        config_fail("family.propensity_value", "must be positive");
    for (const auto& key : {"sim.grid_min", "sim.grid_max", "grid.min", "grid.max"})
        if (real(key) < 0.0) config_fail(key, "must be non-negative");
    for (double d : reals("oracle.deltas"))
        if (!(d > 0.0)) config_fail("oracle.deltas", "smoothing levels must be positive");
    for (std::size_t n : counts("sim.n"))
        if (n < 8) config_fail("sim.n", "sample sizes must be at least 8");
}

Kernel Settings::kernel() const {
    return make_higher_order(Kernel(parse_kernel_shape(get("family.kernel"))),
                             static_cast<int>(count("family.kernel_order")));
}

Dgp Settings::dgp() const {
    Dgp d = parse_dgp(get("dgp.name"));
    if (auto* b = std::get_if<BinaryTreatmentDgp>(&d)) b->g_min = real("dgp.g_min");
    return d;
}

SmoothedFamily Settings::family() const {
    const FamilyKind kind = parse_family_kind(get("family.name"));
    if (kind == FamilyKind::density_at_point) return SmoothedFamily::density(real("family.x"), kernel());
    const bool constant = get("family.propensity") == "constant";
    const Dgp d = dgp();
    Propensity g;
    if (constant) {
        g = constant_propensity(real("family.propensity_value"));
    } else if (kind == FamilyKind::dose_response) {
        const auto* dose = std::get_if<DoseResponseDgp>(&d);
        if (!dose)
            config_fail("family.propensity", "dose_response with propensity=dgp needs dgp.name smooth or cusp");
        g = beta_dgp_propensity(*dose);
    } else {
        const auto* bin = std::get_if<BinaryTreatmentDgp>(&d);
        if (!bin)
            config_fail("family.propensity", "counterfactual_mean with propensity=dgp needs dgp.name binary");
        g = binary_dgp_propensity(*bin);
    }
    SmoothedFamily f = kind == FamilyKind::dose_response
                           ? SmoothedFamily::dose_response(real("family.a0"), kernel(), std::move(g))
                           : SmoothedFamily::counterfactual_mean(std::move(g));
    NadarayaWatson::Options nw;
    nw.bandwidth_scale = real("nuisance.bandwidth_scale");
    f.with_nuisance_options(nw);
    return f;
}

OracleTarget Settings::target() const {
    OracleTarget t{dgp(), 0.0, kernel()};
    if (std::holds_alternative<NormalDensityDgp>(t.dgp)) t.point = real("family.x");
    if (std::holds_alternative<DoseResponseDgp>(t.dgp)) t.point = real("family.a0");
    return t;
}

EstimateConfig Settings::estimate_config(std::size_t n) const {
    EstimateConfig c;
    c.p1 = real("split.p1");
    c.p2 = real("split.p2");
    if (flag("split.shuffle")) c.shuffle_seed = count("seed");
    c.epsilon = real("epsilon");
    c.alpha = real("alpha");
    c.anchor_mode = parse_anchor_mode(get("anchors.mode"));
    c.anchor_rule = {real("anchors.c1"), real("anchors.c2"), real("anchors.s")};
    c.grid_min = real("grid.min");
    c.grid_max = real("grid.max");
    c.grid_points = count("grid.points");
    if (c.anchor_mode == AnchorMode::fixed) {
        c.anchors.delta1 = real("anchors.delta1");
        c.anchors.delta2 = real("anchors.delta2");
        c.anchors.delta3 = real("anchors.delta3") > 0.0 ? real("anchors.delta3") : c.anchors.delta2;
        c.anchors.gap = real("anchors.gap");
        if (!(c.anchors.gap > 0.0)) {
            const double nd = static_cast<double>(n);
            const double span = std::floor(c.p2 * nd) - std::floor(c.p1 * nd);
            if (!(span > 0.0)) fail(ErrorCode::split_too_small, "S2 is empty");
            c.anchors.gap = std::min(std::pow(span, -0.25), c.anchors.delta2 / 2.0);
        }
    }
    return c;
}

std::vector<SelectorSpec> Settings::selectors() const {
    std::vector<SelectorSpec> out;
    for (auto item : split_list(get("sim.selectors"))) out.push_back(parse_selector(item));
    return out;
}

std::vector<double> Settings::oracle_grid() const {
    const OracleTarget t = target();
    double top = 1.0;
    if (std::holds_alternative<DoseResponseDgp>(t.dgp))
        top = std::min(t.point, 1.0 - t.point) / t.kernel.support_radius();
    else if (std::holds_alternative<NormalDensityDgp>(t.dgp))
        top = 3.0 * std::get<NormalDensityDgp>(t.dgp).sd;
    const double lo = real("sim.grid_min") > 0.0 ? real("sim.grid_min") : top / 30.0;
    const double hi = real("sim.grid_max") > 0.0 ? real("sim.grid_max") : top;
    return log_grid(lo, hi, count("sim.grid_points"));
}

} // namespace smoothsel::capi
