// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "smoothsel/estimator.hpp"
#include "smoothsel/oracle.hpp"
#include "smoothsel/sim.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace smoothsel::capi {

enum class ValueKind { real, count, boolean, choice, real_list, count_list, selector_list };

struct SettingSpec {
    std::string key;
    std::string default_value;
    ValueKind kind;
    std::vector<std::string> choices;  ///< for ValueKind::choice
};

const std::vector<SettingSpec>& setting_specs();

/// Parses "0.2", "1/7" or "-3e-2".
double parse_number(std::string_view text);

/// Resolved run settings. Every key always has a value; set() checks the key
/// exists and the value is well formed, validate() checks combinations.
class Settings {
public:
    Settings();

    void set(std::string_view key, std::string_view value);
    const std::string& get(std::string_view key) const;
    const std::vector<std::string>& keys() const noexcept { return order_; }
    void validate() const;

    double real(std::string_view key) const;
    std::size_t count(std::string_view key) const;
    bool flag(std::string_view key) const;
    std::vector<double> reals(std::string_view key) const;
    std::vector<std::size_t> counts(std::string_view key) const;

    Kernel kernel() const;
    Dgp dgp() const;
    SmoothedFamily family() const;
    OracleTarget target() const;
    /// `n` fixes the split sizes that the fixed-anchor gap default needs.
    EstimateConfig estimate_config(std::size_t n) const;
    std::vector<SelectorSpec> selectors() const;
    /// sim.grid_* resolved against the design's feasible window.
    std::vector<double> oracle_grid() const;

private:
    const SettingSpec& spec(std::string_view key) const;

    std::vector<std::string> order_;
    std::map<std::string, std::string, std::less<>> values_;
};

} // namespace smoothsel::capi
