// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "capi/settings.hpp"
#include "smoothsel/core.hpp"

#include <string>
#include <vector>

namespace smoothsel::capi {

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

struct Result {
    std::vector<Table> tables;
};

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);
std::string format_number(std::size_t value);

Result run_estimate(const Settings& settings, const Dataset& data);
Result run_select(const Settings& settings, const Dataset& data);
Result run_simulate(const Settings& settings);
Result run_oracle(const Settings& settings);

} // namespace smoothsel::capi
