// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "cli_config.hpp"

#include "smoothsel/smoothsel.h"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace {

using smoothsel::cli::ConfigError;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

int exit_code_for(int status) {
    switch (status) {
    case SMOOTHSEL_E_CONFIG:
    case SMOOTHSEL_E_INVALID_ARGUMENT:
    case SMOOTHSEL_E_INVALID_PROPORTIONS:
    case SMOOTHSEL_E_INVALID_ALPHA:
        return kExitConfig;
    case SMOOTHSEL_E_DATA:
    case SMOOTHSEL_E_SCHEMA_MISMATCH:
    case SMOOTHSEL_E_EMPTY_SAMPLE:
    case SMOOTHSEL_E_NON_BINARY_OUTCOME:
        return kExitData;
    case SMOOTHSEL_E_INTERNAL:
        return 1;
    default:
        return kExitNumerical;
    }
}

struct Failure {
    int status;
    std::string message;
};

void check(int status, const std::string& stage) {
    if (status != SMOOTHSEL_OK) throw Failure{status, stage + ": " + smoothsel_last_error()};
}

struct Options {
    std::string config;
    std::string input;
    std::string output;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string family;
    std::optional<std::string> x;
    std::optional<std::string> a0;
    std::optional<std::string> epsilon;
    std::optional<std::string> alpha;
    std::vector<std::string> assignments;
};

void add_common_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "Settings file, or a CSV written by an earlier run");
    cmd->add_option("--input", o.input, "Input CSV (column o, or columns w1..wd,a,y)");
    cmd->add_option("--output", o.output, "Output CSV; extra tables go next to it");
    cmd->add_option("--seed", o.seed, "Root seed");
    cmd->add_option("--workers", o.workers, "Worker threads for simulate and oracle");
    cmd->add_option("--family", o.family, "density | counterfactual_mean | dose_response");
    cmd->add_option("--x", o.x, "Evaluation point of the density");
    cmd->add_option("--a0", o.a0, "Treatment level of the dose-response curve");
    cmd->add_option("--epsilon", o.epsilon, "Undersmoothing offset");
    cmd->add_option("--alpha", o.alpha, "Interval level is 1 - alpha");
    cmd->add_option("--set", o.assignments, "Any setting as key=value (repeatable)");
}

using ConfigPtr = std::unique_ptr<smoothsel_config, decltype(&smoothsel_config_free)>;
using ResultPtr = std::unique_ptr<smoothsel_result, decltype(&smoothsel_result_free)>;
using DatasetPtr = std::unique_ptr<smoothsel_dataset, decltype(&smoothsel_dataset_free)>;

void set_key(smoothsel_config* cfg, const std::string& key, const std::string& value) {
    if (smoothsel_config_set(cfg, key.c_str(), value.c_str()) != SMOOTHSEL_OK)
        throw Failure{SMOOTHSEL_E_CONFIG, smoothsel_last_error()};
}

smoothsel::cli::Table table_of(const smoothsel_result* r, std::size_t t) {
    smoothsel::cli::Table out{smoothsel_result_table_name(r, t), {}, {}};
    const std::size_t cols = smoothsel_result_column_count(r, t);
    for (std::size_t j = 0; j < cols; ++j) out.columns.emplace_back(smoothsel_result_column_name(r, t, j));
    for (std::size_t i = 0; i < smoothsel_result_row_count(r, t); ++i) {
        std::vector<std::string> row;
        for (std::size_t j = 0; j < cols; ++j) row.emplace_back(smoothsel_result_cell(r, t, i, j));
        out.rows.push_back(std::move(row));
    }
    return out;
}

int run(const std::string& command, const Options& o) {
    ConfigPtr cfg(nullptr, smoothsel_config_free);
    {
        smoothsel_config* raw = nullptr;
        check(smoothsel_config_new(&raw), "config");
        cfg.reset(raw);
    }

    std::string input;
    if (!o.config.empty()) {
        for (const auto& e : smoothsel::cli::load_config(o.config)) {
            if (e.key == "command") {
                if (e.value != command)
                    throw ConfigError(o.config + ":" + std::to_string(e.line) + ": file is for command '" +
                                      e.value + "', not '" + command + "'");
            } else if (e.key == "input") {
                input = e.value;
            } else {
                try {
                    set_key(cfg.get(), e.key, e.value);
                } catch (const Failure& f) {
                    throw ConfigError(o.config + ":" + std::to_string(e.line) + ": " + f.message);
                }
            }
        }
    }
    if (!o.input.empty()) input = o.input;
    if (o.seed) set_key(cfg.get(), "seed", std::to_string(*o.seed));
    if (o.workers) set_key(cfg.get(), "workers", std::to_string(*o.workers));
    if (!o.family.empty()) set_key(cfg.get(), "family.name", o.family);
    if (o.x) set_key(cfg.get(), "family.x", *o.x);
    if (o.a0) set_key(cfg.get(), "family.a0", *o.a0);
    if (o.epsilon) set_key(cfg.get(), "epsilon", *o.epsilon);
    if (o.alpha) set_key(cfg.get(), "alpha", *o.alpha);
    for (const auto& a : o.assignments) {
        const auto e = smoothsel::cli::parse_assignment(a);
        if (smoothsel::cli::is_tool_key(e.key)) throw ConfigError("--set cannot change '" + e.key + "'");
        set_key(cfg.get(), e.key, e.value);
    }
    if (smoothsel_config_validate(cfg.get()) != SMOOTHSEL_OK) throw Failure{SMOOTHSEL_E_CONFIG, smoothsel_last_error()};

    const bool needs_data = command == "estimate" || command == "select";
    if (needs_data && input.empty()) throw ConfigError(command + " needs --input");

    std::vector<std::pair<std::string, std::string>> header{{"command", command}};
    if (needs_data) header.emplace_back("input", input);
    for (std::size_t i = 0; i < smoothsel_config_key_count(cfg.get()); ++i) {
        const char* key = smoothsel_config_key(cfg.get(), i);
        const char* value = nullptr;
        check(smoothsel_config_get(cfg.get(), key, &value), "config");
        header.emplace_back(key, value);
    }

    ResultPtr result(nullptr, smoothsel_result_free);
    smoothsel_result* raw = nullptr;
    if (needs_data) {
        DatasetPtr data(nullptr, smoothsel_dataset_free);
        smoothsel_dataset* d = nullptr;
        check(smoothsel_dataset_read_csv(input.c_str(), &d), "read input");
        data.reset(d);
        if (command == "estimate")
            check(smoothsel_estimate(cfg.get(), data.get(), &raw), "estimate");
        else
            check(smoothsel_select(cfg.get(), data.get(), &raw), "select");
    } else if (command == "simulate") {
        check(smoothsel_simulate(cfg.get(), &raw), "simulate");
    } else {
        check(smoothsel_oracle(cfg.get(), &raw), "oracle");
    }
    result.reset(raw);

    const std::size_t tables = smoothsel_result_table_count(result.get());
    if (o.output.empty()) {
        smoothsel::cli::write_table(std::cout, table_of(result.get(), 0), header);
        return 0;
    }
    const std::filesystem::path out_path(o.output);
    for (std::size_t t = 0; t < tables; ++t) {
        const auto table = table_of(result.get(), t);
        std::filesystem::path p = out_path;
        if (t > 0) p.replace_filename(out_path.stem().string() + "." + table.name + ".csv");
        std::ofstream out(p);
        if (!out) throw Failure{SMOOTHSEL_E_DATA, "cannot write '" + p.string() + "'"};
        smoothsel::cli::write_table(out, table, header);
        if (!out) throw Failure{SMOOTHSEL_E_DATA, "write to '" + p.string() + "' failed"};
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-adaptive smoothing-level selection for non-regular parameters"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(smoothsel_version()));
    Options opts;
    std::string command;
    for (const char* name : {"estimate", "select", "simulate", "oracle"}) {
        const char* help = std::string_view(name) == "estimate"   ? "Adaptive estimate and confidence intervals"
                           : std::string_view(name) == "select"   ? "Anchors, rate estimates and the log-log grid"
                           : std::string_view(name) == "simulate" ? "Monte Carlo benchmark of smoothing selectors"
                                                                  : "Ground truth for a simulation design";
        auto* sub = app.add_subcommand(name, help);
        add_common_options(sub, opts);
        sub->callback([&command, name] { command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    try {
        return run(command, opts);
    } catch (const ConfigError& e) {
        std::cerr << "smoothsel: config: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Failure& f) {
        std::cerr << "smoothsel: " << f.message << '\n';
        return exit_code_for(f.status);
    } catch (const std::exception& e) {
        std::cerr << "smoothsel: " << e.what() << '\n';
        return 1;
    }
}
