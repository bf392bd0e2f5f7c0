// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace smoothsel::cli {

/// Major.minor of the CSV files the tool writes. Readers accept any minor
/// version of the same major.
inline constexpr int kCsvMajor = 1;
inline constexpr int kCsvMinor = 0;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

/// Flat `key = value` lines with dotted keys; `#` starts a comment. A file
/// written by the tool (first line `# smoothsel-csv M.m`) is read back from
/// its `# key = value` header so a run can be reproduced from its output.
std::vector<Entry> parse_config(std::istream& in, std::string_view source = "config");
std::vector<Entry> load_config(const std::string& path);

/// "key=value" from --set.
Entry parse_assignment(std::string_view text);

/// Keys owned by the command-line tool rather than the library.
bool is_tool_key(std::string_view key);

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

/// Comment header (format version, table name, then every resolved setting)
/// followed by the table in RFC 4180 CSV.
void write_table(std::ostream& out, const Table& table,
                 const std::vector<std::pair<std::string, std::string>>& settings);

std::string csv_field(std::string_view text);

} // namespace smoothsel::cli
