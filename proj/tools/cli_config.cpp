// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "cli_config.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace smoothsel::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool valid_key(std::string_view key) {
    if (key.empty() || key.front() == '.' || key.back() == '.') return false;
    for (char c : key)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
    return key.find("..") == std::string_view::npos;
}

// `# smoothsel-csv 1.0` -> major version, or -1 when the line is not a version tag.
int csv_major(std::string_view line) {
    constexpr std::string_view tag = "# smoothsel-csv ";
    if (line.substr(0, tag.size()) != tag) return -1;
    const std::string_view ver = trim(line.substr(tag.size()));
    const auto dot = ver.find('.');
    try {
        return std::stoi(std::string(ver.substr(0, dot)));
    } catch (const std::exception&) {
        throw ConfigError("malformed version tag '" + std::string(line) + "'");
    }
}

} // namespace

Entry parse_assignment(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(text) + "'");
    Entry e{std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1))), 0};
    if (!valid_key(e.key)) throw ConfigError("malformed key '" + e.key + "'");
    return e;
}

std::vector<Entry> parse_config(std::istream& in, std::string_view source) {
    std::vector<Entry> out;
    std::set<std::string, std::less<>> seen;
    std::string line;
    int line_no = 0;
    bool from_csv = false;
    auto where = [&] { return std::string(source) + ":" + std::to_string(line_no) + ": "; };
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body = trim(line);
        if (line_no == 1) {
            const int major = csv_major(body);
            if (major >= 0) {
                if (major != kCsvMajor)
                    throw ConfigError(where() + "unsupported CSV major version " + std::to_string(major));
                from_csv = true;
                continue;
            }
        }
        if (from_csv) {
            if (body.empty() || body.front() != '#') break;  // table body starts
            body = trim(body.substr(1));
            if (body.find('=') == std::string_view::npos) continue;
        } else {
            const auto hash = body.find('#');
            if (hash != std::string_view::npos) body = trim(body.substr(0, hash));
            if (body.empty()) continue;
        }
        Entry e;
        try {
            e = parse_assignment(body);
        } catch (const ConfigError& err) {
            throw ConfigError(where() + err.what());
        }
        e.line = line_no;
        if (from_csv && e.key == "table") continue;
        if (!seen.insert(e.key).second) throw ConfigError(where() + "duplicate key '" + e.key + "'");
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<Entry> load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse_config(in, path);
}

bool is_tool_key(std::string_view key) { return key == "command" || key == "input"; }

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_table(std::ostream& out, const Table& table,
                 const std::vector<std::pair<std::string, std::string>>& settings) {
    out << "# smoothsel-csv " << kCsvMajor << '.' << kCsvMinor << '\n';
    out << "# table = " << table.name << '\n';
    for (const auto& [k, v] : settings) out << "# " << k << " = " << v << '\n';
    for (std::size_t j = 0; j < table.columns.size(); ++j) out << (j ? "," : "") << csv_field(table.columns[j]);
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << csv_field(row[j]);
        out << '\n';
    }
}

} // namespace smoothsel::cli
