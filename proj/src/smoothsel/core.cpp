// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothsel/core.hpp"

#include "smoothsel/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace smoothsel {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::ok: return "Ok";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::split_too_small: return "SplitTooSmall";
    case ErrorCode::invalid_proportions: return "InvalidProportions";
    case ErrorCode::empty_sample: return "EmptySample";
    case ErrorCode::non_positive_bandwidth: return "NonPositiveBandwidth";
    case ErrorCode::quadrature_failure: return "QuadratureFailure";
    case ErrorCode::unsupported_order: return "UnsupportedOrder";
    case ErrorCode::schema_mismatch: return "SchemaMismatch";
    case ErrorCode::zero_variance: return "ZeroVariance";
    case ErrorCode::infeasible_anchors: return "InfeasibleAnchors";
    case ErrorCode::no_linear_region: return "NoLinearRegion";
    case ErrorCode::log_of_zero: return "LogOfZero";
    case ErrorCode::degenerate_rate_denominator: return "DegenerateRateDenominator";
    case ErrorCode::invalid_alpha: return "InvalidAlpha";
    case ErrorCode::non_binary_outcome: return "NonBinaryOutcome";
    case ErrorCode::precondition: return "PreconditionViolated";
    case ErrorCode::config_error: return "ConfigError";
    case ErrorCode::data_error: return "DataError";
    case ErrorCode::nonpositive_exponent: return "NonPositiveSeExponent";
    case ErrorCode::internal: return "Internal";
    }
    return "Unknown";
}

Dataset Dataset::scalar(std::vector<double> o) {
    if (o.empty()) fail(ErrorCode::empty_sample, "dataset has no rows");
    Dataset d;
    d.schema_ = Schema::scalar;
    d.size_ = o.size();
    d.o_ = std::move(o);
    return d;
}

Dataset Dataset::way(std::size_t dim_w, std::vector<double> w, std::vector<double> a,
                     std::vector<double> y) {
    if (a.empty()) fail(ErrorCode::empty_sample, "dataset has no rows");
    if (y.size() != a.size() || w.size() != dim_w * a.size())
        fail(ErrorCode::data_error, "inconsistent column lengths");
    Dataset d;
    d.schema_ = Schema::way;
    d.size_ = a.size();
    d.dim_w_ = dim_w;
    d.w_ = std::move(w);
    d.a_ = std::move(a);
    d.y_ = std::move(y);
    return d;
}

Observation Dataset::row(Index i) const {
    Observation obs;
    if (schema_ == Schema::scalar) {
        obs.o = o_[i];
    } else {
        obs.w = w(i);
        obs.a = a_[i];
        obs.y = y_[i];
    }
    return obs;
}

Dataset Dataset::subset(std::span<const Index> idx) const {
    if (schema_ == Schema::scalar) {
        std::vector<double> o;
        o.reserve(idx.size());
        for (Index i : idx) o.push_back(o_[i]);
        return scalar(std::move(o));
    }
    std::vector<double> w, a, y;
    w.reserve(idx.size() * dim_w_);
    for (Index i : idx) {
        auto wi = this->w(i);
        w.insert(w.end(), wi.begin(), wi.end());
        a.push_back(a_[i]);
        y.push_back(y_[i]);
    }
    return way(dim_w_, std::move(w), std::move(a), std::move(y));
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        auto b = field.find_first_not_of(" \t\r");
        auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_real(const std::string& s, std::size_t line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        fail(ErrorCode::data_error,
             "line " + std::to_string(line_no) + ": not a finite real: '" + s + "'");
    return v;
}

} // namespace

Dataset parse_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        header = split_fields(line);
        break;
    }
    if (header.empty()) fail(ErrorCode::data_error, "missing CSV header");

    std::map<std::string, std::size_t> col;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (!col.emplace(header[j], j).second)
            fail(ErrorCode::data_error, "duplicate column '" + header[j] + "'");
    }

    const bool is_scalar = col.count("o") == 1;
    std::size_t dim_w = 0;
    if (is_scalar) {
        if (header.size() != 1) fail(ErrorCode::data_error, "scalar schema takes only column 'o'");
    } else {
        if (!col.count("a") || !col.count("y"))
            fail(ErrorCode::data_error, "expected column 'o' or columns 'w1..wd,a,y'");
        while (col.count("w" + std::to_string(dim_w + 1))) ++dim_w;
        if (header.size() != dim_w + 2)
            fail(ErrorCode::data_error, "unexpected columns for schema w1..wd,a,y");
    }

    std::vector<double> o, w, a, y;
    std::vector<std::size_t> wcol(dim_w);
    for (std::size_t k = 0; k < dim_w; ++k) wcol[k] = col.at("w" + std::to_string(k + 1));
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        auto fields = split_fields(line);
        if (fields.size() != header.size())
            fail(ErrorCode::data_error, "line " + std::to_string(line_no) + ": expected " +
                                            std::to_string(header.size()) + " fields");
        if (is_scalar) {
            o.push_back(parse_real(fields[0], line_no));
        } else {
            for (std::size_t k = 0; k < dim_w; ++k) w.push_back(parse_real(fields[wcol[k]], line_no));
            a.push_back(parse_real(fields[col.at("a")], line_no));
            y.push_back(parse_real(fields[col.at("y")], line_no));
        }
    }
    if (is_scalar) {
        if (o.empty()) fail(ErrorCode::data_error, "CSV has no data rows");
        return Dataset::scalar(std::move(o));
    }
    if (a.empty()) fail(ErrorCode::data_error, "CSV has no data rows");
    return Dataset::way(dim_w, std::move(w), std::move(a), std::move(y));
}

Dataset read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::data_error, "cannot open '" + path + "'");
    return parse_csv(in);
}

void write_csv(const Dataset& data, std::ostream& out) {
    auto old_precision = out.precision(17);
    if (data.schema() == Schema::scalar) {
        out << "o\n";
        for (double v : data.o_column()) out << v << '\n';
    } else {
        for (std::size_t k = 0; k < data.dim_w(); ++k) out << 'w' << (k + 1) << ',';
        out << "a,y\n";
        for (Index i = 0; i < data.size(); ++i) {
            for (double v : data.w(i)) out << v << ',';
            out << data.a(i) << ',' << data.y(i) << '\n';
        }
    }
    out.precision(old_precision);
}

IndexList SplitPlan::s12() const {
    IndexList out = s1;
    out.insert(out.end(), s2.begin(), s2.end());
    return out;
}

SplitPlan three_way_split(std::size_t n, double p1, double p2,
                          std::optional<std::uint64_t> shuffle_seed) {
    if (!(p1 > 0.0 && p1 < p2 && p2 < 1.0))
        fail(ErrorCode::invalid_proportions, "split proportions must satisfy 0 < p1 < p2 < 1");
    const auto l1 = static_cast<std::size_t>(std::floor(p1 * static_cast<double>(n)));
    const auto l2 = static_cast<std::size_t>(std::floor(p2 * static_cast<double>(n)));
    if (n < 6 || l1 < 1 || l2 < l1 + 2 || n < l2 + 2)
        fail(ErrorCode::split_too_small,
             "n = " + std::to_string(n) + " gives subsample sizes (" + std::to_string(l1) + ", " +
                 std::to_string(l2 >= l1 ? l2 - l1 : 0) + ", " +
                 std::to_string(n >= l2 ? n - l2 : 0) + "); need at least (1, 2, 2) and n >= 6");

    IndexList order(n);
    std::iota(order.begin(), order.end(), Index{0});
    if (shuffle_seed) {
        std::mt19937_64 gen(*shuffle_seed);
        std::shuffle(order.begin(), order.end(), gen);
    }
    SplitPlan plan;
    plan.n = n;
    plan.l1 = l1;
    plan.l2 = l2;
    plan.p1 = p1;
    plan.p2 = p2;
    plan.s1.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(l1));
    plan.s2.assign(order.begin() + static_cast<std::ptrdiff_t>(l1),
                   order.begin() + static_cast<std::ptrdiff_t>(l2));
    plan.s3.assign(order.begin() + static_cast<std::ptrdiff_t>(l2), order.end());
    return plan;
}

double empirical_mean(std::span<const double> values) {
    if (values.empty()) fail(ErrorCode::empty_sample, "empirical mean of an empty sample");
    long double s = 0.0L;
    for (double v : values) s += v;
    return static_cast<double>(s / static_cast<long double>(values.size()));
}

double empirical_centered_second_moment(std::span<const double> values) {
    if (values.size() < 2) fail(ErrorCode::empty_sample, "second moment needs at least two values");
    const double mean = empirical_mean(values);
    long double s = 0.0L;
    for (double v : values) {
        const long double d = static_cast<long double>(v) - mean;
        s += d * d;
    }
    return static_cast<double>(s / static_cast<long double>(values.size()));
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}
} // namespace

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t replicate) {
    return splitmix64(splitmix64(splitmix64(root) ^ stream) ^ (replicate * 0xD1B54A32D192ED03ULL));
}

} // namespace smoothsel
