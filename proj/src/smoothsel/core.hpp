// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace smoothsel {

using Index = std::size_t;
using IndexList = std::vector<Index>;

enum class Schema { scalar, way };

/// One row of a dataset. Scalar datasets populate `o`; (W, A, Y) datasets
/// populate the other three fields.
struct Observation {
    std::span<const double> w;
    double a = 0.0;
    double y = 0.0;
    std::optional<double> o;
};

/// Column-major in-memory dataset. Rows are immutable after construction.
class Dataset {
public:
    static Dataset scalar(std::vector<double> o);
    /// `w` is row-major with `dim_w` covariates per row.
    static Dataset way(std::size_t dim_w, std::vector<double> w, std::vector<double> a,
                       std::vector<double> y);

    Schema schema() const noexcept { return schema_; }
    std::size_t size() const noexcept { return size_; }
    std::size_t dim_w() const noexcept { return dim_w_; }

    double o(Index i) const { return o_[i]; }
    double a(Index i) const { return a_[i]; }
    double y(Index i) const { return y_[i]; }
    std::span<const double> w(Index i) const {
        return {w_.data() + i * dim_w_, dim_w_};
    }
    Observation row(Index i) const;

    std::span<const double> o_column() const noexcept { return o_; }
    std::span<const double> a_column() const noexcept { return a_; }
    std::span<const double> y_column() const noexcept { return y_; }

    /// Subset in the given index order.
    Dataset subset(std::span<const Index> idx) const;

private:
    Schema schema_ = Schema::scalar;
    std::size_t size_ = 0;
    std::size_t dim_w_ = 0;
    std::vector<double> o_;
    std::vector<double> w_;
    std::vector<double> a_;
    std::vector<double> y_;
};

/// CSV ingestion. Scalar files carry a single `o` column; (W, A, Y) files
/// carry `w1..wd,a,y` in any column order.
Dataset parse_csv(std::istream& in);
Dataset read_csv(const std::string& path);
void write_csv(const Dataset& data, std::ostream& out);

/// Three contiguous blocks S1 = [0, l1), S2 = [l1, l2), S3 = [l2, n) of a
/// (possibly permuted) index order.
struct SplitPlan {
    std::size_t n = 0;
    std::size_t l1 = 0;
    std::size_t l2 = 0;
    double p1 = 0.0;
    double p2 = 0.0;
    IndexList s1;
    IndexList s2;
    IndexList s3;

    std::size_t m() const noexcept { return n - l2; }
    IndexList s12() const;
};

SplitPlan three_way_split(std::size_t n, double p1, double p2,
                          std::optional<std::uint64_t> shuffle_seed = std::nullopt);

double empirical_mean(std::span<const double> values);
/// Mean squared deviation from the mean (divisor is the sample size).
double empirical_centered_second_moment(std::span<const double> values);

/// Counter-based seed derivation: any (root, stream, replicate) triple maps
/// to an independent 64-bit seed without touching shared generator state.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t replicate = 0);

} // namespace smoothsel
