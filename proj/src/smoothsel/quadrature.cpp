// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothsel/quadrature.hpp"

#include "smoothsel/error.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <string>

namespace smoothsel {

namespace {

template <unsigned N>
QuadratureRule legendre_rule(double lo, double hi) {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    QuadratureRule rule;
    rule.nodes.reserve(N);
    rule.weights.reserve(N);
    // Boost stores the non-negative half of an even rule.
    for (std::size_t i = x.size(); i-- > 0;) {
        rule.nodes.push_back(mid - half * x[i]);
        rule.weights.push_back(half * w[i]);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        rule.nodes.push_back(mid + half * x[i]);
        rule.weights.push_back(half * w[i]);
    }
    return rule;
}

} // namespace

QuadratureRule gauss_legendre(double lo, double hi, std::size_t points) {
    switch (points) {
    case 16: return legendre_rule<16>(lo, hi);
    case 32: return legendre_rule<32>(lo, hi);
    case 64: return legendre_rule<64>(lo, hi);
    default:
        fail(ErrorCode::invalid_argument,
             "unsupported Gauss-Legendre size " + std::to_string(points));
    }
}

QuadratureRule gauss_hermite(std::size_t points) {
    if (points < 1 || points > 200)
        fail(ErrorCode::invalid_argument, "unsupported Gauss-Hermite size");
    // Jacobi matrix of the probabilists' Hermite polynomials.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(points),
                                                   static_cast<Eigen::Index>(points));
    for (std::size_t k = 1; k < points; ++k) {
        const double b = std::sqrt(static_cast<double>(k));
        jacobi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = b;
        jacobi(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    QuadratureRule rule;
    rule.nodes.resize(points);
    rule.weights.resize(points);
    double total = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        rule.nodes[i] = solver.eigenvalues()(ii);
        const double v0 = solver.eigenvectors()(0, ii);
        rule.weights[i] = v0 * v0;
        total += rule.weights[i];
    }
    for (double& w : rule.weights) w /= total;
    return rule;
}

} // namespace smoothsel
