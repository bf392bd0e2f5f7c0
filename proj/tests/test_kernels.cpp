// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "smoothsel/kernels.hpp"
#include "smoothsel/quadrature.hpp"

#include "support.hpp"

#include <cmath>

using namespace smoothsel;

TEST_CASE("scaled kernel evaluation") {
    const Kernel epa;
    CHECK(scaled_kernel_eval(epa, 0.5, 0.0, 0.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(scaled_kernel_eval(epa, 0.5, 0.0, 0.6) == 0.0);
    const Kernel gauss(KernelShape::gaussian);
    CHECK(scaled_kernel_eval(gauss, 1.0, 0.0, 0.0) == doctest::Approx(0.398942).epsilon(1e-6));
    CHECK_FAILS_WITH(scaled_kernel_eval(epa, 0.0, 0.0, 0.0), ErrorCode::non_positive_bandwidth);
    CHECK_FAILS_WITH(scaled_kernel_eval(epa, -1.0, 0.0, 0.0), ErrorCode::non_positive_bandwidth);
}

TEST_CASE("integral of K squared") {
    CHECK(kernel_l2sq(Kernel()) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(kernel_l2sq(Kernel(KernelShape::gaussian)) == doctest::Approx(0.282095).epsilon(1e-6));
    CHECK(kernel_l2sq(Kernel(KernelShape::uniform)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("higher-order kernels") {
    const Kernel epa;
    CHECK(make_higher_order(epa, 2) == epa);

    const Kernel g4 = make_higher_order(Kernel(KernelShape::gaussian), 4);
    CHECK(g4.order() == 4);
    CHECK(std::abs(g4.moment(2)) < 1e-8);
    CHECK(g4.moment(0) == doctest::Approx(1.0).epsilon(1e-10));

    const Kernel e4 = make_higher_order(epa, 4);
    CHECK(std::abs(e4.moment(2)) < 1e-8);
    CHECK(e4.moment(4) != 0.0);

    CHECK_FAILS_WITH(make_higher_order(epa, 6), ErrorCode::unsupported_order);
    CHECK_FAILS_WITH(make_higher_order(epa, 3), ErrorCode::unsupported_order);
}

TEST_CASE("kernel names") {
    CHECK(parse_kernel_shape("gaussian") == KernelShape::gaussian);
    CHECK(kernel_shape_name(KernelShape::uniform) == "uniform");
    CHECK_FAILS_WITH(parse_kernel_shape("triweight"), ErrorCode::invalid_argument);
}

TEST_CASE("quadrature rules") {
    // Gauss-Legendre integrates polynomials of degree 2n-1 exactly.
    const double p = integrate([](double x) { return 5 * std::pow(x, 4) - 3 * x * x + 1; }, -1.0, 2.0, 16);
    CHECK(p == doctest::Approx(33.0 - 9.0 + 3.0).epsilon(1e-13));

    // Probabilists' Hermite: E Z^2 = 1, E Z^4 = 3, E Z^6 = 15.
    const QuadratureRule h = gauss_hermite(20);
    double m0 = 0, m2 = 0, m4 = 0, m6 = 0;
    for (std::size_t i = 0; i < h.nodes.size(); ++i) {
        const double z = h.nodes[i], w = h.weights[i];
        m0 += w;
        m2 += w * z * z;
        m4 += w * std::pow(z, 4);
        m6 += w * std::pow(z, 6);
    }
    CHECK(m0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m4 == doctest::Approx(3.0).epsilon(1e-11));
    CHECK(m6 == doctest::Approx(15.0).epsilon(1e-10));
}
