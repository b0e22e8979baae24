#include <cmath>
#include <vector>

#include "doctest.h"
#include "mfgfb/numerics.hpp"

using namespace mfgfb::num;

TEST_CASE("fit_line recovers exact lines") {
    std::vector<double> x{1, 2, 3, 4, 5}, y;
    for (double v : x) y.push_back(2.5 * v - 1.0);
    auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pchip interpolates monotone data monotonically") {
    std::vector<double> x, y;
    for (int i = 0; i <= 20; ++i) {
        x.push_back(i * 0.1);
        y.push_back(std::tanh(x.back()));  // strictly increasing
    }
    Pchip p(x, y);
    double prev = p(0.0);
    for (double z = 0.005; z <= 2.0; z += 0.005) {
        const double v = p(z);
        CHECK(v >= prev - 1e-14);
        prev = v;
        CHECK(v == doctest::Approx(std::tanh(z)).epsilon(5e-4));
    }
    CHECK(p.derivative(1.0) ==
          doctest::Approx(1.0 / std::cosh(1.0) / std::cosh(1.0)).epsilon(1e-3));
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
    auto q = gauss_legendre(6);
    double s = 0;
    for (std::size_t k = 0; k < q.nodes.size(); ++k)
        s += q.weights[k] * std::pow(q.nodes[k], 10);
    CHECK(s == doctest::Approx(2.0 / 11.0).epsilon(1e-13));
}

TEST_CASE("gauss_jacobi01 reproduces moments of lambda^beta") {
    // For weight lambda^{b0-1}: integral of lambda^k d(weight) = 1/(b0+k).
    for (double b0 : {1.5, 2.5, 3.0}) {
        auto q = gauss_jacobi01(16, b0 - 1.0);
        for (int k = 0; k <= 8; ++k) {
            double s = 0;
            for (std::size_t j = 0; j < q.nodes.size(); ++j)
                s += q.weights[j] * std::pow(q.nodes[j], k);
            CHECK(s == doctest::Approx(1.0 / (b0 + k)).epsilon(1e-12));
        }
    }
}

TEST_CASE("composite integration of smooth function") {
    const double v = integrate([](double x) { return std::exp(-x * x); }, 0.0,
                               2.0, 8, 8);
    CHECK(v == doctest::Approx(0.8820813907624215).epsilon(1e-12));
}

TEST_CASE("banded solve matches a dense tridiagonal system") {
    const int n = 50;
    BandedMatrix A(n, 1, 1);
    std::vector<double> x_true(n), rhs(n, 0.0);
    for (int i = 0; i < n; ++i) x_true[i] = std::sin(0.3 * i);
    for (int i = 0; i < n; ++i) {
        A.add(i, i, 2.0 + 0.01 * i);
        if (i > 0) A.add(i, i - 1, -1.0);
        if (i + 1 < n) A.add(i, i + 1, -1.0);
    }
    for (int i = 0; i < n; ++i) {
        rhs[i] = (2.0 + 0.01 * i) * x_true[i];
        if (i > 0) rhs[i] -= x_true[i - 1];
        if (i + 1 < n) rhs[i] -= x_true[i + 1];
    }
    auto x = A.solve(rhs);
    for (int i = 0; i < n; ++i)
        CHECK(x[i] == doctest::Approx(x_true[i]).epsilon(1e-10));
}
