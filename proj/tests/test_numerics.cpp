#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "scarma/errors.hpp"
#include "scarma/numerics.hpp"

using namespace scarma;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("adaptive quadrature reproduces closed-form integrals") {
    CHECK(num::integrate([](double x) { return x * x; }, 0.0, 3.0) == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(num::integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0) ==
          doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
    // integrable endpoint singularity
    CHECK(num::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0) ==
          doctest::Approx(2.0).epsilon(1e-10));
    CHECK(num::integrate_upper([](double x) { return std::exp(-2.0 * x); }, 0.0) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("Fourier-weighted tails match analytic transforms") {
    // int_0^inf e^{-x} cos(wx) dx = 1/(1+w^2), sine analogue w/(1+w^2)
    const double w = 1.7;
    const double c = num::integrate_cos([](double x) { return std::exp(-x); }, 0.0, w);
    const double s = num::integrate_sin([](double x) { return std::exp(-x); }, 0.0, w);
    CHECK(c == doctest::Approx(1.0 / (1.0 + w * w)).epsilon(1e-9));
    CHECK(s == doctest::Approx(w / (1.0 + w * w)).epsilon(1e-9));
    CHECK(num::integrate_sin([](double x) { return std::exp(-x); }, 0.0, 0.0) == 0.0);
}

TEST_CASE("Gauss-Legendre integrates smooth functions at fixed order") {
    const double v = num::gauss_legendre([](double x) { return std::cos(x); }, 0.0, 1.0, 32);
    CHECK(v == doctest::Approx(std::sin(1.0)).epsilon(1e-14));
    // order-n rule is exact for polynomials of degree 2n-1
    const double p = num::gauss_legendre([](double x) { return x * x * x * x * x; }, -1.0, 2.0, 8);
    CHECK(p == doctest::Approx((64.0 - 1.0) / 6.0).epsilon(1e-13));
}

TEST_CASE("bisect_root finds bracketed roots and rejects bad brackets") {
    const double r = num::bisect_root([](double x) { return x * x - 2.0; }, 0.0, 2.0);
    CHECK(r == doctest::Approx(std::numbers::sqrt2).epsilon(1e-12));
    CHECK_THROWS_AS(num::bisect_root([](double x) { return x * x + 1.0; }, -1.0, 1.0),
                    EstimationError);
}

TEST_CASE("golden_min locates a unimodal minimum") {
    const double m = num::golden_min([](double x) { return (x - 0.3) * (x - 0.3) + 1.0; },
                                     -4.0, 5.0, 1e-10);
    CHECK(m == doctest::Approx(0.3).epsilon(1e-7));
}

TEST_CASE("nelder_mead descends a smooth bowl") {
    const auto f = [](const std::vector<double>& x) {
        const double a = x[0] - 1.0, b = x[1] + 2.0;
        return 3.0 * a * a + b * b + 0.5 * a * b;
    };
    const auto sol = num::nelder_mead(f, {5.0, 5.0}, {1.0, 1.0}, 1e-10, 2000);
    CHECK(sol.converged);
    // stationary point of the quadratic: 6a + b/2 = 0, 2b + a/2 = 0 -> a = b = 0
    CHECK(std::abs(sol.x[0] - 1.0) < 1e-4);
    CHECK(std::abs(sol.x[1] + 2.0) < 1e-4);
}

TEST_CASE("spline interpolates smooth data and clamps outside the range") {
    std::vector<double> xs, ys;
    for (int i = 0; i <= 40; ++i) {
        const double x = -2.0 + 4.0 * i / 40.0;
        xs.push_back(x);
        ys.push_back(std::sin(x));
    }
    const num::Spline s(xs, ys);
    CHECK(std::abs(s(0.137) - std::sin(0.137)) < 1e-6);
    // natural end conditions lose accuracy near the boundary
    CHECK(std::abs(s(-1.92) - std::sin(-1.92)) < 1e-3);
    CHECK(s(10.0) == ys.back());
    CHECK(s(-10.0) == ys.front());
    CHECK_THROWS(num::Spline({0.0, 0.0, 1.0}, {1.0, 2.0, 3.0}));
}

TEST_CASE("quantile_sorted matches the linear-interpolation convention") {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    CHECK(num::quantile_sorted(xs, 0.0) == 1.0);
    CHECK(num::quantile_sorted(xs, 1.0) == 4.0);
    CHECK(num::quantile_sorted(xs, 0.5) == doctest::Approx(2.5));
    CHECK(num::quantile_sorted(xs, 0.25) == doctest::Approx(1.75));
}
