#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ptdirac/errors.hpp"
#include "ptdirac/quadrature.hpp"

using namespace ptdirac;

TEST_CASE("Gauss-Kronrod is exact on low polynomials")
{
    const auto r = quad::adaptive([](double x) { return 3 * x * x - x + 2; }, -1.0, 2.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(13.5).epsilon(1e-14));
}

TEST_CASE("adaptive handles endpoint singularity")
{
    const auto r = quad::adaptive([](double x) { return x > 0 ? 1.0 / std::sqrt(x) : 0.0; }, 0.0, 1.0, 1e-10, 0.0, 20000);
    CHECK(std::abs(r.value - 2.0) < 1e-8);
}

TEST_CASE("semi-infinite Gaussian")
{
    const auto r = quad::adaptive_to_infinity([](double x) { return std::exp(-x * x); }, 0.0);
    CHECK(std::abs(r.value - 0.5 * std::sqrt(std::numbers::pi)) < 1e-13);
}

TEST_CASE("non-finite integrand throws")
{
    CHECK_THROWS_AS(quad::adaptive([](double) { return std::nan(""); }, 0.0, 1.0), NumericalError);
}

TEST_CASE("Simpson with even and odd interval counts")
{
    for (int n : {2001, 2000}) {
        const double h = 20.0 / (n - 1);
        std::vector<double> f(n);
        for (int i = 0; i < n; ++i) {
            const double x = -10.0 + i * h;
            f[i] = std::exp(-x * x) / std::sqrt(std::numbers::pi);
        }
        CHECK(std::abs(quad::simpson(f, h) - 1.0) < 1e-10);
    }
    std::vector<double> cubic(7);
    for (int i = 0; i < 7; ++i)
        cubic[i] = std::pow(0.5 * i, 3);
    CHECK(quad::simpson(cubic, 0.5) == doctest::Approx(std::pow(3.0, 4) / 4).epsilon(1e-14));
}
