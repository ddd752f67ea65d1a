#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "foldhinge/quadrature.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
namespace q = foldhinge::quadrature;

TEST_CASE("polynomial exactness", "[quadrature]") {
    // Both rules are exact through degree 13, so the error estimate vanishes.
    const auto low = q::integrate([](double x) { return std::pow(x, 13); }, 0.0, 1.0);
    CHECK_THAT(low.value, WithinRel(1.0 / 14.0, 1e-14));
    CHECK(low.intervals == 1);
    // Kronrod alone is exact through degree 22.
    const auto high = q::integrate([](double x) { return std::pow(x, 22); }, 0.0, 1.0);
    CHECK_THAT(high.value, WithinRel(1.0 / 23.0, 1e-14));
}

TEST_CASE("smooth transcendental integrands", "[quadrature]") {
    CHECK_THAT(q::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value,
               WithinRel(2.0, 1e-12));
    CHECK_THAT(q::integrate([](double x) { return std::exp(-x * x); }, -5.0, 5.0).value,
               WithinRel(std::sqrt(std::numbers::pi) * std::erf(5.0), 1e-12));
}

TEST_CASE("endpoint singularity in the derivative forces subdivision", "[quadrature]") {
    const auto r = q::integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0);
    CHECK_THAT(r.value, WithinRel(2.0 / 3.0, 1e-8));
    CHECK(r.intervals > 1);
}

TEST_CASE("empty and reversed ranges", "[quadrature]") {
    CHECK(q::integrate([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
    CHECK_THAT(q::integrate([](double x) { return x; }, 1.0, 0.0).value, WithinAbs(-0.5, 1e-15));
}

TEST_CASE("non-convergence is reported", "[quadrature]") {
    q::Tolerance tight{0.0, 0.0, 8};
    CHECK_THROWS_AS(q::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, tight),
                    foldhinge::Error);
}
