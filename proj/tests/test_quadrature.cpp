#include <doctest.h>

#include <cmath>

#include "prbm/quadrature.hpp"

using namespace prbm;

TEST_CASE("kronrod rule integrates low-degree polynomials exactly") {
    CHECK(integrate([](double) { return 1.0; }, -1.0, 1.0).value ==
          doctest::Approx(2.0).epsilon(1e-15));
    for (int k = 1; k <= 13; ++k) {
        const double exact = 1.0 / (k + 1.0);
        const double got =
            integrate([k](double x) { return std::pow(x, k); }, 0.0, 1.0).value;
        CHECK(got == doctest::Approx(exact).epsilon(1e-14));
    }
}

TEST_CASE("smooth integrands to near machine precision") {
    CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 1.0).value ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI).value ==
          doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("adaptive refinement handles a sharp peak") {
    // N(0, 1e-4) density over [-1, 1]; needs subdivision near 0
    const double s = 1e-2;
    auto f = [s](double x) {
        return std::exp(-0.5 * x * x / (s * s)) / (s * std::sqrt(2.0 * M_PI));
    };
    QuadResult q = integrate(f, -1.0, 1.0, 1e-12, 1e-12);
    CHECK(q.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(q.panels > 4);
}

TEST_CASE("error estimate is honest on the reported result") {
    QuadResult q = integrate([](double x) { return std::cos(5.0 * x); }, 0.0, 3.0);
    CHECK(std::abs(q.value - std::sin(15.0) / 5.0) <= std::max(q.error, 1e-13));
}
