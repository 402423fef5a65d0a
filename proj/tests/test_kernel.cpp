#include <doctest.h>

#include <cmath>
#include <vector>

#include "prbm/kernel.hpp"
#include "prbm/rng.hpp"
#include "prbm/special.hpp"
#include "prbm/verify.hpp"

using namespace prbm;

TEST_CASE("gauss kernel") {
    CHECK(gauss_kernel(1, 0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
    CHECK(gauss_kernel(4, 0) == doctest::Approx(0.19947114020071635).epsilon(1e-14));
    CHECK(gauss_kernel(1, 1) == doctest::Approx(0.24197072451914337).epsilon(1e-14));
    CHECK(gauss_kernel(0.7, 1.3) == gauss_kernel(0.7, -1.3));
    CHECK_THROWS_AS(gauss_kernel(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_kernel(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("barrier integral closed form") {
    // frozen by the adaptive quadrature oracle
    CHECK(barrier_integral(0, 1, 1) ==
          doctest::Approx(0.33620400244634121).epsilon(1e-12));
    // exponential concentrates at l = 0 as gamma -> inf
    CHECK(barrier_integral(0, 1e8, 1) ==
          doctest::Approx(gauss_kernel(1, 0)).epsilon(1e-6));
    // integrand bound, value in (0, G_t(a)]: at (5, 1, 0.01) the value is
    // ~e^-1250, below double range, so the bound is asserted in log domain
    const double lb = barrier_integral_log(5, 1, 0.01);
    const double lg = -5.0 * 5.0 / 0.02 - 0.5 * std::log(2.0 * M_PI * 0.01);
    CHECK(std::isfinite(lb));
    CHECK(lb <= lg);
    CHECK(lb > lg - 20.0);  // and not absurdly far below it
    CHECK(barrier_integral_log(4.9, 1, 0.01) > lb);  // monotone in a
    // same bound where the double value is representable
    const double b = barrier_integral(5, 1, 0.1);
    CHECK(b > 0.0);
    CHECK(b <= gauss_kernel(0.1, 5));
    CHECK(barrier_integral_log(5, 1, 0.1) == doctest::Approx(std::log(b)).epsilon(1e-12));
    CHECK_THROWS_AS(barrier_integral(-1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(barrier_integral(1, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(barrier_integral(1, 1, 0), std::invalid_argument);
}

TEST_CASE("barrier integral matches the quadrature oracle, stabilized range") {
    for (double a : {0.0, 0.01, 0.5, 3.0})
        for (double g : {0.01, 0.4, 2.0, 40.0, 100.0})
            for (double t : {0.01, 0.3, 1.0, 10.0}) {
                const double closed = barrier_integral(a, g, t);
                const double quad = barrier_integral_quadrature(a, g, t);
                CHECK(std::abs(closed - quad) / quad < 1e-10);
            }
    // where the naive product exp(2ga + 2g^2 t) erfc(.) overflows
    const double v = barrier_integral(3.0, 100.0, 10.0);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
}

TEST_CASE("transition density") {
    const PrbmParams reflecting(0.0, 1.0);
    CHECK(transition_density(reflecting, 1, SidedReal(1, Side::plus),
                             SidedReal(2, Side::plus)) ==
          doctest::Approx(gauss_kernel(1, 1) + gauss_kernel(1, 3)).epsilon(1e-14));
    CHECK(transition_density(reflecting, 1, SidedReal(1, Side::plus),
                             SidedReal(2, Side::minus)) == 0.0);

    const PrbmParams p(1.0, 1.0);
    CHECK(transition_density(p, 1, origin_plus(), origin_plus()) ==
          doctest::Approx(0.461680558356524).epsilon(1e-12));
    CHECK(transition_density(p, 1, origin_plus(), origin_minus()) ==
          doctest::Approx(0.336204002446341).epsilon(1e-12));

    const PrbmParams bm(infinite_gamma(), 1.0);
    CHECK(transition_density(bm, 1, SidedReal(1, Side::plus), SidedReal(0.5, Side::minus)) ==
          doctest::Approx(gauss_kernel(1, 1.5)).epsilon(1e-14));

    // general sigma evaluates the sigma = 1 kernel at time sigma^2 t
    const PrbmParams s2(0.7, 2.0);
    const PrbmParams s1(0.7, 1.0);
    CHECK(transition_density(s2, 0.6, SidedReal(0.4, Side::plus), SidedReal(1, Side::minus)) ==
          doctest::Approx(transition_density(s1, 2.4, SidedReal(0.4, Side::plus),
                                             SidedReal(1, Side::minus)))
              .epsilon(1e-14));

    DensityQuery q{p, 1.0, origin_plus(), origin_minus()};
    CHECK(transition_density(q) == transition_density(p, 1, origin_plus(), origin_minus()));
    CHECK_THROWS_AS(transition_density(p, 0.0, origin_plus(), origin_plus()),
                    std::invalid_argument);
}

TEST_CASE("transition cdf") {
    const PrbmParams p(1.0, 1.0);
    CHECK(transition_cdf(p, 1, origin_plus(), 40.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(transition_cdf(p, 1, origin_plus(), -40.0) == doctest::Approx(0.0).epsilon(1e-12));
    // reflected motion never leaves its half line
    const PrbmParams reflecting(0.0, 1.0);
    CHECK(transition_cdf(reflecting, 1, SidedReal(1, Side::plus), 0.0) == 0.0);
    // frozen by the quadrature oracle
    CHECK(transition_cdf(p, 1, origin_plus(), 0.0) ==
          doctest::Approx(0.331897998776829).epsilon(1e-12));
    CHECK(opposite_side_mass(p, 1, origin_plus()) ==
          doctest::Approx(0.331897998776829).epsilon(1e-12));
}

TEST_CASE("transition cdf equals the density integral") {
    for (double g : {0.0, 0.7, 2.5}) {
        const PrbmParams p(g, 1.0);
        for (const SidedReal& x :
             {origin_plus(), SidedReal(0.8, Side::plus), SidedReal(1.5, Side::minus)})
            for (double y : {-1.7, -0.2, 0.0, 0.4, 2.2}) {
                CHECK(transition_cdf(p, 0.8, x, y) ==
                      doctest::Approx(transition_cdf_quadrature(p, 0.8, x, y))
                          .epsilon(1e-8));
            }
    }
    const PrbmParams bm(infinite_gamma(), 1.0);
    CHECK(transition_cdf(bm, 1.0, SidedReal(0.3, Side::minus), 0.5) ==
          doctest::Approx(norm_cdf(0.8)).epsilon(1e-12));
}

TEST_CASE("transition cdf is monotone and continuous at the origin") {
    const PrbmParams p(1.4, 1.0);
    const SidedReal x(0.6, Side::minus);
    double prev = -1.0;
    for (double y = -4.0; y <= 4.0; y += 0.01) {
        const double f = transition_cdf(p, 0.5, x, y);
        CHECK(f >= prev - 1e-14);
        prev = f;
    }
    const double below = transition_cdf(p, 0.5, x, -1e-12);
    const double at = transition_cdf(p, 0.5, x, 0.0);
    CHECK(std::abs(at - below) < 1e-9);
}

TEST_CASE("sample_transition") {
    // reflecting: a plus start stays on the plus side
    const PrbmParams reflecting(0.0, 1.0);
    RngStream rng{31, 0};
    for (std::uint64_t i = 0; i < 200; ++i)
        CHECK(sample_transition(reflecting, 0.7, SidedReal(0.5, Side::plus), rng, i).side ==
              Side::plus);

    // gamma = inf: the projection is standard normal
    const PrbmParams bm(infinite_gamma(), 1.0);
    std::vector<double> zs(20000);
    for (std::size_t i = 0; i < zs.size(); ++i)
        zs[i] = sample_transition(bm, 1.0, origin_plus(), rng, 1000 + i).projection();
    KsReport k = ks_statistic(zs, [](double z) { return norm_cdf(z); },
                              1.9495 / std::sqrt(20000.0));
    CHECK(k.pass);

    // side-crossing mass at gamma = 1 matches the kernel within 3 MC SE
    const PrbmParams p(1.0, 1.0);
    const std::size_t n = 100000;
    std::size_t minus_count = 0;
    for (std::size_t i = 0; i < n; ++i)
        minus_count +=
            sample_transition(p, 1.0, origin_plus(), rng, 500000 + i).side == Side::minus;
    const double freq = double(minus_count) / double(n);
    const double mass = opposite_side_mass(p, 1.0, origin_plus());
    const double se = std::sqrt(mass * (1.0 - mass) / double(n));
    CHECK(std::abs(freq - mass) < 3.0 * se);
    CHECK_THROWS_AS(sample_transition(p, 0.0, origin_plus(), rng, 0),
                    std::invalid_argument);
}

TEST_CASE("hitting probability") {
    CHECK(hitting_prob(1, 2, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(hitting_prob(1.9999999, 2, 1) < 1e-6);
    CHECK(hitting_prob(1, 2, infinite_gamma()) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(hitting_prob(1, 2, 1e12) == doctest::Approx(0.5).epsilon(1e-11));
    CHECK_THROWS_AS(hitting_prob(2, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(hitting_prob(0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(hitting_prob(1, 2, 0), std::invalid_argument);
}

namespace {

GridFunction sample_grid(double dx, std::size_t n, double (*f)(double)) {
    GridFunction g;
    g.dx = dx;
    g.plus.resize(n);
    g.minus.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        g.plus[k] = f(double(k) * dx);
        g.minus[k] = f(-double(k) * dx);
    }
    return g;
}

}  // namespace

TEST_CASE("resolvent: zero input, symmetry") {
    GridFunction zero = sample_grid(0.01, 1001, [](double) { return 0.0; });
    ResolventResult r = resolvent_solve(1.0, zero, 1.0);
    for (double v : r.g.plus) CHECK(v == 0.0);
    for (double v : r.g.minus) CHECK(v == 0.0);

    GridFunction even = sample_grid(0.01, 1001, [](double x) { return std::exp(-x * x); });
    ResolventResult re = resolvent_solve(0.7, even, 1.3);
    CHECK(re.coeff_plus == doctest::Approx(re.coeff_minus).epsilon(1e-13));
    for (std::size_t k = 0; k < re.g.plus.size(); k += 37)
        CHECK(re.g.plus[k] == doctest::Approx(re.g.minus[k]).epsilon(1e-12));
}

TEST_CASE("resolvent: residual and transmission condition") {
    const double dx = 0.005;
    const std::size_t n = 2401;  // out to |x| = 12
    GridFunction f = sample_grid(dx, n, [](double x) { return std::exp(-x * x); });
    // sigma^2 = 2 normalization: lambda g - g'' = f
    const double sigma = std::sqrt(2.0);
    ResolventResult r = resolvent_solve(1.0, f, 1.0, sigma);

    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < n && double(k) * dx < 6.0; ++k) {
        const double d2p = (r.g.plus[k - 1] - 2 * r.g.plus[k] + r.g.plus[k + 1]) / (dx * dx);
        worst = std::max(worst, std::abs(r.g.plus[k] - d2p - f.plus[k]));
        const double d2m =
            (r.g.minus[k - 1] - 2 * r.g.minus[k] + r.g.minus[k + 1]) / (dx * dx);
        worst = std::max(worst, std::abs(r.g.minus[k] - d2m - f.minus[k]));
    }
    CHECK(worst < 5.0 * dx * dx);

    // output lies in the generator domain: transmission residual < 1e-8
    CHECK(std::abs(r.d0_plus - r.d0_minus) < 1e-8);
    CHECK(std::abs(r.d0_plus - 1.0 * (r.g0_plus - r.g0_minus)) < 1e-8);
    // origin values/derivatives are consistent with the returned grid
    CHECK(r.g.plus[0] == doctest::Approx(r.g0_plus).epsilon(1e-13));
    CHECK(r.g.minus[0] == doctest::Approx(r.g0_minus).epsilon(1e-13));

    CHECK_THROWS_AS(resolvent_solve(0.0, f, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(resolvent_solve(1.0, f, 0.0), std::invalid_argument);
}

TEST_CASE("test functions satisfy the transmission condition by construction") {
    for (double gamma : {0.3, 1.0, 4.0}) {
        for (const TestFunction& f : test_function_family(gamma)) {
            const double lhs = f.deriv1(origin_plus());
            const double rhs = f.deriv1(origin_minus());
            const double jump =
                gamma * (f.value(origin_plus()) - f.value(origin_minus()));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-15));
            CHECK(lhs == doctest::Approx(jump).epsilon(1e-13));
        }
    }
}

TEST_CASE("test function derivatives match finite differences") {
    const TestFunction f = TestFunction::make(1.0, 0.8, -0.4, 0.5, 0.2, 1.7);
    const double h = 1e-5;
    for (double x : {0.5, 1.3, -0.9, -2.1}) {
        const SidedReal sx = SidedReal::from_projection(x);
        const double num2 = (f.value(SidedReal::from_projection(x + h)) -
                             2.0 * f.value(sx) +
                             f.value(SidedReal::from_projection(x - h))) /
                            (h * h);
        CHECK(std::abs(f.deriv2(sx) - num2) < 1e-5);
        const double num1 = (f.value(SidedReal::from_projection(x + h)) -
                             f.value(SidedReal::from_projection(x - h))) /
                            (2.0 * h);
        CHECK(std::abs(f.deriv1(sx) - num1) < 1e-8);
    }
}

TEST_CASE("generator apply") {
    const PrbmParams p(1.0, 1.0);
    // pure Gaussian envelope: f'' = (4x^2/w^4 - 2/w^2) exp(-x^2/w^2)
    const TestFunction f = TestFunction::make(1.0, 1.0, 1.0, 0.0, 0.0, 1.0);
    const SidedReal x(1.0, Side::plus);
    const double expect = 0.5 * (4.0 - 2.0) * std::exp(-1.0);
    CHECK(generator_apply(f, x, p) == doctest::Approx(expect).epsilon(1e-13));

    // finite-difference oracle at x = 0.5
    const double h = 1e-5;
    const double num2 = (f.value(SidedReal::from_projection(0.5 + h)) -
                         2.0 * f.value(SidedReal::from_projection(0.5)) +
                         f.value(SidedReal::from_projection(0.5 - h))) /
                        (h * h);
    CHECK(std::abs(generator_apply(f, SidedReal(0.5, Side::plus), p) - 0.5 * num2) < 1e-6);

    // continuous f with matching quadratic terms: L f continuous at 0
    const TestFunction cont = TestFunction::make(1.0, 0.7, 0.7, 0.3, 0.3, 2.0);
    CHECK(generator_apply(cont, origin_plus(), p) ==
          doctest::Approx(generator_apply(cont, origin_minus(), p)).epsilon(1e-14));

    const PrbmParams other(2.0, 1.0);
    CHECK_THROWS_AS(generator_apply(f, x, other), std::invalid_argument);
    const PrbmParams bm(infinite_gamma(), 1.0);
    const TestFunction fc = TestFunction::make_continuous(1.0, 0.5, 0.1, 0.2, 1.0);
    CHECK_NOTHROW(generator_apply(fc, x, bm));
    CHECK_THROWS_AS(generator_apply(fc, x, p), std::invalid_argument);
}

TEST_CASE("kernel invariants at small scale") {
    // normalization, symmetry, one Chapman-Kolmogorov split
    const PrbmParams p(0.9, 1.0);
    CHECK(normalization_integral(p, 0.7, SidedReal(0.4, Side::minus)) ==
          doctest::Approx(1.0).epsilon(1e-9));
    const SidedReal x(0.2, Side::plus), y(1.1, Side::minus);
    CHECK(transition_density(p, 0.7, x, y) ==
          doctest::Approx(transition_density(p, 0.7, y, x)).epsilon(1e-13));
    CHECK(chapman_kolmogorov_gap(p, 0.3, 0.7, x, y) < 1e-7);
}
