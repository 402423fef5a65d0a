#pragma once

#include <cstdint>
#include <vector>

#include "prbm/params.hpp"
#include "prbm/rng.hpp"
#include "prbm/sided.hpp"

namespace prbm {

// Heat kernel G_t(x) = exp(-x^2/(2t)) / sqrt(2 pi t).
double gauss_kernel(double t, double x);

// 2 gamma int_0^inf exp(-2 gamma l) G_t(a + l) dl in closed form,
//   gamma * exp(-a^2/(2t)) * erfcx((a + 2 gamma t) / sqrt(2t)).
// The erfcx form keeps the value finite where the textbook product
// exp(2 gamma a + 2 gamma^2 t) erfc(...) overflows (gamma t >~ 15).
double barrier_integral(double a, double gamma, double t);

// log of the same; stays finite deep in the tail where the value itself
// underflows double (a^2/(2t) >~ 745).
double barrier_integral_log(double a, double gamma, double t);

struct DensityQuery {
    PrbmParams params;
    double t = 1.0;
    SidedReal x;
    SidedReal y;
};

// Transition density g_t(x, y) of the process with permeability gamma and
// diffusion sigma. Same side of the barrier:
//   G(x-y) + G(x+y) - barrier_integral(|x|+|y|);
// opposite sides: barrier_integral(|x|+|y|). gamma = 0 drops the barrier
// term, gamma = inf is the plain Gaussian in the projections. General sigma
// evaluates the sigma = 1 kernel at time sigma^2 t.
double transition_density(const DensityQuery& q);
double transition_density(const PrbmParams& params, double t, const SidedReal& x,
                          const SidedReal& y);

// P_x(projection(X_t) <= y_proj); continuous and strictly increasing.
double transition_cdf(const PrbmParams& params, double t, const SidedReal& x,
                      double y_proj);

// Mass of the half line opposite to x's side at time t.
double opposite_side_mass(const PrbmParams& params, double t, const SidedReal& x);

// Exact draw from g_t(x, .) by monotone bisection of transition_cdf to
// 1e-10 absolute position tolerance; consumes one uniform at `index`.
SidedReal sample_transition(const PrbmParams& params, double t, const SidedReal& x,
                            const RngStream& rng, std::uint64_t index);
SidedReal sample_transition_u(const PrbmParams& params, double t, const SidedReal& x,
                              double u);

// P_x(reach 0- before y) = (y - x) / (y + 1/gamma) for 0 < x < y.
double hitting_prob(double x, double y, double gamma);

// Function sampled on the symmetric doubled grid {0, dx, ..., n dx} on each
// half line; minus[k] = f(-k dx), plus[k] = f(+k dx), with the two origin
// slots distinct.
struct GridFunction {
    double dx = 0.0;
    std::vector<double> minus;
    std::vector<double> plus;
};

struct ResolventResult {
    GridFunction g;
    double g0_plus = 0.0, g0_minus = 0.0;   // one-sided origin values
    double d0_plus = 0.0, d0_minus = 0.0;   // one-sided origin derivatives
    double coeff_plus = 0.0, coeff_minus = 0.0;  // homogeneous coefficients A, B
};

// Solves lambda g - (sigma^2/2) g'' = f on each half line with the
// transmission closure at the origin: exponential-weighted integrals per
// half line plus A exp(-mu x) / B exp(mu x), mu = sqrt(2 lambda)/sigma, with
// (A, B) solved from the 2x2 system the transmission condition imposes.
ResolventResult resolvent_solve(double lambda, const GridFunction& f, double gamma,
                                double sigma = 1.0);

// Element of the generator domain: (alpha_side + beta x + delta_side x^2)
// exp(-x^2 / width^2) on each half line, with beta = gamma (alpha_plus -
// alpha_minus) so the transmission condition holds exactly by construction.
struct TestFunction {
    double alpha_plus = 0.0;
    double alpha_minus = 0.0;
    double beta = 0.0;
    double delta_plus = 0.0;
    double delta_minus = 0.0;
    double width = 1.0;
    double gamma = 1.0;

    static TestFunction make(double gamma, double alpha_plus, double alpha_minus,
                             double delta_plus, double delta_minus, double width);
    // gamma = inf variant: needs alpha_plus = alpha_minus, beta free.
    static TestFunction make_continuous(double alpha, double beta, double delta_plus,
                                        double delta_minus, double width);

    double value(const SidedReal& x) const;
    double deriv1(const SidedReal& x) const;
    double deriv2(const SidedReal& x) const;
};

// L^gamma f (x) = (sigma^2 / 2) f''(x), one-sided at the origins. Rejects a
// gamma mismatch between the function and the parameters.
double generator_apply(const TestFunction& f, const SidedReal& x, const PrbmParams& params);

// The fixed family used by the martingale-residual checks.
std::vector<TestFunction> test_function_family(double gamma);

}  // namespace prbm
