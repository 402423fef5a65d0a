#include "prbm/kernel.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "prbm/special.hpp"

namespace prbm {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

void require_time(double t) {
    if (!(t > 0.0) || std::isinf(t))
        throw std::invalid_argument("time must be finite and > 0");
}

// exp(-v^2/(2 tau)) erfcx((v + 2 gamma tau)/sqrt(2 tau)) for gamma in (0, inf),
// erfc(v / sqrt(2 tau)) for gamma = 0, and 0 for gamma = inf. This is the
// tail weight E(v) = barrier_integral(v, gamma, tau) / gamma extended to the
// degenerate permeabilities; the CDF formulas below are uniform in it.
double tail_weight(double v, double gamma, double tau) {
    const double s2t = std::sqrt(2.0 * tau);
    if (std::isinf(gamma)) return 0.0;
    if (gamma == 0.0) return std::erfc(v / s2t);
    return std::exp(-v * v / (2.0 * tau)) * erfcx((v + 2.0 * gamma * tau) / s2t);
}

// CDF of the projection for a start on the plus half line at distance a,
// sigma = 1, time tau.
double cdf_plus_start(double y, double a, double gamma, double tau) {
    const double u = std::sqrt(tau);
    if (y >= 0.0)
        return norm_cdf((y - a) / u) - 0.5 * tail_weight(a + y, gamma, tau);
    return 1.0 - norm_cdf((a - y) / u) - 0.5 * tail_weight(a - y, gamma, tau);
}

}  // namespace

double gauss_kernel(double t, double x) {
    require_time(t);
    return kInvSqrt2Pi / std::sqrt(t) * std::exp(-x * x / (2.0 * t));
}

double barrier_integral(double a, double gamma, double t) {
    require_time(t);
    if (!(a >= 0.0)) throw std::invalid_argument("barrier_integral: a must be >= 0");
    if (!(gamma > 0.0) || std::isinf(gamma))
        throw std::invalid_argument("barrier_integral: gamma must lie in (0, inf)");
    const double z = (a + 2.0 * gamma * t) / std::sqrt(2.0 * t);
    return gamma * std::exp(-a * a / (2.0 * t)) * erfcx(z);
}

double barrier_integral_log(double a, double gamma, double t) {
    require_time(t);
    if (!(a >= 0.0)) throw std::invalid_argument("barrier_integral_log: a must be >= 0");
    if (!(gamma > 0.0) || std::isinf(gamma))
        throw std::invalid_argument("barrier_integral_log: gamma must lie in (0, inf)");
    const double z = (a + 2.0 * gamma * t) / std::sqrt(2.0 * t);
    return std::log(gamma) - a * a / (2.0 * t) + std::log(erfcx(z));
}

double transition_density(const PrbmParams& params, double t, const SidedReal& x,
                          const SidedReal& y) {
    params.validate();
    require_time(t);
    const double tau = params.sigma * params.sigma * t;
    if (params.fully_permeable())
        return gauss_kernel(tau, x.projection() - y.projection());
    const double a = x.magnitude, b = y.magnitude;
    const bool same_side = (x.side == y.side);
    if (params.reflecting())
        return same_side ? gauss_kernel(tau, a - b) + gauss_kernel(tau, a + b) : 0.0;
    const double cross = barrier_integral(a + b, params.gamma, tau);
    return same_side ? gauss_kernel(tau, a - b) + gauss_kernel(tau, a + b) - cross
                     : cross;
}

double transition_density(const DensityQuery& q) {
    return transition_density(q.params, q.t, q.x, q.y);
}

double transition_cdf(const PrbmParams& params, double t, const SidedReal& x,
                      double y_proj) {
    params.validate();
    require_time(t);
    const double tau = params.sigma * params.sigma * t;
    const double f = (x.side == Side::plus)
                         ? cdf_plus_start(y_proj, x.magnitude, params.gamma, tau)
                         : 1.0 - cdf_plus_start(-y_proj, x.magnitude, params.gamma, tau);
    return std::min(1.0, std::max(0.0, f));  // guard against cancellation at the ends
}

double opposite_side_mass(const PrbmParams& params, double t, const SidedReal& x) {
    params.validate();
    require_time(t);
    const double tau = params.sigma * params.sigma * t;
    const double a = x.magnitude;
    return 1.0 - norm_cdf(a / std::sqrt(tau)) - 0.5 * tail_weight(a, params.gamma, tau);
}

SidedReal sample_transition_u(const PrbmParams& params, double t, const SidedReal& x,
                              double u) {
    params.validate();
    require_time(t);
    const double tau = params.sigma * params.sigma * t;
    const double spread = x.magnitude + 10.0 * std::sqrt(tau);
    double lo = -spread, hi = spread;
    for (int guard = 0; guard < 64 && transition_cdf(params, t, x, lo) > u; ++guard)
        lo *= 2.0;
    for (int guard = 0; guard < 64 && transition_cdf(params, t, x, hi) < u; ++guard)
        hi *= 2.0;
    // monotone bisection to 1e-10 in position
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (transition_cdf(params, t, x, mid) < u)
            lo = mid;
        else
            hi = mid;
    }
    const double y = 0.5 * (lo + hi);
    if (y != 0.0) return SidedReal::from_projection(y);
    // Exactly at the doubled origin: decide the side by the origin mass split.
    return u <= transition_cdf(params, t, x, 0.0) ? origin_minus() : origin_plus();
}

SidedReal sample_transition(const PrbmParams& params, double t, const SidedReal& x,
                            const RngStream& rng, std::uint64_t index) {
    return sample_transition_u(params, t, x, rng.uniform(index));
}

double hitting_prob(double x, double y, double gamma) {
    if (!(0.0 < x && x < y))
        throw std::invalid_argument("hitting_prob: need 0 < x < y");
    if (!(gamma > 0.0))
        throw std::invalid_argument("hitting_prob: gamma must be positive");
    const double inv_gamma = std::isinf(gamma) ? 0.0 : 1.0 / gamma;
    return (y - x) / (y + inv_gamma);
}

ResolventResult resolvent_solve(double lambda, const GridFunction& f, double gamma,
                                double sigma) {
    if (!(lambda > 0.0)) throw std::invalid_argument("resolvent_solve: lambda must be > 0");
    if (!(gamma > 0.0) || std::isinf(gamma))
        throw std::invalid_argument("resolvent_solve: gamma must lie in (0, inf)");
    if (!(sigma > 0.0)) throw std::invalid_argument("resolvent_solve: sigma must be > 0");
    if (f.plus.size() != f.minus.size() || f.plus.size() < 3 || !(f.dx > 0.0))
        throw std::invalid_argument("resolvent_solve: need a symmetric grid with dx > 0");

    const double mu = std::sqrt(2.0 * lambda) / sigma;
    const double norm = 1.0 / (sigma * sigma * mu);
    const double w = std::exp(-mu * f.dx);
    const std::size_t n = f.plus.size();

    // J1(x_k) = int_0^{x_k} e^{-mu (x_k - y)} f(y) dy,
    // J2(x_k) = int_{x_k}^{X} e^{-mu (y - x_k)} f(y) dy; both by trapezoid
    // recursions whose exponents are all <= 0, so nothing overflows. The
    // same recursions serve the minus side in the magnitude coordinate.
    auto sweep = [&](const std::vector<double>& v, std::vector<double>& J1,
                     std::vector<double>& J2) {
        J1.assign(n, 0.0);
        J2.assign(n, 0.0);
        for (std::size_t k = 1; k < n; ++k)
            J1[k] = w * J1[k - 1] + 0.5 * f.dx * (w * v[k - 1] + v[k]);
        for (std::size_t k = n - 1; k-- > 0;)
            J2[k] = w * J2[k + 1] + 0.5 * f.dx * (v[k] + w * v[k + 1]);
    };

    std::vector<double> J1p, J2p, J1m, J2m;
    sweep(f.plus, J1p, J2p);
    sweep(f.minus, J1m, J2m);

    const double P = norm * J2p[0];   // particular value/derivative scale at 0+
    const double Q = norm * J2m[0];   // same at 0-

    const double denom = mu + 2.0 * gamma;
    assert(denom > 0.0);  // cannot be singular for lambda > 0, gamma in (0, inf)
    const double A = (mu * P + 2.0 * gamma * Q) / denom;
    const double B = (mu * Q + 2.0 * gamma * P) / denom;

    ResolventResult out;
    out.g.dx = f.dx;
    out.g.plus.resize(n);
    out.g.minus.resize(n);
    double decay = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        out.g.plus[k] = norm * (J1p[k] + J2p[k]) + A * decay;
        out.g.minus[k] = norm * (J1m[k] + J2m[k]) + B * decay;
        decay *= w;
    }
    out.g0_plus = P + A;
    out.g0_minus = Q + B;
    out.d0_plus = mu * (P - A);
    out.d0_minus = mu * (B - Q);
    out.coeff_plus = A;
    out.coeff_minus = B;
    return out;
}

TestFunction TestFunction::make(double gamma, double alpha_plus, double alpha_minus,
                                double delta_plus, double delta_minus, double width) {
    if (!(gamma >= 0.0) || std::isinf(gamma))
        throw std::invalid_argument("TestFunction::make: gamma must be finite, use make_continuous for inf");
    if (!(width > 0.0)) throw std::invalid_argument("TestFunction: width must be > 0");
    TestFunction f;
    f.alpha_plus = alpha_plus;
    f.alpha_minus = alpha_minus;
    f.beta = gamma * (alpha_plus - alpha_minus);  // transmission condition
    f.delta_plus = delta_plus;
    f.delta_minus = delta_minus;
    f.width = width;
    f.gamma = gamma;
    return f;
}

TestFunction TestFunction::make_continuous(double alpha, double beta, double delta_plus,
                                           double delta_minus, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("TestFunction: width must be > 0");
    TestFunction f;
    f.alpha_plus = f.alpha_minus = alpha;
    f.beta = beta;
    f.delta_plus = delta_plus;
    f.delta_minus = delta_minus;
    f.width = width;
    f.gamma = infinite_gamma();
    return f;
}

double TestFunction::value(const SidedReal& x) const {
    const double p = x.projection();
    const double alpha = (x.side == Side::plus) ? alpha_plus : alpha_minus;
    const double delta = (x.side == Side::plus) ? delta_plus : delta_minus;
    const double q = alpha + beta * p + delta * p * p;
    return q * std::exp(-p * p / (width * width));
}

double TestFunction::deriv1(const SidedReal& x) const {
    const double p = x.projection();
    const double alpha = (x.side == Side::plus) ? alpha_plus : alpha_minus;
    const double delta = (x.side == Side::plus) ? delta_plus : delta_minus;
    const double iw2 = 1.0 / (width * width);
    const double q = alpha + beta * p + delta * p * p;
    const double q1 = beta + 2.0 * delta * p;
    return (q1 - 2.0 * p * iw2 * q) * std::exp(-p * p * iw2);
}

double TestFunction::deriv2(const SidedReal& x) const {
    const double p = x.projection();
    const double alpha = (x.side == Side::plus) ? alpha_plus : alpha_minus;
    const double delta = (x.side == Side::plus) ? delta_plus : delta_minus;
    const double iw2 = 1.0 / (width * width);
    const double q = alpha + beta * p + delta * p * p;
    const double q1 = beta + 2.0 * delta * p;
    const double q2 = 2.0 * delta;
    return (q2 - 4.0 * p * iw2 * q1 + (4.0 * p * p * iw2 * iw2 - 2.0 * iw2) * q) *
           std::exp(-p * p * iw2);
}

double generator_apply(const TestFunction& f, const SidedReal& x, const PrbmParams& params) {
    params.validate();
    const bool both_inf = std::isinf(f.gamma) && std::isinf(params.gamma);
    if (!both_inf && f.gamma != params.gamma)
        throw std::invalid_argument("generator_apply: gamma mismatch between f and params");
    return 0.5 * params.sigma * params.sigma * f.deriv2(x);
}

std::vector<TestFunction> test_function_family(double gamma) {
    if (std::isinf(gamma)) {
        return {TestFunction::make_continuous(1.0, 0.0, 0.0, 0.0, 2.0),
                TestFunction::make_continuous(0.5, 1.0, 0.3, 0.1, 1.5),
                TestFunction::make_continuous(0.0, 0.0, 1.0, -1.0, 1.0),
                TestFunction::make_continuous(-0.7, 0.5, 0.0, 0.4, 3.0),
                TestFunction::make_continuous(1.0, -1.0, 0.5, 0.5, 1.0)};
    }
    return {TestFunction::make(gamma, 1.0, 0.0, 0.0, 0.0, 2.0),
            TestFunction::make(gamma, 0.5, -0.5, 0.3, 0.1, 1.5),
            TestFunction::make(gamma, 0.0, 0.0, 1.0, -1.0, 1.0),
            TestFunction::make(gamma, -0.7, 0.2, 0.0, 0.4, 3.0),
            TestFunction::make(gamma, 1.0, 1.0, 0.5, 0.5, 1.0)};
}

}  // namespace prbm
