#include "prbm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "prbm/quadrature.hpp"
#include "prbm/special.hpp"

namespace prbm {

namespace {

double ks_p_value(double d, double n_eff) {
    const double s = std::sqrt(n_eff);
    return kolmogorov_q(d * (s + 0.12 + 0.11 / s));
}

}  // namespace

KsReport ks_statistic(std::vector<double> samples,
                      const std::function<double(double)>& cdf, double threshold_d) {
    if (samples.size() < 10)
        throw std::invalid_argument("ks_statistic: need at least 10 samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - f));
    }
    KsReport r;
    r.statistic = d;
    r.n_eff = samples.size();
    r.p_value = ks_p_value(d, n);
    r.threshold = threshold_d;
    r.pass = d < threshold_d;
    return r;
}

KsReport ks_two_sample(std::vector<double> a, std::vector<double> b, double min_p) {
    if (a.size() < 10 || b.size() < 10)
        throw std::invalid_argument("ks_two_sample: need at least 10 samples each");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double diff = 0.0, d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        const double xa = a[ia], xb = b[ib];
        const double x = std::min(xa, xb);
        while (ia < a.size() && a[ia] == x) {
            diff += 1.0 / na;
            ++ia;
        }
        while (ib < b.size() && b[ib] == x) {
            diff -= 1.0 / nb;
            ++ib;
        }
        d = std::max(d, std::abs(diff));
    }
    const double n_eff = na * nb / (na + nb);
    KsReport r;
    r.statistic = d;
    r.n_eff = static_cast<std::size_t>(n_eff);
    r.p_value = ks_p_value(d, n_eff);
    r.threshold = min_p;
    r.pass = r.p_value > min_p;
    return r;
}

RateFit exp_rate_fit(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("exp_rate_fit: empty sample");
    double sum = 0.0;
    for (double x : samples) {
        if (!(x > 0.0)) throw std::invalid_argument("exp_rate_fit: samples must be > 0");
        sum += x;
    }
    const double n = static_cast<double>(samples.size());
    RateFit f;
    f.n = samples.size();
    f.rate = n / sum;
    // 2 n lambda / lambda_hat ~ chi2(2n)
    f.lo = chi2_quantile(0.005, 2.0 * n) / (2.0 * sum);
    f.hi = chi2_quantile(0.995, 2.0 * n) / (2.0 * sum);
    return f;
}

ResidualStats martingale_residual(std::span<const SidedPath> ensemble,
                                  const TestFunction& f, const PrbmParams& params,
                                  double t) {
    if (ensemble.empty()) throw std::invalid_argument("martingale_residual: empty ensemble");
    std::vector<double> residuals;
    residuals.reserve(ensemble.size());
    for (const SidedPath& p : ensemble) {
        double integral = 0.0;
        double prev_g = generator_apply(f, p.values.front(), params);
        std::size_t k = 1;
        for (; k < p.times.size() && p.times[k] <= t + 1e-12; ++k) {
            const double g = generator_apply(f, p.values[k], params);
            integral += 0.5 * (p.times[k] - p.times[k - 1]) * (prev_g + g);
            prev_g = g;
        }
        if (std::abs(p.times[k - 1] - t) > 1e-9)
            throw std::invalid_argument("martingale_residual: t not on the path grid");
        residuals.push_back(f.value(p.values[k - 1]) - f.value(p.values.front()) - integral);
    }
    MeanSe ms = mean_se(residuals);
    return ResidualStats{ms.mean, ms.se, residuals.size()};
}

MeanSe mean_se(std::span<const double> xs) {
    if (xs.empty()) return {};
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double n = static_cast<double>(xs.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double se = xs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return MeanSe{mean, se};
}

double barrier_integral_quadrature(double a, double gamma, double t) {
    if (!(a >= 0.0) || !(gamma > 0.0) || std::isinf(gamma) || !(t > 0.0))
        throw std::invalid_argument("barrier_integral_quadrature: bad arguments");
    // 2 gamma int_0^inf e^{-2 gamma l} G_t(a+l) dl
    //   = [2 gamma e^{-a^2/(2t)} / sqrt(2 pi t)] int_0^inf e^{-beta l - l^2/(2t)} dl,
    // beta = 2 gamma + a/t. The reduced integrand is 1 at l = 0, so the
    // quadrature works at unit scale and the tiny prefactor is exact.
    const double beta = 2.0 * gamma + a / t;
    // truncate where beta l + l^2/(2t) = 60
    const double l_max = t * (-beta + std::sqrt(beta * beta + 120.0 / t));
    auto integrand = [&](double l) { return std::exp(-beta * l - l * l / (2.0 * t)); };
    QuadResult q = integrate(integrand, 0.0, l_max, 1e-16, 5e-14, 4000);
    const double prefactor =
        2.0 * gamma * std::exp(-a * a / (2.0 * t)) / std::sqrt(2.0 * M_PI * t);
    return prefactor * q.value;
}

double transition_cdf_quadrature(const PrbmParams& params, double t, const SidedReal& x,
                                 double y_proj) {
    params.validate();
    const double tau = params.sigma * params.sigma * t;
    const double reach = x.magnitude + 12.0 * std::sqrt(tau);
    auto dens_minus = [&](double w) {  // w = |y| on the minus side
        return transition_density(params, t, x, SidedReal(w, Side::minus));
    };
    auto dens_plus = [&](double w) {
        return transition_density(params, t, x, SidedReal(w, Side::plus));
    };
    if (y_proj <= 0.0)
        return integrate(dens_minus, -y_proj, reach, 1e-13, 1e-12).value;
    return integrate(dens_minus, 0.0, reach, 1e-13, 1e-12).value +
           integrate(dens_plus, 0.0, y_proj, 1e-13, 1e-12).value;
}

double normalization_integral(const PrbmParams& params, double t, const SidedReal& x) {
    const double tau = params.sigma * params.sigma * t;
    const double reach = x.magnitude + 12.0 * std::sqrt(tau);
    auto on_side = [&](Side s) {
        return integrate(
                   [&](double w) {
                       return transition_density(params, t, x, SidedReal(w, s));
                   },
                   0.0, reach, 1e-13, 1e-12)
            .value;
    };
    return on_side(Side::plus) + on_side(Side::minus);
}

double chapman_kolmogorov_gap(const PrbmParams& params, double s, double t,
                              const SidedReal& x, const SidedReal& y) {
    const double tau = params.sigma * params.sigma * (s + t);
    const double reach = x.magnitude + y.magnitude + 12.0 * std::sqrt(tau);
    auto on_side = [&](Side side) {
        return integrate(
                   [&](double w) {
                       const SidedReal z(w, side);
                       return transition_density(params, s, x, z) *
                              transition_density(params, t, z, y);
                   },
                   0.0, reach, 1e-13, 1e-11)
            .value;
    };
    const double conv = on_side(Side::plus) + on_side(Side::minus);
    return std::abs(conv - transition_density(params, s + t, x, y));
}

}  // namespace prbm
