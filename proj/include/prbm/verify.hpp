#pragma once

#include <functional>
#include <span>
#include <vector>

#include "prbm/constructions.hpp"
#include "prbm/kernel.hpp"
#include "prbm/params.hpp"
#include "prbm/path.hpp"

namespace prbm {

struct KsReport {
    double statistic = 0.0;  // sup distance D
    std::size_t n_eff = 0;   // sample size (one-sample) or n1 n2/(n1+n2)
    double p_value = 1.0;    // asymptotic Kolmogorov bound
    double threshold = 0.0;
    bool pass = false;
};

// One-sample exact KS statistic by sorted sweep; pass means D < threshold_d.
KsReport ks_statistic(std::vector<double> samples,
                      const std::function<double(double)>& cdf, double threshold_d);

// Two-sample KS by pooled sweep; pass means p > min_p.
KsReport ks_two_sample(std::vector<double> a, std::vector<double> b, double min_p);

struct RateFit {
    double rate = 0.0;  // maximum-likelihood 1/mean
    double lo = 0.0;    // 99% confidence bounds (chi-square)
    double hi = 0.0;
    std::size_t n = 0;
    bool contains(double r) const { return lo <= r && r <= hi; }
};

RateFit exp_rate_fit(std::span<const double> samples);

// Ensemble mean and standard error of the martingale-problem residual
// f(X_t) - f(X_0) - int_0^t L^gamma f(X_s) ds, trapezoidal in s, over paths
// that carry t on their grid. Rejects a gamma mismatch via generator_apply.
ResidualStats martingale_residual(std::span<const SidedPath> ensemble,
                                  const TestFunction& f, const PrbmParams& params,
                                  double t);

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};
MeanSe mean_se(std::span<const double> xs);

// --- independent quadrature oracles ---------------------------------------
// These re-derive kernel quantities by adaptive quadrature of the defining
// integrals; they deliberately avoid the closed forms they are used to
// check.

// 2 gamma int_0^inf exp(-2 gamma l) G_t(a + l) dl, factorized so the result
// keeps full relative accuracy even when it is ~1e-200.
double barrier_integral_quadrature(double a, double gamma, double t);

// P_x(projection <= y) by integrating the transition density.
double transition_cdf_quadrature(const PrbmParams& params, double t, const SidedReal& x,
                                 double y_proj);

// int over both half lines of g_t(x, .).
double normalization_integral(const PrbmParams& params, double t, const SidedReal& x);

// | int g_s(x,z) g_t(z,y) dz - g_{s+t}(x,y) |
double chapman_kolmogorov_gap(const PrbmParams& params, double s, double t,
                              const SidedReal& x, const SidedReal& y);

}  // namespace prbm
