#pragma once

namespace prbm {

// Scaled complementary error function exp(x^2) erfc(x), accurate to ~1e-13
// relative over the full double range. The direct product is used where
// erfc keeps full precision; the asymptotic series takes over before
// exp(x^2) can overflow.
double erfcx(double x);

// log(erfc(x)) without underflow for large positive x.
double log_erfc(double x);

double norm_cdf(double x);

// Inverse standard normal CDF (Wichura's AS 241, double precision).
double norm_ppf(double p);

// Kolmogorov distribution tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1}
// exp(-2 k^2 lambda^2); the small-lambda theta series is used below 1.18.
double kolmogorov_q(double lambda);

// Chi-square quantile via Wilson-Hilferty; adequate for the wide confidence
// intervals used here (relative error < 1e-3 for df >= 8).
double chi2_quantile(double p, double df);

}  // namespace prbm
