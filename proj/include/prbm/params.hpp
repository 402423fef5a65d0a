#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace prbm {

// Permeability gamma in [0, +inf] and diffusion scale sigma > 0.
// gamma = 0 is the reflecting barrier, gamma = +inf is plain Brownian
// motion; both are carried as exact IEEE values and every operation
// branches on them explicitly rather than treating them as large/small
// finite numbers.
struct PrbmParams {
    double gamma = 1.0;
    double sigma = 1.0;

    PrbmParams() = default;
    PrbmParams(double g, double s) : gamma(g), sigma(s) { validate(); }

    void validate() const {
        if (std::isnan(gamma) || gamma < 0.0)
            throw std::invalid_argument("PrbmParams: gamma must lie in [0, +inf]");
        if (!(sigma > 0.0) || std::isinf(sigma))
            throw std::invalid_argument("PrbmParams: sigma must be finite and > 0");
    }

    bool reflecting() const { return gamma == 0.0; }
    bool fully_permeable() const { return std::isinf(gamma); }
    bool finite_gamma() const { return gamma > 0.0 && !std::isinf(gamma); }

    // Half width of the band collapsed by the scale function.
    double band_half_width() const {
        if (!finite_gamma())
            throw std::invalid_argument("band_half_width: needs gamma in (0, inf)");
        return 1.0 / (2.0 * gamma);
    }
};

inline double infinite_gamma() { return std::numeric_limits<double>::infinity(); }

}  // namespace prbm
