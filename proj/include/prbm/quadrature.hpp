#pragma once

#include <functional>

namespace prbm {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    int panels = 0;
};

// Adaptive Gauss-Kronrod (G7, K15) on a finite interval. Splits the worst
// panel until the summed error estimate drops below
// max(abs_tol, rel_tol * |value|) or max_panels is hit.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-12, double rel_tol = 1e-12,
                     int max_panels = 4000);

}  // namespace prbm
