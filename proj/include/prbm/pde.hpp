#pragma once

#include <functional>
#include <vector>

#include "prbm/params.hpp"
#include "prbm/sided.hpp"

namespace prbm {

enum class PdeScheme { implicit, explicit_euler };

// Doubled-origin grid on [-x_max, 0-] u [0+, x_max]: N+1 nodes per side,
// the origin appearing twice. Node values are evolved in flux form with
// half cells at the four boundary/origin nodes, the interface flux being
// the transmission condition itself, sigma^2/2 * gamma * (p(0+) - p(0-)).
// That closure conserves the trapezoid mass exactly; the one-sided
// three-point derivative stencils are kept as an accuracy diagnostic
// (interface_derivatives below).
struct PdeGrid {
    double x_max = 10.0;
    double dx = 1e-2;
    double dt = 1e-3;
    double gamma = 1.0;  // [0, inf]
    double sigma = 1.0;
    PdeScheme scheme = PdeScheme::implicit;

    void validate() const;
    std::size_t per_side() const;      // N: plus-side nodes are 0+, dx, ..., N dx
    std::size_t total_nodes() const { return 2 * (per_side() + 1); }
    // Global layout: [0 .. N] = minus side from -x_max to 0-,
    //                [N+1 .. 2N+1] = plus side from 0+ to x_max.
    SidedReal node(std::size_t g) const;
    std::size_t index_origin_minus() const { return per_side(); }
    std::size_t index_origin_plus() const { return per_side() + 1; }
};

// Evolves p0 (node values in grid layout) to time T. Explicit scheme
// rejects dt > dx^2 / sigma^2.
std::vector<double> solve_transmission_heat(const PdeGrid& grid,
                                            std::vector<double> p0, double T);

// Trapezoid mass with the half-cell weights; conserved by the scheme.
double grid_mass(const PdeGrid& grid, const std::vector<double>& values);

// One-sided second-order derivatives at the doubled origin,
// (-3 p0 + 4 p1 - p2) / (2 dx) on each side; both should agree with
// gamma (p(0+) - p(0-)) to O(dx^2).
struct InterfaceDerivatives {
    double d_plus = 0.0;
    double d_minus = 0.0;
    double flux_target = 0.0;  // gamma * (p(0+) - p(0-))
};
InterfaceDerivatives interface_derivatives(const PdeGrid& grid,
                                           const std::vector<double>& values);

// Action of the semigroup on the initial condition:
// int g_t(x, y) p0(y) dy by adaptive quadrature over both half lines.
double semigroup_solution(const PrbmParams& params,
                          const std::function<double(const SidedReal&)>& p0, double t,
                          const SidedReal& x);

// Initial profiles used by the harness and the CLI.
std::vector<double> step_initial(const PdeGrid& grid);      // 1{x > 0}, plus side
std::vector<double> gaussian_initial(const PdeGrid& grid);  // N(0, 1) density

}  // namespace prbm
