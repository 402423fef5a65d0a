#include "prbm/pde.hpp"

#include <cmath>
#include <stdexcept>

#include "prbm/kernel.hpp"
#include "prbm/quadrature.hpp"

namespace prbm {

namespace {

// Tridiagonal representation of the spatial operator A (u' = A u) over the
// effective unknowns. For gamma = inf the two origin nodes are merged into
// one full cell, so the system shrinks by one.
struct Tridiag {
    std::vector<double> sub, diag, sup;
    std::size_t size() const { return diag.size(); }
};

Tridiag build_operator(const PdeGrid& g, bool merged) {
    const std::size_t n_side = g.per_side();
    const double D = 0.5 * g.sigma * g.sigma;
    const double idx2 = 1.0 / (g.dx * g.dx);
    const std::size_t n = merged ? 2 * n_side + 1 : 2 * n_side + 2;
    Tridiag A;
    A.sub.assign(n, 0.0);
    A.diag.assign(n, 0.0);
    A.sup.assign(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const bool outer = (r == 0 || r == n - 1);
        bool origin_minus = false, origin_plus = false, origin_merged = false;
        if (merged) {
            origin_merged = (r == n_side);
        } else {
            origin_minus = (r == n_side);
            origin_plus = (r == n_side + 1);
        }
        if (outer) {
            const double c = 2.0 * D * idx2;
            A.diag[r] = -c;
            if (r == 0) A.sup[r] = c; else A.sub[r] = c;
        } else if (origin_minus) {
            const double diff = 2.0 * D * idx2;
            const double xfer = 2.0 * D * g.gamma / g.dx;
            A.sub[r] = diff;
            A.diag[r] = -diff - xfer;
            A.sup[r] = xfer;
        } else if (origin_plus) {
            const double diff = 2.0 * D * idx2;
            const double xfer = 2.0 * D * g.gamma / g.dx;
            A.sub[r] = xfer;
            A.diag[r] = -diff - xfer;
            A.sup[r] = diff;
        } else {
            // interior node, including the merged full origin cell
            (void)origin_merged;
            A.sub[r] = D * idx2;
            A.diag[r] = -2.0 * D * idx2;
            A.sup[r] = D * idx2;
        }
    }
    return A;
}

void thomas_solve(const Tridiag& M, std::vector<double>& rhs, std::vector<double>& cp,
                  std::vector<double>& dp) {
    const std::size_t n = M.size();
    cp.resize(n);
    dp.resize(n);
    cp[0] = M.sup[0] / M.diag[0];
    dp[0] = rhs[0] / M.diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double w = M.diag[i] - M.sub[i] * cp[i - 1];
        cp[i] = M.sup[i] / w;
        dp[i] = (rhs[i] - M.sub[i] * dp[i - 1]) / w;
    }
    rhs[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = dp[i] - cp[i] * rhs[i + 1];
}

// u_out = (I + w A) u
void apply_shifted(const Tridiag& A, double w, const std::vector<double>& u,
                   std::vector<double>& out) {
    const std::size_t n = A.size();
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = (1.0 + w * A.diag[i]) * u[i];
        if (i > 0) v += w * A.sub[i] * u[i - 1];
        if (i + 1 < n) v += w * A.sup[i] * u[i + 1];
        out[i] = v;
    }
}

Tridiag shifted_lhs(const Tridiag& A, double w) {
    Tridiag M = A;
    for (std::size_t i = 0; i < M.size(); ++i) {
        M.sub[i] *= -w;
        M.diag[i] = 1.0 - w * M.diag[i];
        M.sup[i] *= -w;
    }
    return M;
}

}  // namespace

void PdeGrid::validate() const {
    if (!(x_max > 0.0) || !(dx > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("PdeGrid: x_max, dx, dt must be > 0");
    if (std::isnan(gamma) || gamma < 0.0)
        throw std::invalid_argument("PdeGrid: gamma must lie in [0, inf]");
    if (!(sigma > 0.0)) throw std::invalid_argument("PdeGrid: sigma must be > 0");
    if (per_side() < 3) throw std::invalid_argument("PdeGrid: grid too coarse");
    if (scheme == PdeScheme::explicit_euler && dt > dx * dx / (sigma * sigma))
        throw std::invalid_argument("PdeGrid: explicit scheme needs dt <= dx^2 / sigma^2");
}

std::size_t PdeGrid::per_side() const {
    return static_cast<std::size_t>(x_max / dx + 0.5);
}

SidedReal PdeGrid::node(std::size_t g) const {
    const std::size_t n_side = per_side();
    if (g <= n_side)
        return SidedReal((static_cast<double>(n_side - g)) * dx, Side::minus);
    return SidedReal(static_cast<double>(g - n_side - 1) * dx, Side::plus);
}

std::vector<double> solve_transmission_heat(const PdeGrid& grid, std::vector<double> p0,
                                            double T) {
    grid.validate();
    if (p0.size() != grid.total_nodes())
        throw std::invalid_argument("solve_transmission_heat: p0 has wrong length");
    if (!(T >= 0.0)) throw std::invalid_argument("solve_transmission_heat: T must be >= 0");
    if (T == 0.0) return p0;

    const bool merged = std::isinf(grid.gamma);
    const std::size_t n_side = grid.per_side();

    std::vector<double> u;
    if (merged) {
        // the two origin half cells form one full cell; use their mean
        u.assign(p0.begin(), p0.begin() + n_side);
        u.push_back(0.5 * (p0[n_side] + p0[n_side + 1]));
        u.insert(u.end(), p0.begin() + n_side + 2, p0.end());
    } else {
        u = p0;
    }

    const Tridiag A = build_operator(grid, merged);
    const std::size_t steps = std::max<std::size_t>(1, std::llround(T / grid.dt));
    const double dt = T / static_cast<double>(steps);
    std::vector<double> rhs, cp, dp;

    if (grid.scheme == PdeScheme::explicit_euler) {
        for (std::size_t s = 0; s < steps; ++s) {
            apply_shifted(A, dt, u, rhs);
            u.swap(rhs);
        }
    } else {
        // Crank-Nicolson with a Rannacher start: four backward-Euler half
        // steps damp the high modes of rough initial data. Both stages share
        // the (I - dt/2 A) factor.
        const Tridiag lhs = shifted_lhs(A, 0.5 * dt);
        std::size_t s = 0;
        if (steps >= 2) {
            for (int k = 0; k < 4; ++k) {
                rhs = u;
                thomas_solve(lhs, rhs, cp, dp);
                u.swap(rhs);
            }
            s = 2;  // consumed two full dt steps
        }
        for (; s < steps; ++s) {
            apply_shifted(A, 0.5 * dt, u, rhs);
            thomas_solve(lhs, rhs, cp, dp);
            u.swap(rhs);
        }
    }

    if (!merged) return u;
    std::vector<double> out(p0.size());
    for (std::size_t g = 0; g < n_side; ++g) out[g] = u[g];
    out[n_side] = u[n_side];
    out[n_side + 1] = u[n_side];
    for (std::size_t g = n_side + 1; g < u.size(); ++g) out[g + 1] = u[g];
    return out;
}

double grid_mass(const PdeGrid& grid, const std::vector<double>& values) {
    if (values.size() != grid.total_nodes())
        throw std::invalid_argument("grid_mass: wrong length");
    const std::size_t n_side = grid.per_side();
    double mass = 0.0;
    for (std::size_t g = 0; g < values.size(); ++g) {
        const bool half = (g == 0 || g == n_side || g == n_side + 1 || g == values.size() - 1);
        mass += values[g] * (half ? 0.5 * grid.dx : grid.dx);
    }
    return mass;
}

InterfaceDerivatives interface_derivatives(const PdeGrid& grid,
                                           const std::vector<double>& v) {
    const std::size_t om = grid.index_origin_minus();
    const std::size_t op = grid.index_origin_plus();
    InterfaceDerivatives d;
    d.d_plus = (-3.0 * v[op] + 4.0 * v[op + 1] - v[op + 2]) / (2.0 * grid.dx);
    d.d_minus = (3.0 * v[om] - 4.0 * v[om - 1] + v[om - 2]) / (2.0 * grid.dx);
    d.flux_target = std::isinf(grid.gamma) ? d.d_plus : grid.gamma * (v[op] - v[om]);
    return d;
}

double semigroup_solution(const PrbmParams& params,
                          const std::function<double(const SidedReal&)>& p0, double t,
                          const SidedReal& x) {
    params.validate();
    if (!(t > 0.0)) throw std::invalid_argument("semigroup_solution: t must be > 0");
    const double reach = x.magnitude + 12.0 * params.sigma * std::sqrt(t);
    auto on_side = [&](Side s) {
        return integrate(
                   [&](double w) {
                       const SidedReal y(w, s);
                       return transition_density(params, t, x, y) * p0(y);
                   },
                   0.0, reach, 1e-12, 1e-10)
            .value;
    };
    return on_side(Side::plus) + on_side(Side::minus);
}

std::vector<double> step_initial(const PdeGrid& grid) {
    std::vector<double> v(grid.total_nodes(), 0.0);
    for (std::size_t g = grid.index_origin_plus(); g < v.size(); ++g) v[g] = 1.0;
    return v;
}

std::vector<double> gaussian_initial(const PdeGrid& grid) {
    std::vector<double> v(grid.total_nodes());
    for (std::size_t g = 0; g < v.size(); ++g) {
        const double x = grid.node(g).projection();
        v[g] = std::exp(-0.5 * x * x) * 0.3989422804014327;
    }
    return v;
}

}  // namespace prbm
