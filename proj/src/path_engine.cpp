#include "prbm/path_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prbm {

namespace {

std::size_t grid_steps(double dt, double T) {
    if (!(dt > 0.0) || !(T >= dt))
        throw std::invalid_argument("need dt > 0 and T >= dt");
    return static_cast<std::size_t>(T / dt + 0.5);
}

Path uniform_grid(std::size_t n, double dt) {
    Path p;
    p.step = dt;
    p.times.resize(n + 1);
    p.values.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) p.times[k] = static_cast<double>(k) * dt;
    return p;
}

}  // namespace

Path simulate_bm(double x0, double sigma, double dt, double T, const RngStream& rng) {
    if (!(sigma > 0.0)) throw std::invalid_argument("simulate_bm: sigma must be > 0");
    const std::size_t n = grid_steps(dt, T);
    Path p = uniform_grid(n, dt);
    const double scale = sigma * std::sqrt(dt);
    NormalSource normals(rng);
    double x = x0;
    p.values[0] = x;
    for (std::size_t k = 1; k <= n; ++k) {
        x += scale * normals();
        p.values[k] = x;
    }
    return p;
}

SkorokhodResult skorokhod_map(const Path& f) {
    if (f.values.empty() || f.values.front() < 0.0)
        throw std::invalid_argument("skorokhod_map: need f(0) >= 0");
    SkorokhodResult out;
    out.reflected.times = f.times;
    out.reflected.step = f.step;
    out.regulator.times = f.times;
    out.regulator.step = f.step;
    const std::size_t n = f.values.size();
    out.reflected.values.resize(n);
    out.regulator.values.resize(n);
    double l = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        l = std::max(l, -f.values[k]);
        out.regulator.values[k] = l;
        out.reflected.values[k] = f.values[k] + l;
    }
    return out;
}

TwoSidedResult two_sided_regulator(const Path& f, double a, double b) {
    if (!(a < b)) throw std::invalid_argument("two_sided_regulator: need a < b");
    if (f.values.empty() || f.values.front() < a || f.values.front() > b)
        throw std::invalid_argument("two_sided_regulator: need f(0) in [a, b]");
    TwoSidedResult out;
    for (Path* p : {&out.constrained, &out.lower, &out.upper}) {
        p->times = f.times;
        p->step = f.step;
        p->values.resize(f.values.size());
    }
    double l = 0.0, u = 0.0;
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        double v = f.values[k] + l - u;
        if (v < a) {
            l += a - v;
            v = a;
        } else if (v > b) {
            u += v - b;
            v = b;
        }
        out.constrained.values[k] = v;
        out.lower.values[k] = l;
        out.upper.values[k] = u;
    }
    return out;
}

ReflectedBmResult reflected_bm_with_local_time(double x0, double sigma, double dt,
                                               double T, const RngStream& rng) {
    if (!(x0 >= 0.0))
        throw std::invalid_argument("reflected_bm_with_local_time: need x0 >= 0");
    Path driving = simulate_bm(x0, sigma, dt, T, rng);
    SkorokhodResult s = skorokhod_map(driving);
    return ReflectedBmResult{std::move(s.reflected), std::move(s.regulator)};
}

}  // namespace prbm
