#pragma once

#include "prbm/path.hpp"
#include "prbm/rng.hpp"

namespace prbm {

// Discrete Brownian path: values[k+1] = values[k] + sigma sqrt(dt) N(0,1),
// exact marginals at the grid points. Deterministic in (seed, stream_id).
Path simulate_bm(double x0, double sigma, double dt, double T, const RngStream& rng);

struct SkorokhodResult {
    Path reflected;  // X = f + l >= 0
    Path regulator;  // l, non-decreasing, l(0) = 0, grows only where X hits 0
};

// Solution of the Skorokhod problem for a discrete path f with f(0) >= 0:
// l(t) = sup_{s<=t} (f(s))^-  (the running supremum of the negative part;
// the non-decreasing regulator requires the sup even where the source lemma
// is printed with an inf).
SkorokhodResult skorokhod_map(const Path& f);

struct TwoSidedResult {
    Path constrained;  // X = f + l - u in [a, b]
    Path lower;        // l, grows only where X = a
    Path upper;        // u, grows only where X = b
};

// Two-sided regulator on [a, b] by the standard forward sweep that keeps
// both running corrections.
TwoSidedResult two_sided_regulator(const Path& f, double a, double b);

struct ReflectedBmResult {
    Path w;          // reflected path, >= 0
    Path local_time; // the regulator; equals the local time of W at 0
};

// Reflected Brownian motion from x0 >= 0 with its local time at the origin,
// computed through the regulator identity (no bandwidth parameter).
ReflectedBmResult reflected_bm_with_local_time(double x0, double sigma, double dt,
                                               double T, const RngStream& rng);

}  // namespace prbm
