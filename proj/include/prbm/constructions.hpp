#pragma once

#include <cstdint>
#include <vector>

#include "prbm/kernel.hpp"
#include "prbm/params.hpp"
#include "prbm/path.hpp"
#include "prbm/rng.hpp"

namespace prbm {

// --- the three path constructions ---------------------------------------

// Speed-and-scale: drive a Brownian path from r^-1(x0), keep only the steps
// whose endpoint lies outside the band [-1/(2 gamma), 1/(2 gamma)] (endpoint
// classification, O(sqrt(dt)) boundary bias), and map through r. The driving
// path is extended until the active clock reaches T.
SidedPath simulate_speed_scale(const PrbmParams& params, const SidedReal& x0, double dt,
                               double T, const RngStream& rng);

// Local-time flip: reflected Brownian motion W with its regulator L; the
// side flips each time L crosses the next arrival level of an independent
// rate-gamma Poisson process. Several levels inside one step are absorbed
// into the parity. The returned path carries L in `local_time`.
SidedPath simulate_flip(const PrbmParams& params, const SidedReal& x0, double dt,
                        double T, const RngStream& rng);

// Markov chain with the exact transition kernel over the given increments;
// exact finite-dimensional marginals, no discretization bias. `times` must
// start at 0 (where the value is x0) and increase strictly.
SidedPath simulate_exact(const PrbmParams& params, const SidedReal& x0,
                         const std::vector<double>& times, const RngStream& rng);

// Times at which the side first differs from the side held at the previous
// crossing. Uses the stored side, so touches of the origin without a sign
// flip are not counted.
std::vector<double> crossing_times(const SidedPath& p);

// Local time accumulated between consecutive crossings, read off the stored
// regulator. Rejects paths without a local-time coordinate (the exact
// sampler has none).
std::vector<double> local_time_increments(const SidedPath& p);

// --- streaming ensemble runners ------------------------------------------
//
// These run the same constructions path by path on worker threads, keeping
// one path in memory per worker and writing per-path results into slots
// indexed by path id, so output is independent of the thread count. With
// `coarse_far_field` the samplers take single exact Gaussian steps sized so
// that reaching the boundary within the block is an 8-sigma event; that part
// of the path carries no active time / no regulator growth, so the law at
// the recorded times is unchanged.

enum class SamplerKind { speed_scale, flip, exact };

// snapshots[s][i]: projection of path i at snapshot time s.
std::vector<std::vector<double>> ensemble_snapshots(
    SamplerKind kind, const PrbmParams& params, const SidedReal& x0,
    const std::vector<double>& snapshot_times, double dt, std::size_t n_paths,
    const RngStream& base, unsigned threads, bool coarse_far_field = true);

struct FlipEnsembleStats {
    std::vector<std::vector<double>> snapshots;    // projections, as above
    std::vector<double> local_time_t1;             // L at t = 1, per path
    std::vector<std::uint32_t> crossings_by_t1;    // crossings with T_i <= 1, per path
};

// One flip-sampler pass collecting marginals and the crossing counts.
FlipEnsembleStats flip_ensemble(const PrbmParams& params, const SidedReal& x0,
                                const std::vector<double>& snapshot_times, double dt,
                                std::size_t n_paths, const RngStream& base,
                                unsigned threads, bool coarse_far_field = true);

struct FirstIncrements {
    std::vector<double> increments;    // k per path, in path order
    std::vector<double> peak_heights;  // sup |X| over the matching interval
};

// The first k local-time increments between crossings, one batch per path,
// collected with no horizon. Completed increments inside a fixed window are
// inspection-biased low, so the law checks need this unconditioned sample;
// the far-field blocks keep the expected work finite even though the
// crossing times themselves have infinite mean.
FirstIncrements flip_first_increments(const PrbmParams& params, const SidedReal& x0,
                                      std::size_t k_per_path, std::size_t n_paths,
                                      double dt, const RngStream& base,
                                      unsigned threads);

// Fraction of speed-and-scale paths from x (plus side) that reach 0- before
// the level y; the race is decided on the driving path.
double hitting_frequency(const PrbmParams& params, double x, double y, double dt,
                         std::size_t n_paths, const RngStream& base, unsigned threads);

struct ResidualStats {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

// Ensemble mean and standard error of
//   f(X_t) - f(X_0) - int_0^t (sigma^2/2) f''(X_s) ds  (trapezoid in s)
// over flip-sampler paths on the full dt grid, one entry per test function.
std::vector<ResidualStats> martingale_residual_mc(
    const PrbmParams& params, const SidedReal& x0, double t, double dt,
    std::size_t n_paths, const std::vector<TestFunction>& fs, const RngStream& base,
    unsigned threads);

}  // namespace prbm
