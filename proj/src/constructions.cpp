#include "prbm/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "prbm/parallel.hpp"
#include "prbm/path_engine.hpp"
#include "prbm/sided.hpp"

namespace prbm {

namespace {

// Far-field blocks are sized so that reaching the nearest boundary within
// one block is an 8-sigma event; such blocks carry no active time (speed and
// scale) or no regulator growth (flip), so skipping through them leaves the
// law at the recorded times unchanged.
constexpr double kFarSigmas = 8.0;

std::size_t step_count(double dt, double T) {
    if (!(dt > 0.0) || !(T >= dt))
        throw std::invalid_argument("sampler: need dt > 0 and T >= dt");
    return static_cast<std::size_t>(T / dt + 0.5);
}

void require_finite_gamma(const PrbmParams& params) {
    params.validate();
    if (!params.finite_gamma())
        throw std::invalid_argument(
            "sampler: gamma must lie in (0, inf); use the exact sampler for 0 / inf");
}

inline SidedReal r_of_band(double b, double c) {
    if (b > c) return SidedReal(b - c, Side::plus);
    if (b < -c) return SidedReal(-b - c, Side::minus);
    return b >= 0.0 ? origin_plus() : origin_minus();
}

// Speed-and-scale driving walk. on_active(k, x) fires at k = 0 with x0 and
// whenever the active clock reaches k dt, k = 1..n_active. A step credits
// the clock with a full dt when both endpoints sit outside the band and
// half a dt when they straddle it; the one-endpoint rule runs the clock
// measurably fast near the boundary (the t = 0.25 marginals fail their KS
// gate at dt = 1e-4), the symmetric rule does not. The clock is kept in
// integer half-steps, so grid alignment is exact.
template <class F>
void speed_scale_walk(const PrbmParams& params, const SidedReal& x0, double dt,
                      std::size_t n_active, const RngStream& rng, bool coarse,
                      F&& on_active) {
    const double gamma = params.gamma;
    const double sigma = params.sigma;
    const double c = params.band_half_width();
    const double sdt = sigma * std::sqrt(dt);
    const double far = kFarSigmas * sigma * std::sqrt(2.0 * dt);
    double b = scale_r_inv(x0, gamma);
    NormalSource normals(rng);
    on_active(std::size_t{0}, x0);
    std::size_t k = 0;
    std::uint64_t half_steps = 0;  // active clock in units of dt/2
    bool prev_out = std::abs(b) > c;
    while (k < n_active) {
        const double margin = c - std::abs(b);
        if (coarse && margin > far) {
            b += margin / kFarSigmas * normals();
            prev_out = false;
            continue;
        }
        b += sdt * normals();
        const bool out = std::abs(b) > c;
        if (out || prev_out) {
            half_steps += (out && prev_out) ? 2 : 1;
            if (half_steps >= 2 * (k + 1)) on_active(++k, r_of_band(b, c));
        }
        prev_out = out;
    }
}

// Flip-construction walk: driving path f, regulator l = sup (f)^-, W = f+l,
// side parity advanced through the Poisson levels. on_point(t, w, minus, l)
// fires at t = 0 and after every committed step. In coarse mode, steps are
// clipped so that every entry of `must_hit` (sorted, ending at T) is landed
// on exactly.
template <class F>
void flip_walk(const PrbmParams& params, double w0, Side side0, double dt, double T,
               const RngStream& rng, bool coarse, const std::vector<double>& must_hit,
               F&& on_point) {
    const double gamma = params.gamma;
    const double sigma = params.sigma;
    const double far = kFarSigmas * sigma * std::sqrt(2.0 * dt);
    double f = w0;
    double l = 0.0;
    double w = w0;
    bool minus = (side0 == Side::minus);
    NormalSource normals(rng);
    std::uint64_t level_draw = 0;
    double next_level = rng.exponential(kCounterSplit + level_draw++) / gamma;
    on_point(0.0, w, minus, l);

    auto commit = [&](double h) {
        f += sigma * std::sqrt(h) * normals();
        if (-f > l) {
            l = -f;
            while (l >= next_level) {
                minus = !minus;
                next_level += rng.exponential(kCounterSplit + level_draw++) / gamma;
            }
        }
        w = f + l;
    };

    if (!coarse) {
        const std::size_t n = step_count(dt, T);
        for (std::size_t k = 1; k <= n; ++k) {
            commit(dt);
            on_point(static_cast<double>(k) * dt, w, minus, l);
        }
        return;
    }

    double t = 0.0;
    std::size_t hit = 0;
    const double tol = 0.25 * dt;
    while (t < T - tol) {
        while (hit < must_hit.size() && must_hit[hit] <= t + tol) ++hit;
        const double lim = (hit < must_hit.size() ? must_hit[hit] : T) - t;
        double h = dt;
        if (w > far) {
            const double block = w / (kFarSigmas * sigma);
            h = std::max(dt, block * block);
        }
        h = std::min(h, lim);
        commit(h);
        t += h;
        on_point(t, w, minus, l);
    }
}

}  // namespace

SidedPath simulate_speed_scale(const PrbmParams& params, const SidedReal& x0, double dt,
                               double T, const RngStream& rng) {
    require_finite_gamma(params);
    const std::size_t n = step_count(dt, T);
    SidedPath p;
    p.params = params;
    p.step = dt;
    p.times.resize(n + 1);
    p.values.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) p.times[k] = static_cast<double>(k) * dt;
    speed_scale_walk(params, x0, dt, n, rng, /*coarse=*/false,
                     [&](std::size_t k, const SidedReal& x) { p.values[k] = x; });
    return p;
}

SidedPath simulate_flip(const PrbmParams& params, const SidedReal& x0, double dt,
                        double T, const RngStream& rng) {
    require_finite_gamma(params);
    const std::size_t n = step_count(dt, T);
    SidedPath p;
    p.params = params;
    p.step = dt;
    p.times.reserve(n + 1);
    p.values.reserve(n + 1);
    p.local_time.emplace();
    p.local_time->reserve(n + 1);
    flip_walk(params, x0.magnitude, x0.side, dt, T, rng, /*coarse=*/false, {},
              [&](double t, double w, bool minus, double l) {
                  p.times.push_back(t);
                  p.values.emplace_back(w, minus ? Side::minus : Side::plus);
                  p.local_time->push_back(l);
              });
    return p;
}

SidedPath simulate_exact(const PrbmParams& params, const SidedReal& x0,
                         const std::vector<double>& times, const RngStream& rng) {
    params.validate();
    if (times.empty() || times.front() != 0.0)
        throw std::invalid_argument("simulate_exact: grid must start at 0");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw std::invalid_argument("simulate_exact: grid must increase strictly");
    SidedPath p;
    p.params = params;
    p.times = times;
    p.values.resize(times.size());
    p.values[0] = x0;
    for (std::size_t k = 1; k < times.size(); ++k)
        p.values[k] = sample_transition(params, times[k] - times[k - 1], p.values[k - 1],
                                        rng, k - 1);
    return p;
}

std::vector<double> crossing_times(const SidedPath& p) {
    std::vector<double> out;
    if (p.values.empty()) return out;
    Side held = p.values.front().side;
    for (std::size_t k = 1; k < p.values.size(); ++k) {
        if (p.values[k].side != held) {
            out.push_back(p.times[k]);
            held = p.values[k].side;
        }
    }
    return out;
}

std::vector<double> local_time_increments(const SidedPath& p) {
    if (!p.local_time)
        throw std::invalid_argument(
            "local_time_increments: path carries no local-time coordinate");
    const std::vector<double>& l = *p.local_time;
    std::vector<double> out;
    Side held = p.values.front().side;
    double last = l.front();
    for (std::size_t k = 1; k < p.values.size(); ++k) {
        if (p.values[k].side != held) {
            out.push_back(l[k] - last);
            last = l[k];
            held = p.values[k].side;
        }
    }
    return out;
}

std::vector<std::vector<double>> ensemble_snapshots(
    SamplerKind kind, const PrbmParams& params, const SidedReal& x0,
    const std::vector<double>& snapshot_times, double dt, std::size_t n_paths,
    const RngStream& base, unsigned threads, bool coarse_far_field) {
    if (snapshot_times.empty())
        throw std::invalid_argument("ensemble_snapshots: need snapshot times");
    if (kind == SamplerKind::flip) {
        return flip_ensemble(params, x0, snapshot_times, dt, n_paths, base, threads,
                             coarse_far_field)
            .snapshots;
    }
    const std::size_t s_count = snapshot_times.size();
    std::vector<std::vector<double>> out(s_count, std::vector<double>(n_paths));

    if (kind == SamplerKind::exact) {
        params.validate();
        parallel_for(n_paths, threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                RngStream rng = base.substream(i);
                SidedReal x = x0;
                double t_prev = 0.0;
                for (std::size_t s = 0; s < s_count; ++s) {
                    x = sample_transition(params, snapshot_times[s] - t_prev, x, rng, s);
                    t_prev = snapshot_times[s];
                    out[s][i] = x.projection();
                }
            }
        });
        return out;
    }

    require_finite_gamma(params);
    // active-step indices of the snapshots
    std::vector<std::size_t> targets(s_count);
    for (std::size_t s = 0; s < s_count; ++s) {
        targets[s] = static_cast<std::size_t>(snapshot_times[s] / dt + 0.5);
        if (std::abs(static_cast<double>(targets[s]) * dt - snapshot_times[s]) > 0.25 * dt)
            throw std::invalid_argument("ensemble_snapshots: snapshots must sit on the dt grid");
    }
    const std::size_t n_active = targets.back();
    parallel_for(n_paths, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            std::size_t s = 0;
            speed_scale_walk(params, x0, dt, n_active, base.substream(i), coarse_far_field,
                             [&](std::size_t k, const SidedReal& x) {
                                 while (s < s_count && k == targets[s])
                                     out[s++][i] = x.projection();
                             });
        }
    });
    return out;
}

FlipEnsembleStats flip_ensemble(const PrbmParams& params, const SidedReal& x0,
                                const std::vector<double>& snapshot_times, double dt,
                                std::size_t n_paths, const RngStream& base,
                                unsigned threads, bool coarse_far_field) {
    require_finite_gamma(params);
    if (snapshot_times.empty())
        throw std::invalid_argument("flip_ensemble: need snapshot times");
    const std::size_t s_count = snapshot_times.size();
    const double T = snapshot_times.back();
    const double tol = 0.25 * dt;

    FlipEnsembleStats st;
    st.snapshots.assign(s_count, std::vector<double>(n_paths));
    st.local_time_t1.assign(n_paths, 0.0);
    st.crossings_by_t1.assign(n_paths, 0);

    parallel_for(n_paths, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            std::size_t s = 0;
            bool prev_minus = (x0.side == Side::minus);
            flip_walk(params, x0.magnitude, x0.side, dt, T, base.substream(i),
                      coarse_far_field, snapshot_times,
                      [&](double t, double w, bool minus, double l) {
                          if (minus != prev_minus) {
                              prev_minus = minus;
                              if (t <= 1.0 + tol) ++st.crossings_by_t1[i];
                          }
                          if (s < s_count && t >= snapshot_times[s] - tol) {
                              st.snapshots[s][i] = minus ? -w : w;
                              if (std::abs(snapshot_times[s] - 1.0) < tol)
                                  st.local_time_t1[i] = l;
                              ++s;
                          }
                      });
        }
    });
    return st;
}

FirstIncrements flip_first_increments(const PrbmParams& params, const SidedReal& x0,
                                      std::size_t k_per_path, std::size_t n_paths,
                                      double dt, const RngStream& base,
                                      unsigned threads) {
    require_finite_gamma(params);
    if (k_per_path == 0) throw std::invalid_argument("flip_first_increments: k must be >= 1");
    const double gamma = params.gamma;
    const double sigma = params.sigma;
    const double sdt = sigma * std::sqrt(dt);
    const double far = kFarSigmas * sigma * std::sqrt(2.0 * dt);

    FirstIncrements out;
    out.increments.assign(k_per_path * n_paths, 0.0);
    out.peak_heights.assign(k_per_path * n_paths, 0.0);

    parallel_for(n_paths, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const RngStream rng = base.substream(i);
            NormalSource normals(rng);
            std::uint64_t level_draw = 0;
            double next_level = rng.exponential(kCounterSplit + level_draw++) / gamma;
            double f = x0.magnitude, l = 0.0, w = x0.magnitude;
            double l_last = 0.0, peak = w;
            std::size_t done = 0;
            while (done < k_per_path) {
                if (w > far)
                    f += w / kFarSigmas * normals();
                else
                    f += sdt * normals();
                bool flipped = false;
                if (-f > l) {
                    l = -f;
                    while (l >= next_level) {
                        flipped = !flipped;
                        next_level +=
                            rng.exponential(kCounterSplit + level_draw++) / gamma;
                    }
                }
                w = f + l;
                peak = std::max(peak, w);
                if (flipped) {
                    out.increments[i * k_per_path + done] = l - l_last;
                    out.peak_heights[i * k_per_path + done] = peak;
                    l_last = l;
                    peak = w;
                    ++done;
                }
            }
        }
    });
    return out;
}

double hitting_frequency(const PrbmParams& params, double x, double y, double dt,
                         std::size_t n_paths, const RngStream& base, unsigned threads) {
    require_finite_gamma(params);
    if (!(0.0 < x && x < y)) throw std::invalid_argument("hitting_frequency: need 0 < x < y");
    const double c = params.band_half_width();
    const double sigma = params.sigma;
    const double sdt = sigma * std::sqrt(dt);
    const double far = kFarSigmas * sigma * std::sqrt(2.0 * dt);
    const double lower = -c, upper = y + c;
    std::vector<std::uint8_t> hit(n_paths, 0);
    parallel_for(n_paths, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            NormalSource normals(base.substream(i));
            double b = x + c;
            for (;;) {
                const double margin = std::min(b - lower, upper - b);
                if (margin > far)
                    b += margin / kFarSigmas * normals();
                else
                    b += sdt * normals();
                if (b < lower) {
                    hit[i] = 1;
                    break;
                }
                if (b > upper) break;
            }
        }
    });
    std::size_t n_hit = 0;
    for (std::uint8_t h : hit) n_hit += h;
    return static_cast<double>(n_hit) / static_cast<double>(n_paths);
}

std::vector<ResidualStats> martingale_residual_mc(
    const PrbmParams& params, const SidedReal& x0, double t, double dt,
    std::size_t n_paths, const std::vector<TestFunction>& fs, const RngStream& base,
    unsigned threads) {
    require_finite_gamma(params);
    const std::size_t nf = fs.size();
    std::vector<double> residual(n_paths * nf);
    const double half_s2 = 0.5 * params.sigma * params.sigma;

    parallel_for(n_paths, threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> integral(nf), prev_g(nf), f0(nf);
        for (std::size_t i = lo; i < hi; ++i) {
            std::fill(integral.begin(), integral.end(), 0.0);
            bool first = true;
            SidedReal last_x = x0;
            flip_walk(params, x0.magnitude, x0.side, dt, t, base.substream(i),
                      /*coarse=*/false, {},
                      [&](double, double w, bool minus, double) {
                          const SidedReal x(w, minus ? Side::minus : Side::plus);
                          for (std::size_t j = 0; j < nf; ++j) {
                              const double g = half_s2 * fs[j].deriv2(x);
                              if (first) {
                                  f0[j] = fs[j].value(x);
                              } else {
                                  integral[j] += 0.5 * dt * (prev_g[j] + g);
                              }
                              prev_g[j] = g;
                          }
                          first = false;
                          last_x = x;
                      });
            for (std::size_t j = 0; j < nf; ++j)
                residual[i * nf + j] = fs[j].value(last_x) - f0[j] - integral[j];
        }
    });

    std::vector<ResidualStats> out(nf);
    for (std::size_t j = 0; j < nf; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n_paths; ++i) sum += residual[i * nf + j];
        const double mean = sum / static_cast<double>(n_paths);
        double ss = 0.0;
        for (std::size_t i = 0; i < n_paths; ++i) {
            const double d = residual[i * nf + j] - mean;
            ss += d * d;
        }
        out[j].mean = mean;
        out[j].n = n_paths;
        out[j].se = std::sqrt(ss / (static_cast<double>(n_paths) - 1.0) /
                              static_cast<double>(n_paths));
    }
    return out;
}

}  // namespace prbm
