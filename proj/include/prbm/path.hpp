#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "prbm/params.hpp"
#include "prbm/sided.hpp"

namespace prbm {

// Real-valued trajectory on a time grid, times[0] = 0. Uniform grids carry
// the nominal step in `step`; non-uniform grids (exact-kernel stepping) set
// step = 0.
struct Path {
    std::vector<double> times;
    std::vector<double> values;
    double step = 0.0;

    std::size_t size() const { return times.size(); }

    void check() const {
        if (times.size() != values.size())
            throw std::invalid_argument("Path: times/values length mismatch");
        if (!times.empty() && times.front() != 0.0)
            throw std::invalid_argument("Path: grid must start at 0");
        for (std::size_t k = 1; k < times.size(); ++k)
            if (!(times[k] > times[k - 1]))
                throw std::invalid_argument("Path: grid must be strictly increasing");
    }
};

// Doubled-line trajectory. `local_time` is present when the construction
// tracks the regulator (the flip sampler); samplers that cannot produce a
// pathwise local time leave it empty.
struct SidedPath {
    std::vector<double> times;
    std::vector<SidedReal> values;
    PrbmParams params;
    double step = 0.0;
    std::optional<std::vector<double>> local_time;

    std::size_t size() const { return times.size(); }
};

// Right-continuous step function: value values[k] holds on [times[k],
// times[k+1]). Event-driven walks are stored this way and densified on
// demand.
struct JumpPath {
    std::vector<double> times;   // times[0] = 0, strictly increasing
    std::vector<double> values;  // one per jump time
    double horizon = 0.0;

    std::size_t size() const { return times.size(); }

    double value_at(double t) const {
        if (times.empty() || t < times.front())
            throw std::invalid_argument("JumpPath: query before start");
        // binary search for the last jump time <= t
        std::size_t lo = 0, hi = times.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi + 1) / 2;
            if (times[mid] <= t) lo = mid; else hi = mid - 1;
        }
        return values[lo];
    }

    Path densify(double dt) const {
        Path p;
        p.step = dt;
        std::size_t n = static_cast<std::size_t>(horizon / dt + 0.5);
        p.times.reserve(n + 1);
        p.values.reserve(n + 1);
        std::size_t j = 0;
        for (std::size_t k = 0; k <= n; ++k) {
            double t = static_cast<double>(k) * dt;
            while (j + 1 < times.size() && times[j + 1] <= t) ++j;
            p.times.push_back(t);
            p.values.push_back(values[j]);
        }
        return p;
    }
};

}  // namespace prbm
