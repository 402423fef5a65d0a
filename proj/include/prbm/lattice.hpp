#pragma once

#include <cstdint>
#include <vector>

#include "prbm/path.hpp"
#include "prbm/rng.hpp"

namespace prbm {

// Continuous-time walk on E (Z for even K, Z \ {0} for odd K) with the K
// attenuated edges around the origin. Positions and times are handled in
// diffusive rescaling: X_n(t) = xi_n(n t) / sqrt(n).
struct LatticeConfig {
    int K = 2;            // barrier width (number of attenuated edges)
    double m = 1.0;       // migration rate
    double c_n = 0.1;     // attenuation of the barrier edges
    std::uint64_t n = 100;  // scaling index
    long long x0 = 1;     // start site, in E

    void validate() const;
    bool odd() const { return K % 2 != 0; }
    // outermost site whose outgoing inward edge is attenuated
    long long inside_radius() const { return (K + 1) / 2; }
    bool in_state_space(long long i) const { return !odd() || i != 0; }
    bool inside_barrier(long long i) const {
        return in_state_space(i) && std::abs(i) <= inside_radius();
    }
};

// q_n(i, j): m/2 on plain nearest-neighbour edges, c_n m/2 on the K
// attenuated edges (including the {+1, -1} hop when K is odd), 0 otherwise.
double jump_rates(const LatticeConfig& cfg, long long i, long long j);

// Event-driven walk (exponential holding times, jump picked proportionally
// to the rates), returned as the rescaled right-continuous step function on
// [0, T].
JumpPath simulate_walk(const LatticeConfig& cfg, double T, const RngStream& rng);

struct CrossingParam {
    double p = 0.0;
    bool exact = false;  // exact closed form (K = 2) vs asymptotic c_n / K
};

// Parameter of the geometric number of barrier visits up to the first
// crossing: c_n / (2 (1 + c_n)) for K = 2, asymptotically c_n / K otherwise.
CrossingParam crossing_geometric_param(const LatticeConfig& cfg);

// Expected rescaled time to exit the barrier interior {|i| <= inside_radius}
// from site i, by solving the Markov exit-time identities.
double expected_exit_time(const LatticeConfig& cfg, long long site);

struct Decomposition {
    JumpPath m_n;   // martingale part
    JumpPath l_n;   // exit counter (1/sqrt n per completed visit)
    JumpPath v_n;   // running sup of (r_out - M_n)^+
    JumpPath nu_n;  // occupation time of the barrier interior
};

// Reconstructs the visit times and the martingale decomposition of the
// rescaled walk. All four outputs share the walk's jump times; nu_n grows
// linearly inside dwell intervals and is exact at the recorded times.
Decomposition decompose(const JumpPath& p, const LatticeConfig& cfg);

// Occupation time of the barrier interior up to time t (exact integral).
double occupation_time(const JumpPath& p, const LatticeConfig& cfg, double t);

// Indices into p.times of the sign crossings: the first times the walk sits
// strictly beyond the barrier interior on the side opposite to the one held
// at the previous crossing.
std::vector<std::size_t> walk_crossing_indices(const JumpPath& p, const LatticeConfig& cfg);

// One embedded-chain barrier visit entered at +inside_radius; true if it
// ends by exiting on the opposite side. Advances `ctr` as it draws.
bool visit_crossing_sample(const LatticeConfig& cfg, const RngStream& rng,
                           std::uint64_t& ctr);

// One rescaled exit time from the barrier interior started at `site`.
double exit_time_sample(const LatticeConfig& cfg, long long site, const RngStream& rng,
                        std::uint64_t& ctr);

// The first k local-time increments between crossings, one batch per path,
// from a walk reflected at |site| = reflect_radius. Crossing times have
// infinite mean, so unconditioned sampling needs the confinement; the
// geometric per-visit crossing mechanism at the barrier, and with it the
// increment law, is untouched by what the walk does far away.
std::vector<double> lattice_first_increments(const LatticeConfig& cfg,
                                             std::size_t k_per_path,
                                             std::size_t n_paths,
                                             long long reflect_radius,
                                             const RngStream& base, unsigned threads);

}  // namespace prbm
