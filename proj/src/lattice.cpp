#include "prbm/lattice.hpp"

#include "prbm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prbm {

namespace {

bool attenuated_edge(const LatticeConfig& cfg, long long i, long long j) {
    const long long hi = std::max(std::abs(i), std::abs(j));
    if (cfg.odd()) {
        if ((i == 1 && j == -1) || (i == -1 && j == 1)) return true;
        return std::abs(i - j) == 1 && hi <= (cfg.K + 1) / 2;
    }
    return std::abs(i - j) == 1 && hi <= cfg.K / 2;
}

bool neighbours(const LatticeConfig& cfg, long long i, long long j) {
    if (!cfg.odd()) return std::abs(i - j) == 1;
    if ((i == 1 && j == -1) || (i == -1 && j == 1)) return true;
    return std::abs(i - j) == 1 && i != 0 && j != 0;
}

// The two sites reachable from i.
void neighbour_pair(const LatticeConfig& cfg, long long i, long long out[2]) {
    if (cfg.odd() && i == 1) {
        out[0] = -1;
        out[1] = 2;
    } else if (cfg.odd() && i == -1) {
        out[0] = -2;
        out[1] = 1;
    } else {
        out[0] = i - 1;
        out[1] = i + 1;
    }
}

// Dense solve of the exit-time identities sum_j q(i,j) (H(j) - H(i)) = -1
// over the barrier interior, H = 0 outside. Returns natural-time values
// indexed by site + inside_radius.
std::vector<double> exit_time_table(const LatticeConfig& cfg) {
    const long long s = cfg.inside_radius();
    std::vector<long long> sites;
    for (long long i = -s; i <= s; ++i)
        if (cfg.in_state_space(i)) sites.push_back(i);
    const std::size_t d = sites.size();
    auto idx = [&](long long i) -> std::ptrdiff_t {
        auto it = std::lower_bound(sites.begin(), sites.end(), i);
        if (it == sites.end() || *it != i) return -1;
        return it - sites.begin();
    };
    std::vector<double> A(d * d, 0.0), rhs(d, -1.0);
    for (std::size_t r = 0; r < d; ++r) {
        long long nb[2];
        neighbour_pair(cfg, sites[r], nb);
        for (long long j : {nb[0], nb[1]}) {
            const double q = jump_rates(cfg, sites[r], j);
            A[r * d + r] -= q;
            const std::ptrdiff_t cj = idx(j);
            if (cj >= 0) A[r * d + cj] += q;
        }
    }
    // Gaussian elimination with partial pivoting; d <= K + 2 keeps it tiny.
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < d; ++r)
            if (std::abs(A[r * d + col]) > std::abs(A[piv * d + col])) piv = r;
        if (piv != col) {
            for (std::size_t cc = 0; cc < d; ++cc) std::swap(A[col * d + cc], A[piv * d + cc]);
            std::swap(rhs[col], rhs[piv]);
        }
        const double p = A[col * d + col];
        for (std::size_t r = col + 1; r < d; ++r) {
            const double f = A[r * d + col] / p;
            if (f == 0.0) continue;
            for (std::size_t cc = col; cc < d; ++cc) A[r * d + cc] -= f * A[col * d + cc];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> H(d);
    for (std::size_t r = d; r-- > 0;) {
        double v = rhs[r];
        for (std::size_t cc = r + 1; cc < d; ++cc) v -= A[r * d + cc] * H[cc];
        H[r] = v / A[r * d + r];
    }
    return H;
}

}  // namespace

void LatticeConfig::validate() const {
    if (K < 1) throw std::invalid_argument("LatticeConfig: K must be >= 1");
    if (!(m > 0.0)) throw std::invalid_argument("LatticeConfig: m must be > 0");
    if (!(c_n > 0.0 && c_n <= 1.0))
        throw std::invalid_argument("LatticeConfig: c_n must lie in (0, 1]");
    if (n < 1) throw std::invalid_argument("LatticeConfig: n must be >= 1");
    if (!in_state_space(x0))
        throw std::invalid_argument("LatticeConfig: x0 = 0 is not a site when K is odd");
}

double jump_rates(const LatticeConfig& cfg, long long i, long long j) {
    cfg.validate();
    if (!cfg.in_state_space(i) || !cfg.in_state_space(j) || i == j)
        throw std::invalid_argument("jump_rates: sites must be distinct elements of E");
    if (!neighbours(cfg, i, j)) return 0.0;
    return attenuated_edge(cfg, i, j) ? cfg.c_n * cfg.m / 2.0 : cfg.m / 2.0;
}

JumpPath simulate_walk(const LatticeConfig& cfg, double T, const RngStream& rng) {
    cfg.validate();
    if (!(T > 0.0)) throw std::invalid_argument("simulate_walk: T must be > 0");
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(cfg.n));
    const double nn = static_cast<double>(cfg.n);
    JumpPath p;
    p.horizon = T;
    p.times.push_back(0.0);
    p.values.push_back(static_cast<double>(cfg.x0) * inv_sqrt_n);
    long long site = cfg.x0;
    double t = 0.0;
    std::uint64_t ev = 0;
    for (;;) {
        long long nb[2];
        neighbour_pair(cfg, site, nb);
        const double r0 = attenuated_edge(cfg, site, nb[0]) ? cfg.c_n * cfg.m / 2.0
                                                            : cfg.m / 2.0;
        const double r1 = attenuated_edge(cfg, site, nb[1]) ? cfg.c_n * cfg.m / 2.0
                                                            : cfg.m / 2.0;
        const double total = r0 + r1;
        double u_hold, u_sel;
        rng.uniform_pair(ev++, u_hold, u_sel);
        t += -std::log(u_hold) / (nn * total);  // rescaled holding time
        if (t >= T) break;
        site = (u_sel * total < r0) ? nb[0] : nb[1];
        p.times.push_back(t);
        p.values.push_back(static_cast<double>(site) * inv_sqrt_n);
    }
    return p;
}

CrossingParam crossing_geometric_param(const LatticeConfig& cfg) {
    cfg.validate();
    if (cfg.K == 2) return CrossingParam{cfg.c_n / (2.0 * (1.0 + cfg.c_n)), true};
    return CrossingParam{cfg.c_n / static_cast<double>(cfg.K), false};
}

double expected_exit_time(const LatticeConfig& cfg, long long site) {
    cfg.validate();
    if (!cfg.inside_barrier(site))
        throw std::invalid_argument("expected_exit_time: site lies outside the barrier");
    const std::vector<double> H = exit_time_table(cfg);
    const long long s = cfg.inside_radius();
    std::size_t pos = 0;
    for (long long i = -s; i <= s; ++i) {
        if (!cfg.in_state_space(i)) continue;
        if (i == site) break;
        ++pos;
    }
    return H[pos] / static_cast<double>(cfg.n);
}

Decomposition decompose(const JumpPath& p, const LatticeConfig& cfg) {
    cfg.validate();
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(cfg.n));
    const double r_in = static_cast<double>(cfg.inside_radius()) * inv_sqrt_n;
    const double r_out = r_in + inv_sqrt_n;
    const double tol = 0.5 * inv_sqrt_n;
    const std::size_t n_ev = p.times.size();
    if (n_ev == 0) throw std::invalid_argument("decompose: empty path");

    Decomposition d;
    for (JumpPath* q : {&d.m_n, &d.l_n, &d.v_n, &d.nu_n}) {
        q->times = p.times;
        q->horizon = p.horizon;
        q->values.resize(n_ev);
    }

    auto site_of = [&](double v) -> long long {
        const double s = v / inv_sqrt_n;
        const long long site = std::llround(s);
        if (std::abs(s - static_cast<double>(site)) > 1e-6 || !cfg.in_state_space(site))
            throw std::invalid_argument("decompose: path does not live on the walk's lattice");
        return site;
    };

    double m_cur = std::abs(p.values[0]);
    double l_cur = 0.0, v_cur = 0.0, nu_cur = 0.0;
    v_cur = std::max(0.0, r_out - m_cur);
    d.m_n.values[0] = m_cur;
    d.l_n.values[0] = l_cur;
    d.v_n.values[0] = v_cur;
    d.nu_n.values[0] = nu_cur;
    long long prev_site = site_of(p.values[0]);
    for (std::size_t k = 1; k < n_ev; ++k) {
        const long long site = site_of(p.values[k]);
        const bool pre_inside = std::abs(p.values[k - 1]) <= r_in + tol;
        const bool post_inside = std::abs(p.values[k]) <= r_in + tol;
        if (!neighbours(cfg, prev_site, site))
            throw std::invalid_argument("decompose: path takes an illegal jump");
        if (pre_inside) nu_cur += p.times[k] - p.times[k - 1];
        if (!pre_inside)
            m_cur += std::abs(p.values[k]) - std::abs(p.values[k - 1]);
        if (pre_inside && !post_inside) l_cur += inv_sqrt_n;
        v_cur = std::max(v_cur, r_out - m_cur);
        d.m_n.values[k] = m_cur;
        d.l_n.values[k] = l_cur;
        d.v_n.values[k] = v_cur;
        d.nu_n.values[k] = nu_cur;
        prev_site = site;
    }
    return d;
}

double occupation_time(const JumpPath& p, const LatticeConfig& cfg, double t) {
    cfg.validate();
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(cfg.n));
    const double r_in = static_cast<double>(cfg.inside_radius()) * inv_sqrt_n;
    const double tol = 0.5 * inv_sqrt_n;
    double acc = 0.0;
    for (std::size_t k = 0; k < p.times.size(); ++k) {
        const double seg_end = (k + 1 < p.times.size()) ? p.times[k + 1] : p.horizon;
        const double a = std::min(p.times[k], t);
        const double b = std::min(std::min(seg_end, p.horizon), t);
        if (b <= a) continue;
        if (std::abs(p.values[k]) <= r_in + tol) acc += b - a;
    }
    return acc;
}

std::vector<std::size_t> walk_crossing_indices(const JumpPath& p, const LatticeConfig& cfg) {
    cfg.validate();
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(cfg.n));
    const double r_in = static_cast<double>(cfg.inside_radius()) * inv_sqrt_n;
    const double tol = 0.5 * inv_sqrt_n;
    std::vector<std::size_t> out;
    if (p.values.empty()) return out;
    double held = p.values[0] >= 0.0 ? 1.0 : -1.0;
    for (std::size_t k = 1; k < p.values.size(); ++k) {
        if (held * p.values[k] < -(r_in + tol)) {
            out.push_back(k);
            held = -held;
        }
    }
    return out;
}

bool visit_crossing_sample(const LatticeConfig& cfg, const RngStream& rng,
                           std::uint64_t& ctr) {
    cfg.validate();
    const long long s = cfg.inside_radius();
    long long site = s;
    for (;;) {
        long long nb[2];
        neighbour_pair(cfg, site, nb);
        const double r0 = jump_rates(cfg, site, nb[0]);
        const double r1 = jump_rates(cfg, site, nb[1]);
        site = (rng.uniform(ctr++) * (r0 + r1) < r0) ? nb[0] : nb[1];
        if (std::abs(site) > s) return site < 0;
    }
}

std::vector<double> lattice_first_increments(const LatticeConfig& cfg,
                                             std::size_t k_per_path,
                                             std::size_t n_paths,
                                             long long reflect_radius,
                                             const RngStream& base, unsigned threads) {
    cfg.validate();
    const long long s_in = cfg.inside_radius();
    if (reflect_radius <= s_in + 1)
        throw std::invalid_argument("lattice_first_increments: radius too small");
    if (std::abs(cfg.x0) > reflect_radius)
        throw std::invalid_argument("lattice_first_increments: x0 outside the box");
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(cfg.n));
    std::vector<double> out(k_per_path * n_paths, 0.0);
    parallel_for(n_paths, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const RngStream rng = base.substream(i);
            std::uint64_t ctr = 0;
            long long site = cfg.x0;
            double sign = site >= 0 ? 1.0 : -1.0;
            double l = 0.0, l_last = 0.0;
            bool inside_prev = std::abs(site) <= s_in;
            std::size_t done = 0;
            while (done < k_per_path) {
                long long nb[2];
                neighbour_pair(cfg, site, nb);
                double r0 = attenuated_edge(cfg, site, nb[0]) ? cfg.c_n * cfg.m / 2.0
                                                              : cfg.m / 2.0;
                double r1 = attenuated_edge(cfg, site, nb[1]) ? cfg.c_n * cfg.m / 2.0
                                                              : cfg.m / 2.0;
                // reflect: suppress the outward edge at the box wall
                if (std::abs(nb[0]) > reflect_radius) r0 = 0.0;
                if (std::abs(nb[1]) > reflect_radius) r1 = 0.0;
                site = (rng.uniform(ctr++) * (r0 + r1) < r0) ? nb[0] : nb[1];
                const bool inside = std::abs(site) <= s_in;
                if (inside_prev && !inside) l += inv_sqrt_n;  // one completed visit
                inside_prev = inside;
                if (sign * static_cast<double>(site) < -static_cast<double>(s_in)) {
                    out[i * k_per_path + done] = l - l_last;
                    l_last = l;
                    sign = -sign;
                    ++done;
                }
            }
        }
    });
    return out;
}

double exit_time_sample(const LatticeConfig& cfg, long long site, const RngStream& rng,
                        std::uint64_t& ctr) {
    cfg.validate();
    if (!cfg.inside_barrier(site))
        throw std::invalid_argument("exit_time_sample: site lies outside the barrier");
    const long long s = cfg.inside_radius();
    const double nn = static_cast<double>(cfg.n);
    double t = 0.0;
    while (std::abs(site) <= s) {
        long long nb[2];
        neighbour_pair(cfg, site, nb);
        const double r0 = jump_rates(cfg, site, nb[0]);
        const double r1 = jump_rates(cfg, site, nb[1]);
        double u_hold, u_sel;
        rng.uniform_pair(ctr++, u_hold, u_sel);
        t += -std::log(u_hold) / (nn * (r0 + r1));
        site = (u_sel * (r0 + r1) < r0) ? nb[0] : nb[1];
    }
    return t;
}

}  // namespace prbm
