#include "prbm/suites.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include <json.hpp>

#include "prbm/constructions.hpp"
#include "prbm/kernel.hpp"
#include "prbm/lattice.hpp"
#include "prbm/pde.hpp"
#include "prbm/special.hpp"
#include "prbm/verify.hpp"
#include "prbm/version.hpp"

namespace prbm {

namespace {

struct Ctx {
    SuiteOptions opts;
    std::uint64_t suite_index = 0;

    RngStream stream(std::uint64_t ensemble) const {
        return RngStream{opts.seed, (suite_index << 40) + (ensemble << 32)};
    }
    void note(const char* msg) const {
        if (opts.progress) std::fprintf(stderr, "  .. %s\n", msg);
    }
};

std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i)
        v[i] = std::exp(a + (b - a) * static_cast<double>(i) / (n - 1));
    return v;
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

// ---------------------------------------------------------------- kernel --

SuiteResult suite_kernel_closed_form(const Ctx& ctx) {
    (void)ctx;
    SuiteResult r{"kernel_closed_form", {}, 0.0};
    const auto as = logspace(1e-3, 3.0, 10);
    const auto gs = logspace(1e-2, 1e2, 10);
    const auto ts = logspace(1e-2, 10.0, 10);
    double worst = 0.0;
    for (double a : as)
        for (double g : gs)
            for (double t : ts) {
                const double closed = barrier_integral(a, g, t);
                const double quad = barrier_integral_quadrature(a, g, t);
                worst = std::max(worst, std::abs(closed - quad) / quad);
            }
    r.verdicts.push_back({"barrier_closed_form_vs_quadrature/max_rel_err", worst,
                          kGate.kernel_rel_err, worst < kGate.kernel_rel_err});
    return r;
}

SuiteResult suite_kernel_identities(const Ctx& ctx) {
    (void)ctx;
    SuiteResult r{"kernel_identities", {}, 0.0};

    const double inf = infinite_gamma();
    const std::vector<double> gammas{0.0, 0.5, 1.0, 5.0, inf};
    const std::vector<double> times{0.1, 1.0, 4.0};
    const std::vector<SidedReal> starts{origin_plus(), origin_minus(),
                                        SidedReal(1.0, Side::plus),
                                        SidedReal(2.5, Side::minus)};
    double worst_norm = 0.0;
    for (double g : gammas)
        for (double t : times)
            for (const SidedReal& x : starts) {
                const PrbmParams p(g, 1.0);
                worst_norm = std::max(worst_norm,
                                      std::abs(normalization_integral(p, t, x) - 1.0));
            }
    r.verdicts.push_back({"normalization/max_abs_err", worst_norm,
                          kGate.normalization_tol, worst_norm < kGate.normalization_tol});

    const std::vector<SidedReal> pts{origin_plus(), origin_minus(),
                                     SidedReal(0.3, Side::plus), SidedReal(0.3, Side::minus),
                                     SidedReal(1.7, Side::plus), SidedReal(1.7, Side::minus)};
    double worst_sym = 0.0;
    for (double g : {0.7, 3.0})
        for (double t : {0.5, 2.0}) {
            const PrbmParams p(g, 1.0);
            for (const SidedReal& x : pts)
                for (const SidedReal& y : pts)
                    worst_sym = std::max(worst_sym,
                                         std::abs(transition_density(p, t, x, y) -
                                                  transition_density(p, t, y, x)));
        }
    r.verdicts.push_back({"symmetry/max_abs_err", worst_sym, kGate.symmetry_tol,
                          worst_sym < kGate.symmetry_tol});

    double worst_ck = 0.0;
    const PrbmParams pck(0.8, 1.0);
    const std::vector<std::pair<double, double>> splits{{0.5, 0.5}, {0.3, 0.7}};
    const std::vector<std::pair<SidedReal, SidedReal>> pairs{
        {origin_plus(), SidedReal(1.0, Side::plus)},
        {SidedReal(0.5, Side::plus), SidedReal(0.8, Side::minus)},
        {SidedReal(1.2, Side::minus), SidedReal(0.1, Side::minus)}};
    for (auto [s, t] : splits)
        for (const auto& [x, y] : pairs)
            worst_ck = std::max(worst_ck, chapman_kolmogorov_gap(pck, s, t, x, y));
    r.verdicts.push_back({"chapman_kolmogorov/max_abs_err", worst_ck,
                          kGate.chapman_kolmogorov_tol,
                          worst_ck < kGate.chapman_kolmogorov_tol});
    return r;
}

// -------------------------------------------------------------- samplers --

SuiteResult suite_sampler_triangle(const Ctx& ctx) {
    SuiteResult r{"sampler_triangle", {}, 0.0};
    const std::vector<double> snaps{0.25, 1.0, 4.0};
    const std::vector<double> gammas{0.2, 1.0, 5.0};
    const std::vector<SidedReal> starts{origin_plus(), SidedReal(1.0, Side::plus)};
    const std::size_t n = kGate.triangle_paths;
    std::uint64_t ensemble = 0;
    for (double g : gammas) {
        const PrbmParams params(g, 1.0);
        for (const SidedReal& x0 : starts) {
            ctx.note(("triangle gamma=" + fmt("%g", g) + " x0=" + to_string(x0)).c_str());
            auto ss = ensemble_snapshots(SamplerKind::speed_scale, params, x0, snaps,
                                         kGate.sampler_dt, n, ctx.stream(ensemble++),
                                         ctx.opts.threads);
            auto fl = ensemble_snapshots(SamplerKind::flip, params, x0, snaps,
                                         kGate.sampler_dt, n, ctx.stream(ensemble++),
                                         ctx.opts.threads);
            auto ex = ensemble_snapshots(SamplerKind::exact, params, x0, snaps,
                                         kGate.sampler_dt, n, ctx.stream(ensemble++),
                                         ctx.opts.threads);
            const std::string base =
                "triangle/gamma=" + fmt("%g", g) + "/x0=" + to_string(x0) + "/t=";
            for (std::size_t s = 0; s < snaps.size(); ++s) {
                const std::string head = base + fmt("%g", snaps[s]);
                struct PairCase {
                    const char* name;
                    const std::vector<double>*a, *b;
                } cases[3] = {{"/speed_vs_flip", &ss[s], &fl[s]},
                              {"/speed_vs_exact", &ss[s], &ex[s]},
                              {"/flip_vs_exact", &fl[s], &ex[s]}};
                for (const auto& c : cases) {
                    KsReport k = ks_two_sample(*c.a, *c.b, kGate.triangle_min_p);
                    r.verdicts.push_back(
                        {head + c.name, k.p_value, kGate.triangle_min_p, k.pass});
                }
            }
        }
    }
    return r;
}

SuiteResult suite_absolute_value_law(const Ctx& ctx) {
    SuiteResult r{"absolute_value_law", {}, 0.0};
    const PrbmParams params(1.0, 1.0);
    auto snaps = ensemble_snapshots(SamplerKind::speed_scale, params, origin_plus(),
                                    {1.0}, kGate.sampler_dt, kGate.abs_value_paths,
                                    ctx.stream(0), ctx.opts.threads);
    std::vector<double> abs_vals(snaps[0].size()), squares(snaps[0].size());
    for (std::size_t i = 0; i < snaps[0].size(); ++i) {
        abs_vals[i] = std::abs(snaps[0][i]);
        squares[i] = snaps[0][i] * snaps[0][i];
    }
    KsReport k = ks_statistic(std::move(abs_vals),
                              [](double x) { return x <= 0.0 ? 0.0 : std::erf(x * 0.7071067811865476); },
                              kGate.abs_value_ks);
    r.verdicts.push_back({"abs_value/ks_vs_half_normal", k.statistic, k.threshold, k.pass});
    MeanSe m = mean_se(squares);
    const double tol = kGate.se_multiplier * m.se;
    r.verdicts.push_back(
        {"abs_value/second_moment_minus_t", std::abs(m.mean - 1.0), tol,
         std::abs(m.mean - 1.0) < tol});
    return r;
}

SuiteResult suite_local_time_exponential(const Ctx& ctx) {
    SuiteResult r{"local_time_exponential", {}, 0.0};
    const PrbmParams params(1.0, 1.0);
    // two unconditioned increments per path; fixed-window samples would be
    // inspection-biased low
    FirstIncrements fi =
        flip_first_increments(params, origin_plus(), 2, kGate.increment_count / 2,
                              kGate.sampler_dt, ctx.stream(0), ctx.opts.threads);
    RateFit fit = exp_rate_fit(fi.increments);
    r.verdicts.push_back({"local_time/rate_ci_contains_gamma", fit.rate,
                          1.0, fit.contains(1.0)});
    KsReport k = ks_statistic(fi.increments, [](double x) { return 1.0 - std::exp(-x); },
                              kGate.local_time_ks);
    r.verdicts.push_back({"local_time/ks_vs_exp1", k.statistic, k.threshold, k.pass});
    return r;
}

SuiteResult suite_hitting_probability(const Ctx& ctx) {
    SuiteResult r{"hitting_probability", {}, 0.0};
    const PrbmParams params(1.0, 1.0);
    const double freq = hitting_frequency(params, 1.0, 2.0, kGate.sampler_dt,
                                          kGate.hitting_paths, ctx.stream(0),
                                          ctx.opts.threads);
    const double target = hitting_prob(1.0, 2.0, 1.0);  // 1/3
    const double se = std::sqrt(freq * (1.0 - freq) /
                                static_cast<double>(kGate.hitting_paths));
    const double tol = kGate.se_multiplier * se;
    r.verdicts.push_back({"hitting/freq_minus_one_third", std::abs(freq - target), tol,
                          std::abs(freq - target) < tol});
    return r;
}

SuiteResult suite_martingale_residual(const Ctx& ctx) {
    SuiteResult r{"martingale_residual", {}, 0.0};
    const PrbmParams params(1.0, 1.0);
    const double dt = kGate.sampler_dt;
    const double t = 1.0;
    auto family = test_function_family(params.gamma);
    auto stats = martingale_residual_mc(params, origin_plus(), t, dt,
                                        kGate.residual_paths, family, ctx.stream(0),
                                        ctx.opts.threads);
    for (std::size_t j = 0; j < family.size(); ++j) {
        const TestFunction& f = family[j];
        // Discretization allowance: the discrete regulator under-counts the
        // local time by ~0.5826 sigma sqrt(dt) (Asmussen-Glynn). That feeds
        // the residual through the flip-parity mass (gamma |f(0+)-f(0-)|),
        // the reflected-value shift near the origin (|f'(0)|), and the
        // curvature of f there (measured coefficient ~0.85, pinned at 1.2
        // with the sqrt(t) local-time scaling).
        const double delta_l = 0.5826 * params.sigma * std::sqrt(dt);
        const double jump_f = std::abs(f.value(origin_plus()) - f.value(origin_minus()));
        const double curv = std::max(std::abs(f.deriv2(origin_plus())),
                                     std::abs(f.deriv2(origin_minus())));
        const double allowance =
            delta_l * (params.gamma * jump_f + 0.8 * std::abs(f.beta) +
                       1.2 * std::sqrt(t) * curv);
        const double tol = kGate.se_multiplier * stats[j].se + allowance;
        r.verdicts.push_back({"martingale/f" + std::to_string(j + 1) + "_residual",
                              std::abs(stats[j].mean), tol,
                              std::abs(stats[j].mean) < tol});
    }
    return r;
}

// --------------------------------------------------------------- lattice --

SuiteResult suite_lattice_convergence(const Ctx& ctx) {
    SuiteResult r{"lattice_convergence", {}, 0.0};

    // Theorem scaling: K = 2, n = 1e4, c_n = 2 gamma / sqrt(n), x0 = 0.5 sqrt(n).
    LatticeConfig cfg;
    cfg.K = 2;
    cfg.m = 1.0;
    cfg.n = 10000;
    cfg.c_n = 0.02;
    cfg.x0 = 50;
    ctx.note("lattice ensemble n=1e4");
    std::vector<double> finals(kGate.lattice_paths);
    const RngStream base = ctx.stream(0);
    parallel_for(kGate.lattice_paths, ctx.opts.threads,
                 [&](std::size_t lo, std::size_t hi) {
                     for (std::size_t i = lo; i < hi; ++i) {
                         JumpPath p = simulate_walk(cfg, 1.0, base.substream(i));
                         finals[i] = p.values.back();
                     }
                 });
    const PrbmParams limit(1.0, 1.0);  // sigma^2 = m
    const SidedReal x0(0.5, Side::plus);
    KsReport k = ks_statistic(std::move(finals),
                              [&](double y) { return transition_cdf(limit, 1.0, x0, y); },
                              kGate.lattice_ks);
    r.verdicts.push_back({"lattice/ks_vs_exact_cdf", k.statistic, k.threshold, k.pass});

    // Geometric crossing parameter at K = 2, c_n = 0.1: p = 1/22.
    LatticeConfig geo = cfg;
    geo.c_n = 0.1;
    geo.n = 100;
    geo.x0 = 1;
    const RngStream gstream = ctx.stream(1);
    std::vector<std::uint8_t> crossed(kGate.visit_count);
    parallel_for(kGate.visit_count, ctx.opts.threads,
                 [&](std::size_t lo, std::size_t hi) {
                     for (std::size_t i = lo; i < hi; ++i) {
                         std::uint64_t ctr = 0;
                         crossed[i] = visit_crossing_sample(geo, gstream.substream(i), ctr);
                     }
                 });
    double freq = 0.0;
    for (auto c : crossed) freq += c;
    freq /= static_cast<double>(kGate.visit_count);
    const double p_exact = crossing_geometric_param(geo).p;
    const double se_p = std::sqrt(freq * (1.0 - freq) /
                                  static_cast<double>(kGate.visit_count));
    r.verdicts.push_back({"lattice/visit_crossing_freq", std::abs(freq - p_exact),
                          kGate.se_multiplier * se_p,
                          std::abs(freq - p_exact) < kGate.se_multiplier * se_p});

    // h^n(0) for (m, n, c_n) = (0.4, 100, 0.1): 3/(mn) + 1/(c_n m n) = 0.325.
    LatticeConfig hcfg;
    hcfg.K = 2;
    hcfg.m = 0.4;
    hcfg.n = 100;
    hcfg.c_n = 0.1;
    hcfg.x0 = 1;
    const double h0 = expected_exit_time(hcfg, 0);
    const RngStream hstream = ctx.stream(2);
    std::vector<double> exits(kGate.exit_trials);
    parallel_for(kGate.exit_trials, ctx.opts.threads,
                 [&](std::size_t lo, std::size_t hi) {
                     for (std::size_t i = lo; i < hi; ++i) {
                         std::uint64_t ctr = 0;
                         exits[i] = exit_time_sample(hcfg, 0, hstream.substream(i), ctr);
                     }
                 });
    MeanSe m = mean_se(exits);
    r.verdicts.push_back({"lattice/exit_time_mc_vs_h0", std::abs(m.mean - h0),
                          kGate.se_multiplier * m.se,
                          std::abs(m.mean - h0) < kGate.se_multiplier * m.se});
    return r;
}

SuiteResult suite_occupation_scaling(const Ctx& ctx) {
    SuiteResult r{"occupation_scaling", {}, 0.0};
    const std::vector<std::uint64_t> ns{100, 1000, 10000};
    std::vector<double> log_n, log_nu;
    std::uint64_t ensemble = 0;
    for (std::uint64_t n : ns) {
        LatticeConfig cfg;
        cfg.K = 2;
        cfg.m = 1.0;
        cfg.n = n;
        cfg.c_n = 2.0 / std::sqrt(static_cast<double>(n));
        cfg.x0 = std::llround(0.5 * std::sqrt(static_cast<double>(n)));
        const RngStream base = ctx.stream(ensemble++);
        std::vector<double> nus(kGate.occupation_paths);
        parallel_for(kGate.occupation_paths, ctx.opts.threads,
                     [&](std::size_t lo, std::size_t hi) {
                         for (std::size_t i = lo; i < hi; ++i) {
                             JumpPath p = simulate_walk(cfg, 1.0, base.substream(i));
                             nus[i] = occupation_time(p, cfg, 1.0);
                         }
                     });
        MeanSe m = mean_se(nus);
        log_n.push_back(std::log(static_cast<double>(n)));
        log_nu.push_back(std::log(m.mean));
    }
    // least-squares slope
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        mx += log_n[i];
        my += log_nu[i];
    }
    mx /= log_n.size();
    my /= log_n.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        num += (log_n[i] - mx) * (log_nu[i] - my);
        den += (log_n[i] - mx) * (log_n[i] - mx);
    }
    const double slope = num / den;
    r.verdicts.push_back({"occupation/log_slope", slope, kGate.occupation_slope,
                          slope <= kGate.occupation_slope});
    return r;
}

// ------------------------------------------------------------------- pde --

SuiteResult suite_pde_semigroup(const Ctx& ctx) {
    SuiteResult r{"pde_semigroup", {}, 0.0};
    auto step_p0 = [](const SidedReal& y) { return y.side == Side::plus ? 1.0 : 0.0; };

    double worst_mass = 0.0;
    for (double g : {0.0, 1.0, infinite_gamma()}) {
        ctx.note(("pde gamma=" + fmt("%g", g)).c_str());
        PdeGrid grid;
        grid.x_max = 10.0;
        grid.dx = 1e-2;
        grid.dt = 1e-3;
        grid.gamma = g;
        grid.sigma = 1.0;
        std::vector<double> p0 = step_initial(grid);
        const double mass0 = grid_mass(grid, p0);
        std::vector<double> pT = solve_transmission_heat(grid, p0, 1.0);
        worst_mass = std::max(worst_mass, std::abs(grid_mass(grid, pT) - mass0));

        const PrbmParams params(g, 1.0);
        double sup = 0.0;
        for (std::size_t node = 0; node < pT.size(); ++node) {
            const double ref = semigroup_solution(params, step_p0, 1.0, grid.node(node));
            sup = std::max(sup, std::abs(pT[node] - ref));
        }
        r.verdicts.push_back({"pde/sup_gap_gamma=" + fmt("%g", g), sup,
                              kGate.pde_sup_gap, sup < kGate.pde_sup_gap});
    }
    r.verdicts.push_back({"pde/mass_drift_per_unit_time", worst_mass,
                          kGate.pde_mass_drift, worst_mass < kGate.pde_mass_drift});

    // observed spatial order at gamma = 1, dt slaved to dx^2
    const PrbmParams params(1.0, 1.0);
    std::vector<double> errs;
    for (double dx : {4e-2, 2e-2, 1e-2}) {
        PdeGrid grid;
        grid.x_max = 10.0;
        grid.dx = dx;
        grid.dt = 0.25 * dx * dx;
        grid.gamma = 1.0;
        grid.sigma = 1.0;
        std::vector<double> pT = solve_transmission_heat(grid, step_initial(grid), 1.0);
        double sup = 0.0;
        for (std::size_t node = 0; node < pT.size(); ++node) {
            const double ref = semigroup_solution(params, step_p0, 1.0, grid.node(node));
            sup = std::max(sup, std::abs(pT[node] - ref));
        }
        errs.push_back(sup);
    }
    const double order1 = std::log2(errs[0] / errs[1]);
    const double order2 = std::log2(errs[1] / errs[2]);
    const double order = std::min(order1, order2);
    r.verdicts.push_back({"pde/observed_order", order, kGate.pde_min_order,
                          order >= kGate.pde_min_order});
    return r;
}

using SuiteFn = SuiteResult (*)(const Ctx&);

struct Entry {
    const char* name;
    SuiteFn fn;
};

const Entry kSuites[] = {
    {"kernel_closed_form", suite_kernel_closed_form},
    {"kernel_identities", suite_kernel_identities},
    {"sampler_triangle", suite_sampler_triangle},
    {"absolute_value_law", suite_absolute_value_law},
    {"local_time_exponential", suite_local_time_exponential},
    {"hitting_probability", suite_hitting_probability},
    {"martingale_residual", suite_martingale_residual},
    {"lattice_convergence", suite_lattice_convergence},
    {"occupation_scaling", suite_occupation_scaling},
    {"pde_semigroup", suite_pde_semigroup},
};

}  // namespace

std::vector<std::string> suite_names() {
    std::vector<std::string> out;
    for (const Entry& e : kSuites) out.emplace_back(e.name);
    return out;
}

std::vector<SuiteResult> run_suites(const std::string& which, const SuiteOptions& opts) {
    std::vector<SuiteResult> out;
    bool found = false;
    std::uint64_t index = 0;
    for (const Entry& e : kSuites) {
        ++index;
        if (which != "all" && which != e.name) continue;
        found = true;
        if (opts.progress) std::fprintf(stderr, "[suite] %s\n", e.name);
        Ctx ctx{opts, index};
        const auto t0 = std::chrono::steady_clock::now();
        SuiteResult r = e.fn(ctx);
        r.elapsed_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
        if (opts.progress)
            std::fprintf(stderr, "[suite] %s: %s (%.0f ms)\n", e.name,
                         r.all_pass() ? "pass" : "FAIL", r.elapsed_ms);
        out.push_back(std::move(r));
    }
    if (!found) throw std::invalid_argument("run_suites: unknown suite '" + which + "'");
    return out;
}

std::string verdicts_json(const std::vector<SuiteResult>& results, std::uint64_t seed) {
    nlohmann::ordered_json doc;
    doc["version"] = kVersion;
    doc["seed"] = seed;
    nlohmann::ordered_json suites = nlohmann::ordered_json::array();
    for (const SuiteResult& r : results) {
        nlohmann::ordered_json s;
        s["suite"] = r.suite;
        s["pass"] = r.all_pass();
        nlohmann::ordered_json tests = nlohmann::ordered_json::array();
        for (const Verdict& v : r.verdicts) {
            nlohmann::ordered_json t;
            t["test_name"] = v.test_name;
            t["statistic"] = v.statistic;
            t["threshold"] = v.threshold;
            t["pass"] = v.pass;
            tests.push_back(std::move(t));
        }
        s["tests"] = std::move(tests);
        suites.push_back(std::move(s));
    }
    doc["suites"] = std::move(suites);
    return doc.dump(2) + "\n";
}

}  // namespace prbm
