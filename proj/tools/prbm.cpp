#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "prbm/constructions.hpp"
#include "prbm/io.hpp"
#include "prbm/kernel.hpp"
#include "prbm/lattice.hpp"
#include "prbm/parallel.hpp"
#include "prbm/pde.hpp"
#include "prbm/suites.hpp"
#include "prbm/verify.hpp"
#include "prbm/version.hpp"

namespace {

using prbm::PrbmParams;
using prbm::RngStream;
using prbm::Side;
using prbm::SidedReal;

std::uint64_t seed_fallback() {
    if (const char* env = std::getenv("PRBM_SEED")) return std::strtoull(env, nullptr, 10);
    return 42;
}

double parse_gamma(const std::string& s) {
    if (s == "inf" || s == "+inf" || s == "infinity") return prbm::infinite_gamma();
    return std::stod(s);
}

void write_manifest(const std::string& out_dir, const std::string& sub,
                    const std::map<std::string, std::string>& flags) {
    nlohmann::ordered_json m;
    m["version"] = prbm::kVersion;
    m["subcommand"] = sub;
    nlohmann::ordered_json f;
    for (const auto& [k, v] : flags) f[k] = v;
    m["config"] = std::move(f);
    std::ofstream os(std::filesystem::path(out_dir) / (sub + "_manifest.json"));
    os << m.dump(2) << "\n";
}

struct GridSpec {
    double lo = -3.0, hi = 3.0, step = 0.01;
};

GridSpec parse_grid(const std::string& s) {
    GridSpec g;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &g.lo, &g.hi, &g.step) != 3 ||
        !(g.step > 0.0) || !(g.hi >= g.lo))
        throw CLI::ValidationError("--grid expects lo:hi:step with step > 0");
    return g;
}

int cmd_density(const std::string& out_dir, double gamma, double sigma, double t,
                const std::string& x_text, const std::string& grid_text) {
    const SidedReal x = prbm::parse_sided(x_text);
    const PrbmParams params(gamma, sigma);
    const GridSpec grid = parse_grid(grid_text);
    std::ofstream os(std::filesystem::path(out_dir) / "density.csv");
    os << "t,x_value,x_side,y_value,y_side,density\n";
    const long steps = std::lround((grid.hi - grid.lo) / grid.step);
    char line[256];
    for (long k = 0; k <= steps; ++k) {
        const double yv = grid.lo + static_cast<double>(k) * grid.step;
        std::vector<SidedReal> ys;
        if (yv == 0.0) {
            ys = {prbm::origin_minus(), prbm::origin_plus()};
        } else {
            ys = {SidedReal::from_projection(yv)};
        }
        for (const SidedReal& y : ys) {
            std::snprintf(line, sizeof line, "%.17g,%.17g,%s,%.17g,%s,%.17g\n", t,
                          prbm::csv_projection(x), prbm::side_char(x).c_str(),
                          prbm::csv_projection(y), prbm::side_char(y).c_str(),
                          prbm::transition_density(params, t, x, y));
            os << line;
        }
    }
    return 0;
}

int cmd_simulate(const std::string& out_dir, const std::string& sampler, double gamma,
                 double sigma, const std::string& x0_text, double T, double dt,
                 std::size_t paths, std::uint64_t seed, unsigned threads,
                 const std::string& mode, bool dump_local_time) {
    const SidedReal x0 = prbm::parse_sided(x0_text);
    const PrbmParams params(gamma, sigma);
    const RngStream base{seed, 0};
    prbm::SamplerKind kind;
    if (sampler == "speed_scale") kind = prbm::SamplerKind::speed_scale;
    else if (sampler == "flip") kind = prbm::SamplerKind::flip;
    else if (sampler == "exact") kind = prbm::SamplerKind::exact;
    else throw CLI::ValidationError("--sampler must be speed_scale, flip or exact");

    if (mode == "paths") {
        std::ofstream os(std::filesystem::path(out_dir) / "paths.csv");
        os << (dump_local_time ? "path_id,t,value,side,local_time\n"
                               : "path_id,t,value,side\n");
        char line[256];
        for (std::size_t i = 0; i < paths; ++i) {
            prbm::SidedPath p;
            const RngStream rng = base.substream(i);
            if (kind == prbm::SamplerKind::speed_scale)
                p = prbm::simulate_speed_scale(params, x0, dt, T, rng);
            else if (kind == prbm::SamplerKind::flip)
                p = prbm::simulate_flip(params, x0, dt, T, rng);
            else {
                std::vector<double> times;
                for (double t = 0.0; t <= T + 0.5 * dt; t += dt) times.push_back(t);
                p = prbm::simulate_exact(params, x0, times, rng);
            }
            for (std::size_t k = 0; k < p.size(); ++k) {
                if (dump_local_time && p.local_time)
                    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%s,%.17g\n", i,
                                  p.times[k], prbm::csv_projection(p.values[k]),
                                  prbm::side_char(p.values[k]).c_str(),
                                  (*p.local_time)[k]);
                else
                    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%s\n", i, p.times[k],
                                  prbm::csv_projection(p.values[k]),
                                  prbm::side_char(p.values[k]).c_str());
                os << line;
            }
        }
        return 0;
    }

    // ensemble summary at up to 101 decimated grid times
    const std::size_t n_steps = static_cast<std::size_t>(T / dt + 0.5);
    const std::size_t stride = std::max<std::size_t>(1, n_steps / 100);
    std::vector<double> snaps;
    for (std::size_t k = stride; k <= n_steps; k += stride)
        snaps.push_back(static_cast<double>(k) * dt);
    auto values = prbm::ensemble_snapshots(kind, params, x0, snaps, dt, paths, base,
                                           threads);
    std::ofstream os(std::filesystem::path(out_dir) / "ensemble.csv");
    os << "t,mean,var,side_fraction\n";
    char line[256];
    for (std::size_t s = 0; s < snaps.size(); ++s) {
        prbm::MeanSe m = prbm::mean_se(values[s]);
        double plus = 0.0;
        for (double v : values[s]) plus += (v > 0.0) ? 1.0 : 0.0;
        const double var = m.se * m.se * static_cast<double>(values[s].size());
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", snaps[s], m.mean,
                      var, plus / static_cast<double>(values[s].size()));
        os << line;
    }
    return 0;
}

int cmd_walk(const std::string& out_dir, int K, double m, const std::string& cn_text,
             double gamma, std::uint64_t n, double T, std::size_t paths, double x0_real,
             std::uint64_t seed, unsigned threads) {
    prbm::LatticeConfig cfg;
    cfg.K = K;
    cfg.m = m;
    cfg.n = n;
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    // Theorem scaling: sqrt(n) c_n / K -> gamma.
    cfg.c_n = (cn_text == "auto") ? gamma * K / sqrt_n : std::stod(cn_text);
    long long site = std::llround(x0_real * sqrt_n);
    if (cfg.K % 2 != 0 && site == 0) site = x0_real >= 0.0 ? 1 : -1;
    cfg.x0 = site;
    cfg.validate();

    const RngStream base{seed, 0};
    std::vector<double> finals(paths), nus(paths), crossings(paths);
    prbm::parallel_for(paths, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            prbm::JumpPath p = prbm::simulate_walk(cfg, T, base.substream(i));
            finals[i] = p.values.back();
            nus[i] = prbm::occupation_time(p, cfg, T);
            crossings[i] = static_cast<double>(prbm::walk_crossing_indices(p, cfg).size());
        }
    });

    std::ofstream os(std::filesystem::path(out_dir) / "walk.csv");
    os << "path_id,x_T\n";
    for (std::size_t i = 0; i < paths; ++i)
        os << i << "," << finals[i] << "\n";

    nlohmann::ordered_json summary;
    const double gamma_eff = sqrt_n * cfg.c_n / K;
    summary["gamma_effective"] = gamma_eff;
    if (std::isfinite(gamma_eff) && gamma_eff > 0.0) {
        const PrbmParams limit(gamma_eff, std::sqrt(m));
        const SidedReal start(std::abs(x0_real),
                              x0_real >= 0.0 ? Side::plus : Side::minus);
        prbm::KsReport ks = prbm::ks_statistic(
            finals, [&](double y) { return prbm::transition_cdf(limit, T, start, y); },
            prbm::kGate.lattice_ks);
        summary["ks_vs_exact"] = {{"statistic", ks.statistic},
                                  {"p_value", ks.p_value},
                                  {"threshold", ks.threshold},
                                  {"pass", ks.pass}};
    }
    prbm::MeanSe mc = prbm::mean_se(crossings);
    prbm::MeanSe mn = prbm::mean_se(nus);
    summary["crossing_rate"] = {{"mean_per_path", mc.mean}, {"se", mc.se}};
    summary["nu_mean"] = {{"mean", mn.mean}, {"se", mn.se}};
    std::ofstream js(std::filesystem::path(out_dir) / "walk_summary.json");
    const std::string text = summary.dump(2) + "\n";
    js << text;
    std::cout << text;
    return 0;
}

int cmd_verify(const std::string& out_dir, const std::string& suite, std::uint64_t seed,
               unsigned threads) {
    prbm::SuiteOptions opts;
    opts.seed = seed;
    opts.threads = threads;
    opts.progress = true;
    const auto results = prbm::run_suites(suite, opts);
    const std::string doc = prbm::verdicts_json(results, seed);
    std::ofstream os(std::filesystem::path(out_dir) / "verdicts.json");
    os << doc;
    std::cout << doc;
    // wall times live in a sidecar so verdicts.json stays byte-reproducible
    nlohmann::ordered_json timings;
    for (const auto& r : results) timings[r.suite] = r.elapsed_ms;
    std::ofstream ts(std::filesystem::path(out_dir) / "timings.json");
    ts << timings.dump(2) << "\n";
    for (const auto& r : results)
        if (!r.all_pass()) return 2;
    return 0;
}

int cmd_pde(const std::string& out_dir, const std::string& gamma_text, double sigma,
            double dx, double T, const std::string& p0_kind, const std::string& p0_file,
            double dt, const std::string& scheme) {
    prbm::PdeGrid grid;
    grid.gamma = parse_gamma(gamma_text);
    grid.sigma = sigma;
    grid.dx = dx;
    grid.dt = dt;
    grid.x_max = 10.0 * sigma * std::sqrt(std::max(T, 1e-6));
    grid.scheme = scheme == "explicit" ? prbm::PdeScheme::explicit_euler
                                       : prbm::PdeScheme::implicit;
    std::vector<double> p0;
    if (p0_kind == "step") {
        p0 = prbm::step_initial(grid);
    } else if (p0_kind == "gaussian") {
        p0 = prbm::gaussian_initial(grid);
    } else if (p0_kind == "file") {
        std::ifstream is(p0_file);
        if (!is) throw CLI::ValidationError("cannot open --file " + p0_file);
        double v;
        while (is >> v) p0.push_back(v);
        if (p0.size() != grid.total_nodes())
            throw CLI::ValidationError("--file must hold one value per grid node (" +
                                       std::to_string(grid.total_nodes()) + ")");
    } else {
        throw CLI::ValidationError("--p0 must be step, gaussian or file");
    }
    std::vector<double> pT = prbm::solve_transmission_heat(grid, std::move(p0), T);
    std::ofstream os(std::filesystem::path(out_dir) / "pde.csv");
    os << "x,side,p\n";
    char line[128];
    for (std::size_t g = 0; g < pT.size(); ++g) {
        const SidedReal x = grid.node(g);
        std::snprintf(line, sizeof line, "%.17g,%s,%.17g\n", prbm::csv_projection(x),
                      prbm::side_char(x).c_str(), pT[g]);
        os << line;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"partially reflected Brownian motion toolkit"};
    app.require_subcommand(1);

    std::string out_dir = ".";
    std::uint64_t seed = seed_fallback();
    unsigned threads = prbm::default_threads();
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", seed, "rng seed (falls back to PRBM_SEED)")
        ->capture_default_str();
    app.add_option("--threads", threads, "worker threads")->capture_default_str();

    // density
    auto* density = app.add_subcommand("density", "exact transition density on a grid");
    std::string d_gamma = "1", d_x = "0+", d_grid = "-3:3:0.01";
    double d_sigma = 1.0, d_t = 1.0;
    density->add_option("--gamma", d_gamma, "permeability (number or inf)")->required();
    density->add_option("--sigma", d_sigma, "diffusion scale")->capture_default_str();
    density->add_option("--t", d_t, "time")->required();
    density->add_option("--x", d_x, "source point (0+, 0-, or signed decimal)")->required();
    density->add_option("--grid", d_grid, "target grid lo:hi:step")->capture_default_str();

    // simulate
    auto* simulate = app.add_subcommand("simulate", "sample prBM paths");
    std::string s_sampler = "speed_scale", s_x0 = "0+", s_mode = "ensemble";
    std::string s_gamma = "1";
    double s_sigma = 1.0, s_T = 1.0, s_dt = 1e-4;
    std::size_t s_paths = 1000;
    bool s_lt = false;
    simulate->add_option("--sampler", s_sampler, "speed_scale | flip | exact")
        ->capture_default_str();
    simulate->add_option("--gamma", s_gamma, "permeability")->required();
    simulate->add_option("--sigma", s_sigma, "diffusion scale")->capture_default_str();
    simulate->add_option("--x0", s_x0, "start point")->capture_default_str();
    simulate->add_option("--T", s_T, "horizon")->capture_default_str();
    simulate->add_option("--dt", s_dt, "time step")->capture_default_str();
    simulate->add_option("--paths", s_paths, "number of paths")->capture_default_str();
    simulate->add_option("--mode", s_mode, "ensemble | paths")->capture_default_str();
    simulate->add_flag("--local-time", s_lt, "include the local time column (flip paths)");

    // walk
    auto* walk = app.add_subcommand("walk", "rescaled lattice walk with a barrier");
    int w_K = 2;
    double w_m = 1.0, w_gamma = 1.0, w_T = 1.0, w_x0 = 0.5;
    std::string w_cn = "auto";
    std::uint64_t w_n = 10000;
    std::size_t w_paths = 10000;
    walk->add_option("--K", w_K, "barrier width (edges)")->capture_default_str();
    walk->add_option("--m", w_m, "migration rate")->capture_default_str();
    walk->add_option("--cn", w_cn, "attenuation, or auto = gamma K / sqrt(n)")
        ->capture_default_str();
    walk->add_option("--gamma", w_gamma, "target permeability for auto c_n")
        ->capture_default_str();
    walk->add_option("--n", w_n, "scaling index")->capture_default_str();
    walk->add_option("--T", w_T, "rescaled horizon")->capture_default_str();
    walk->add_option("--paths", w_paths, "number of paths")->capture_default_str();
    walk->add_option("--x0", w_x0, "rescaled start (site = round(x0 sqrt n))")
        ->capture_default_str();

    // verify
    auto* verify = app.add_subcommand("verify", "run the verification suites");
    std::string v_suite = "all";
    verify->add_option("--suite", v_suite, "suite name or all")->capture_default_str();

    // pde
    auto* pde = app.add_subcommand("pde", "transmission-condition heat equation");
    std::string p_gamma = "1", p_p0 = "step", p_file, p_scheme = "implicit";
    double p_sigma = 1.0, p_dx = 1e-2, p_T = 1.0, p_dt = 1e-3;
    pde->add_option("--gamma", p_gamma, "permeability (number or inf)")->required();
    pde->add_option("--sigma", p_sigma, "diffusion scale")->capture_default_str();
    pde->add_option("--dx", p_dx, "grid spacing")->capture_default_str();
    pde->add_option("--T", p_T, "final time")->capture_default_str();
    pde->add_option("--p0", p_p0, "step | gaussian | file")->capture_default_str();
    pde->add_option("--file", p_file, "initial values, one per grid node");
    pde->add_option("--dt-pde", p_dt, "time step")->capture_default_str();
    pde->add_option("--scheme", p_scheme, "implicit | explicit")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints usage / error text
        return code == 0 ? 0 : 1;      // help exits 0, everything else is a usage error
    }

    try {
        std::filesystem::create_directories(out_dir);
        if (density->parsed()) {
            write_manifest(out_dir, "density",
                           {{"gamma", d_gamma},
                            {"sigma", std::to_string(d_sigma)},
                            {"t", std::to_string(d_t)},
                            {"x", d_x},
                            {"grid", d_grid},
                            {"seed", std::to_string(seed)}});
            return cmd_density(out_dir, parse_gamma(d_gamma), d_sigma, d_t, d_x, d_grid);
        }
        if (simulate->parsed()) {
            write_manifest(out_dir, "simulate",
                           {{"sampler", s_sampler},
                            {"gamma", s_gamma},
                            {"sigma", std::to_string(s_sigma)},
                            {"x0", s_x0},
                            {"T", std::to_string(s_T)},
                            {"dt", std::to_string(s_dt)},
                            {"paths", std::to_string(s_paths)},
                            {"mode", s_mode},
                            {"seed", std::to_string(seed)}});
            return cmd_simulate(out_dir, s_sampler, parse_gamma(s_gamma), s_sigma, s_x0,
                                s_T, s_dt, s_paths, seed, threads, s_mode, s_lt);
        }
        if (walk->parsed()) {
            write_manifest(out_dir, "walk",
                           {{"K", std::to_string(w_K)},
                            {"m", std::to_string(w_m)},
                            {"cn", w_cn},
                            {"gamma", std::to_string(w_gamma)},
                            {"n", std::to_string(w_n)},
                            {"T", std::to_string(w_T)},
                            {"paths", std::to_string(w_paths)},
                            {"x0", std::to_string(w_x0)},
                            {"seed", std::to_string(seed)}});
            return cmd_walk(out_dir, w_K, w_m, w_cn, w_gamma, w_n, w_T, w_paths, w_x0,
                            seed, threads);
        }
        if (verify->parsed()) {
            write_manifest(out_dir, "verify",
                           {{"suite", v_suite}, {"seed", std::to_string(seed)}});
            return cmd_verify(out_dir, v_suite, seed, threads);
        }
        if (pde->parsed()) {
            write_manifest(out_dir, "pde",
                           {{"gamma", p_gamma},
                            {"sigma", std::to_string(p_sigma)},
                            {"dx", std::to_string(p_dx)},
                            {"T", std::to_string(p_T)},
                            {"p0", p_p0},
                            {"scheme", p_scheme},
                            {"dt_pde", std::to_string(p_dt)},
                            {"seed", std::to_string(seed)}});
            return cmd_pde(out_dir, p_gamma, p_sigma, p_dx, p_T, p_p0, p_file, p_dt,
                           p_scheme);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
