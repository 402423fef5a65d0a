#include <doctest.h>

#include <cmath>
#include <vector>

#include "prbm/constructions.hpp"
#include "prbm/parallel.hpp"
#include "prbm/special.hpp"
#include "prbm/verify.hpp"

using namespace prbm;

namespace {

double corr(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("samplers reject degenerate gamma") {
    RngStream rng{1, 0};
    const PrbmParams reflecting(0.0, 1.0);
    const PrbmParams bm(infinite_gamma(), 1.0);
    CHECK_THROWS_AS(simulate_speed_scale(reflecting, origin_plus(), 1e-3, 1, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_flip(bm, origin_plus(), 1e-3, 1, rng),
                    std::invalid_argument);
    // the exact sampler covers the degenerate permeabilities
    CHECK_NOTHROW(simulate_exact(bm, origin_plus(), {0.0, 1.0}, rng));
    CHECK_NOTHROW(simulate_exact(reflecting, SidedReal(1, Side::plus), {0.0, 1.0}, rng));
}

TEST_CASE("speed-scale grid and start") {
    const PrbmParams p(1.0, 1.0);
    RngStream rng{3, 0};
    SidedPath path = simulate_speed_scale(p, SidedReal(1.0, Side::plus), 1e-3, 0.5, rng);
    CHECK(path.size() == 501);
    CHECK(path.values[0] == SidedReal(1.0, Side::plus));
    CHECK(path.times[500] == doctest::Approx(0.5));
    CHECK(!path.local_time.has_value());
}

TEST_CASE("speed-scale second moment from the origin") {
    // E_{0+}[X_t^2] = t
    const PrbmParams p(1.0, 1.0);
    auto snaps = ensemble_snapshots(SamplerKind::speed_scale, p, origin_plus(), {1.0},
                                    1e-4, 30000, RngStream{5, 0}, 2);
    std::vector<double> sq(snaps[0].size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = snaps[0][i] * snaps[0][i];
    MeanSe m = mean_se(sq);
    CHECK(std::abs(m.mean - 1.0) < 3.0 * m.se);
}

TEST_CASE("first-moment identity at the origin") {
    // E_{0+}[X_t] = (1/gamma) P_{0+}(X_t <= 0-)
    const PrbmParams p(1.3, 1.0);
    const double t = 0.7;
    auto snaps = ensemble_snapshots(SamplerKind::speed_scale, p, origin_plus(),
                                    {t}, 1e-4, 30000, RngStream{7, 0}, 2);
    MeanSe m = mean_se(snaps[0]);
    const double target = opposite_side_mass(p, t, origin_plus()) / p.gamma;
    CHECK(std::abs(m.mean - target) < 3.0 * m.se);
}

TEST_CASE("absolute value of the speed-scale path is reflected bm") {
    const PrbmParams p(1.0, 1.0);
    auto snaps = ensemble_snapshots(SamplerKind::speed_scale, p, origin_plus(), {1.0},
                                    1e-4, 30000, RngStream{9, 0}, 2);
    std::vector<double> av(snaps[0].size());
    for (std::size_t i = 0; i < av.size(); ++i) av[i] = std::abs(snaps[0][i]);
    KsReport k = ks_statistic(av,
                              [](double x) {
                                  return x <= 0 ? 0.0 : std::erf(x * 0.7071067811865476);
                              },
                              0.015);
    CHECK(k.pass);
}

TEST_CASE("flip sampler basics") {
    const PrbmParams p(1.0, 1.0);
    RngStream rng{11, 0};
    SidedPath path = simulate_flip(p, SidedReal(0.5, Side::minus), 1e-3, 1.0, rng);
    REQUIRE(path.local_time.has_value());
    CHECK(path.values[0] == SidedReal(0.5, Side::minus));
    double prev = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
        CHECK((*path.local_time)[k] >= prev);
        prev = (*path.local_time)[k];
    }
    // sign changes only through magnitude ~ 0
    Side held = path.values[0].side;
    for (std::size_t k = 1; k < path.size(); ++k) {
        if (path.values[k].side != held) {
            CHECK(path.values[k].magnitude <= 8.0 * std::sqrt(path.step));
            held = path.values[k].side;
        }
    }
}

TEST_CASE("flip sampler with vanishing gamma never flips") {
    const PrbmParams p(1e-9, 1.0);
    for (std::uint64_t i = 0; i < 1000; ++i) {
        SidedPath path = simulate_flip(p, origin_plus(), 1e-3, 1.0, RngStream{13, i});
        CHECK(crossing_times(path).empty());
    }
}

TEST_CASE("flip side-switch mass matches the kernel") {
    const PrbmParams p(1.0, 1.0);
    auto st = flip_ensemble(p, origin_plus(), {1.0}, 1e-4, 20000, RngStream{15, 0}, 2);
    double minus_frac = 0.0;
    for (double v : st.snapshots[0]) minus_frac += (v < 0.0);
    minus_frac /= double(st.snapshots[0].size());
    const double mass = opposite_side_mass(p, 1.0, origin_plus());
    const double se = std::sqrt(mass * (1 - mass) / double(st.snapshots[0].size()));
    const double ag_bias = p.gamma * 0.5826 * std::sqrt(1e-4);
    CHECK(std::abs(minus_frac - mass) < 3.0 * se + ag_bias);
}

TEST_CASE("crossing detection and local-time increments") {
    SidedPath hand;
    hand.params = PrbmParams(1.0, 1.0);
    hand.step = 1.0;
    hand.times = {0, 1, 2, 3, 4};
    hand.values = {SidedReal(1, Side::plus), SidedReal(2, Side::plus),
                   SidedReal(1, Side::minus), SidedReal(3, Side::minus),
                   SidedReal(0.5, Side::plus)};
    auto ct = crossing_times(hand);
    REQUIRE(ct.size() == 2);
    CHECK(ct[0] == 2.0);
    CHECK(ct[1] == 4.0);

    SidedPath flat = hand;
    for (auto& v : flat.values) v.side = Side::plus;
    CHECK(crossing_times(flat).empty());

    // local-time increments need the regulator coordinate
    CHECK_THROWS_AS(local_time_increments(hand), std::invalid_argument);
    RngStream rng{17, 0};
    SidedPath ex = simulate_exact(PrbmParams(1.0, 1.0), origin_plus(), {0, 0.5, 1}, rng);
    CHECK_THROWS_AS(local_time_increments(ex), std::invalid_argument);
}

TEST_CASE("local-time increments are exponential with rate gamma") {
    // first-k sampling: completed increments inside a fixed window would be
    // inspection-biased low
    const PrbmParams p(1.0, 1.0);
    FirstIncrements fi =
        flip_first_increments(p, origin_plus(), 2, 2000, 1e-4, RngStream{19, 0}, 2);
    REQUIRE(fi.increments.size() == 4000);
    for (double e : fi.increments) CHECK(e > 0.0);
    MeanSe m = mean_se(fi.increments);
    const double ag_bias = 0.5826 * std::sqrt(1e-4);
    CHECK(std::abs(m.mean - 1.0) < 3.0 * m.se + ag_bias);
    KsReport k = ks_statistic(fi.increments, [](double x) { return 1.0 - std::exp(-x); },
                              0.03);
    CHECK(k.pass);

    // increments agree with local_time_increments on a full path
    SidedPath path = simulate_flip(p, origin_plus(), 1e-3, 4.0, RngStream{21, 5});
    auto incs = local_time_increments(path);
    auto ct = crossing_times(path);
    CHECK(incs.size() == ct.size());
}

TEST_CASE("crossings by t are Poissonised local time") {
    // mean #crossings by t = gamma E[L_t], with L taken from the same ensemble
    const PrbmParams p(1.0, 1.0);
    auto st = flip_ensemble(p, origin_plus(), {1.0}, 1e-4, 20000, RngStream{23, 0}, 2);
    std::vector<double> counts(st.crossings_by_t1.size());
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] = st.crossings_by_t1[i];
    MeanSe mc = mean_se(counts);
    MeanSe ml = mean_se(st.local_time_t1);
    CHECK(std::abs(mc.mean - p.gamma * ml.mean) < 3.0 * (mc.se + p.gamma * ml.se));
}

TEST_CASE("increments are uncorrelated with the excursion height") {
    const PrbmParams p(1.0, 1.0);
    FirstIncrements fi =
        flip_first_increments(p, origin_plus(), 2, 1500, 1e-3, RngStream{25, 0}, 2);
    REQUIRE(fi.increments.size() == 3000);
    const double rho = corr(fi.increments, fi.peak_heights);
    CHECK(std::abs(rho) * std::sqrt(double(fi.increments.size())) < 3.5);
}

TEST_CASE("exact sampler validates its grid") {
    const PrbmParams p(1.0, 1.0);
    RngStream rng{27, 0};
    CHECK_THROWS_AS(simulate_exact(p, origin_plus(), {0.5, 1.0}, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_exact(p, origin_plus(), {0.0, 1.0, 1.0}, rng),
                    std::invalid_argument);
    SidedPath path = simulate_exact(p, origin_plus(), {0.0, 0.3, 1.0, 2.5}, rng);
    CHECK(path.size() == 4);
    CHECK(path.values[0] == origin_plus());
}

TEST_CASE("exact sampler: one step reproduces the kernel cdf") {
    const PrbmParams p(1.0, 1.0);
    const std::size_t n = 30000;
    auto snaps = ensemble_snapshots(SamplerKind::exact, p, origin_plus(), {1.0}, 1e-4,
                                    n, RngStream{29, 0}, 2);
    KsReport k = ks_statistic(snaps[0],
                              [&](double y) { return transition_cdf(p, 1.0, origin_plus(), y); },
                              1.9495 / std::sqrt(double(n)));
    CHECK(k.pass);
}

TEST_CASE("exact sampler: two half steps equal one full step in law") {
    const PrbmParams p(1.0, 1.0);
    const std::size_t n = 30000;
    std::vector<double> two(n), one(n);
    RngStream base{31, 0};
    parallel_for(n, 2, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            SidedPath a =
                simulate_exact(p, origin_plus(), {0.0, 0.5, 1.0}, base.substream(i));
            two[i] = a.values.back().projection();
            SidedPath b = simulate_exact(p, origin_plus(), {0.0, 1.0},
                                         base.substream(n + i));
            one[i] = b.values.back().projection();
        }
    });
    KsReport k = ks_two_sample(two, one, 1e-3);
    CHECK(k.pass);
}

TEST_CASE("exact sampler with infinite gamma is gaussian") {
    const PrbmParams bm(infinite_gamma(), 1.0);
    const std::size_t n = 30000;
    auto snaps = ensemble_snapshots(SamplerKind::exact, bm, origin_plus(), {1.0}, 1e-4,
                                    n, RngStream{33, 0}, 2);
    KsReport k = ks_statistic(snaps[0], [](double y) { return norm_cdf(y); },
                              1.9495 / std::sqrt(double(n)));
    CHECK(k.pass);
}

TEST_CASE("speed-scale and flip agree in law") {
    const PrbmParams p(0.7, 1.0);
    const std::size_t n = 20000;
    auto ss = ensemble_snapshots(SamplerKind::speed_scale, p, SidedReal(0.5, Side::plus),
                                 {0.25, 1.0}, 1e-4, n, RngStream{35, 0}, 2);
    auto fl = ensemble_snapshots(SamplerKind::flip, p, SidedReal(0.5, Side::plus),
                                 {0.25, 1.0}, 1e-4, n, RngStream{35, 1u << 20}, 2);
    for (std::size_t s = 0; s < 2; ++s) {
        KsReport k = ks_two_sample(ss[s], fl[s], 1e-3);
        CHECK(k.pass);
    }
}

TEST_CASE("sigma rescaling is validated against the exact kernel") {
    const PrbmParams p(0.7, 2.0);
    const std::size_t n = 10000;
    auto ss = ensemble_snapshots(SamplerKind::speed_scale, p, origin_plus(), {0.5},
                                 1e-4, n, RngStream{37, 0}, 2);
    KsReport k = ks_statistic(ss[0],
                              [&](double y) { return transition_cdf(p, 0.5, origin_plus(), y); },
                              0.02);
    CHECK(k.pass);
}

TEST_CASE("hitting frequency matches the scale-function formula") {
    const PrbmParams p(1.0, 1.0);
    const std::size_t n = 20000;
    const double freq = hitting_frequency(p, 1.0, 2.0, 1e-4, n, RngStream{39, 0}, 2);
    const double target = hitting_prob(1.0, 2.0, 1.0);
    const double se = std::sqrt(target * (1 - target) / double(n));
    CHECK(std::abs(freq - target) < 3.0 * se);
}

TEST_CASE("streaming residual equals the ensemble operator") {
    const PrbmParams p(1.0, 1.0);
    const double dt = 1e-3, t = 0.5;
    const std::size_t n = 200;
    auto family = test_function_family(p.gamma);
    auto streamed = martingale_residual_mc(p, origin_plus(), t, dt, n, family,
                                           RngStream{41, 0}, 2);
    std::vector<SidedPath> ensemble;
    ensemble.reserve(n);
    RngStream base{41, 0};
    for (std::size_t i = 0; i < n; ++i)
        ensemble.push_back(simulate_flip(p, origin_plus(), dt, t, base.substream(i)));
    for (std::size_t j = 0; j < family.size(); ++j) {
        ResidualStats op = martingale_residual(ensemble, family[j], p, t);
        CHECK(op.mean == doctest::Approx(streamed[j].mean).epsilon(1e-10));
        CHECK(op.se == doctest::Approx(streamed[j].se).epsilon(1e-10));
    }
}

TEST_CASE("ensembles are reproducible and thread-count independent") {
    const PrbmParams p(1.0, 1.0);
    auto one = ensemble_snapshots(SamplerKind::flip, p, origin_plus(), {0.5}, 1e-3,
                                  500, RngStream{43, 0}, 1);
    auto two = ensemble_snapshots(SamplerKind::flip, p, origin_plus(), {0.5}, 1e-3,
                                  500, RngStream{43, 0}, 2);
    CHECK(one[0] == two[0]);
    auto again = ensemble_snapshots(SamplerKind::flip, p, origin_plus(), {0.5}, 1e-3,
                                    500, RngStream{43, 0}, 2);
    CHECK(two[0] == again[0]);
}
