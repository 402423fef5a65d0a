#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prbm/parallel.hpp"

namespace prbm {

// Every numeric threshold of the verification gate lives here, pinned at
// compile time; suites never carry ad-hoc tolerances.
struct AcceptanceThresholds {
    double kernel_rel_err = 1e-10;     // closed form vs quadrature
    double normalization_tol = 1e-8;
    double symmetry_tol = 1e-12;
    double chapman_kolmogorov_tol = 1e-6;
    double triangle_min_p = 1e-3;      // pairwise two-sample KS
    double abs_value_ks = 0.01;        // |X_1| vs half-normal
    double se_multiplier = 3.0;        // the "3 SE" convention
    double local_time_ks = 0.02;       // increments vs Exp(1)
    double lattice_ks = 0.05;          // X_n(1) vs exact CDF
    double occupation_slope = -0.4;    // log E[nu_n(1)] vs log n
    double pde_sup_gap = 1e-3;
    double pde_mass_drift = 1e-8;      // per unit time
    double pde_min_order = 1.8;
    // Monte Carlo sizes
    std::size_t triangle_paths = 100000;
    std::size_t abs_value_paths = 100000;
    std::size_t hitting_paths = 100000;
    std::size_t residual_paths = 100000;
    std::size_t increment_count = 10000;
    std::size_t lattice_paths = 10000;
    std::size_t visit_count = 100000;
    std::size_t exit_trials = 100000;
    std::size_t occupation_paths = 4000;
    double sampler_dt = 1e-4;          // default step for T <= 4
};

inline constexpr AcceptanceThresholds kGate{};

struct Verdict {
    std::string test_name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct SuiteResult {
    std::string suite;
    std::vector<Verdict> verdicts;
    double elapsed_ms = 0.0;  // reported on stderr, never in the verdict JSON

    bool all_pass() const {
        for (const Verdict& v : verdicts)
            if (!v.pass) return false;
        return true;
    }
};

struct SuiteOptions {
    std::uint64_t seed = 42;
    unsigned threads = default_threads();
    bool progress = false;  // progress notes on stderr
};

// Registered suite names, in run order.
std::vector<std::string> suite_names();

// Runs one suite by name, or all of them for which = "all".
std::vector<SuiteResult> run_suites(const std::string& which, const SuiteOptions& opts);

// Deterministic verdict document: {test_name, statistic, threshold, pass}
// per test. Timings are excluded so consecutive runs are byte-identical.
std::string verdicts_json(const std::vector<SuiteResult>& results, std::uint64_t seed);

}  // namespace prbm
