// Serial vs OpenMP throughput for the hot kernels: packed-code binning,
// permutation calibration, and the Monte Carlo risk loop. Results must agree
// bit for bit; this target reports the speedup.

#include <chrono>
#include <cstdio>

#include "gof/binning.hpp"
#include "gof/calibration.hpp"
#include "gof/experiments.hpp"
#include "gof/generators.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace gof;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void set_threads(int n) {
#ifdef _OPENMP
    omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int hardware_threads() {
#ifdef _OPENMP
    return omp_get_num_procs();
#else
    return 1;
#endif
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_s();
        f();
        best = std::min(best, now_s() - t0);
    }
    return best;
}

}  // namespace

int main() {
    const int hw = hardware_threads();
    std::printf("kernel,serial_s,parallel_s,speedup,threads,identical\n");

    // packed-code binning
    {
        Rng rng(1);
        Sample s = sample_uniform(2'000'000, 3, rng);
        BinSpec spec(16, 3);
        std::vector<std::uint64_t> a, b;
        set_threads(1);
        const double ts = time_best_of(3, [&] { a = bin_codes_serial(s, spec); });
        set_threads(hw);
        const double tp = time_best_of(3, [&] { b = bin_codes(s, spec); });
        std::printf("bin_codes,%.4f,%.4f,%.2f,%d,%s\n", ts, tp, ts / tp, hw,
                    a == b ? "yes" : "NO");
    }

    // permutation calibration of Gamma_2
    {
        Rng rng(2);
        Sample x = sample_uniform(2000, 2, rng);
        Sample y = sample_uniform(2000, 2, rng);
        CalibrationConfig cfg{999, 7, 0.05};
        double p1 = 0.0, p2 = 0.0;
        set_threads(1);
        const double ts = time_best_of(3, [&] {
            p1 = *permutation_test_gamma(x, y, 8, cfg).p_value;
        });
        set_threads(hw);
        const double tp = time_best_of(3, [&] {
            p2 = *permutation_test_gamma(x, y, 8, cfg).p_value;
        });
        std::printf("permutation_gamma,%.4f,%.4f,%.2f,%d,%s\n", ts, tp, ts / tp, hw,
                    p1 == p2 ? "yes" : "NO");
    }

    // Monte Carlo risk cell
    {
        ExperimentConfig cfg;
        cfg.dims = {2};
        cfg.sizes = {1024};
        cfg.epsilons = {0.2};
        cfg.replicates = 400;
        cfg.seed = 3;
        RiskTable t1, t2;
        set_threads(1);
        const double ts = time_best_of(2, [&] { t1 = risk_experiment(cfg); });
        set_threads(hw);
        const double tp = time_best_of(2, [&] { t2 = risk_experiment(cfg); });
        const bool same = t1.rows[0].type1 == t2.rows[0].type1 &&
                          t1.rows[0].type2 == t2.rows[0].type2;
        std::printf("risk_cell,%.4f,%.4f,%.2f,%d,%s\n", ts, tp, ts / tp, hw,
                    same ? "yes" : "NO");
    }
    return 0;
}
