#include "doctest.h"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gof/calibration.hpp"
#include "gof/experiments.hpp"
#include "gof/generators.hpp"

using namespace gof;

// The OpenMP kernels must reproduce the serial results bit for bit: all
// randomness flows through per-replicate substreams and reductions are
// integer counts.

namespace {

struct ThreadGuard {
    int saved;
    explicit ThreadGuard(int n) : saved(1) {
#ifdef _OPENMP
        saved = omp_get_max_threads();
        omp_set_num_threads(n);
#else
        (void)n;
#endif
    }
    ~ThreadGuard() {
#ifdef _OPENMP
        omp_set_num_threads(saved);
#endif
    }
};

}  // namespace

TEST_CASE("permutation p-value is independent of thread count") {
    Rng rng(21);
    Sample x = sample_uniform(120, 2, rng);
    Sample y = sample_uniform(120, 2, rng);
    CalibrationConfig cfg{199, 77, 0.05};

    double p1, p2;
    {
        ThreadGuard g(1);
        p1 = *permutation_test_gamma(x, y, 4, cfg).p_value;
    }
    {
        ThreadGuard g(2);
        p2 = *permutation_test_gamma(x, y, 4, cfg).p_value;
    }
    CHECK(p1 == p2);
}

TEST_CASE("multiscale permutation is independent of thread count") {
    Rng rng(23);
    Sample x = sample_uniform(64, 1, rng);
    Sample y = sample_uniform(64, 1, rng);
    CalibrationConfig cfg{99, 31, 0.05};
    double p1, p2;
    {
        ThreadGuard g(1);
        p1 = *permutation_multiscale(x, y, 1, cfg).p_value;
    }
    {
        ThreadGuard g(2);
        p2 = *permutation_multiscale(x, y, 1, cfg).p_value;
    }
    CHECK(p1 == p2);
}

TEST_CASE("risk tables are independent of thread count") {
    ExperimentConfig cfg;
    cfg.dims = {2};
    cfg.sizes = {128};
    cfg.epsilons = {0.0, 0.3};
    cfg.replicates = 200;
    cfg.seed = 2024;

    RiskTable t1, t2;
    {
        ThreadGuard g(1);
        t1 = risk_experiment(cfg);
    }
    {
        ThreadGuard g(2);
        t2 = risk_experiment(cfg);
    }
    REQUIRE(t1.rows.size() == t2.rows.size());
    for (std::size_t i = 0; i < t1.rows.size(); ++i) {
        CHECK(t1.rows[i].type1 == t2.rows[i].type1);
        CHECK(t1.rows[i].type2 == t2.rows[i].type2);
        CHECK(t1.rows[i].se == t2.rows[i].se);
    }
}

TEST_CASE("monte carlo p-value is independent of thread count") {
    Rng rng(25);
    Sample s = sample_uniform(200, 1, rng);
    CalibrationConfig cfg{199, 55, 0.05};
    double p1, p2;
    {
        ThreadGuard g(1);
        p1 = *monte_carlo_one_sample(s, {1.0, 1.0}, cfg).p_value;
    }
    {
        ThreadGuard g(2);
        p2 = *monte_carlo_one_sample(s, {1.0, 1.0}, cfg).p_value;
    }
    CHECK(p1 == p2);
}
