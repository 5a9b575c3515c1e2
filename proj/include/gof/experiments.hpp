#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gof/fit.hpp"
#include "gof/generators.hpp"
#include "gof/statistics.hpp"

namespace gof {

enum class TestKind { one_sample, two_sample, multiscale, normalized };
enum class CalibKind { analytic, permutation, monte_carlo };

const char* to_string(TestKind k);
const char* to_string(CalibKind k);

struct ExperimentConfig {
    std::vector<std::uint32_t> dims;
    std::vector<std::uint64_t> sizes;
    double smoothness = 1.0;
    double holder_L = 1.0;
    std::vector<double> epsilons;  // L2 separations of the alternatives
    std::uint64_t replicates = 200;
    std::uint64_t seed = 0;
    TestKind test = TestKind::two_sample;
    CalibKind calibration = CalibKind::analytic;
    double a = 1.0;
    double alpha = 0.05;
    std::uint64_t B = 199;  // resampling replicates when calibration != analytic
    double bump_beta = kDefaultBumpSharpness;
    // rate mode
    int bisection_steps = 12;
    std::uint64_t type1_replicates = 2000;

    void validate() const;  // throws ContractError naming the offending field
};

struct RiskRow {
    std::uint32_t d = 1;
    std::uint64_t m = 0;
    double epsilon = 0.0;
    double type1 = 0.0;
    double type2 = 0.0;
    double risk = 0.0;
    double se = 0.0;  // binomial MC standard error of the risk estimate
    double runtime_s = 0.0;
};

struct RiskTable {
    std::vector<RiskRow> rows;
    // Estimation caveat carried into all serialized output.
    std::string note =
        "risk is estimated from below by averaging over the sign-prior alternative, "
        "not the worst case";
};

// Type-I rate under f = g = uniform and type-II rate under freshly drawn
// sign-prior alternatives, for every (d, m, epsilon) cell. Deterministic under
// (config, seed) regardless of thread count; the runtime column excepted.
RiskTable risk_experiment(const ExperimentConfig& config);

struct RatePoint {
    std::uint64_t m = 0;
    double eps_star = 0.0;   // separation at which estimated risk crosses 1/2
    std::uint32_t kappa_test = 1;
};

struct RateResult {
    std::vector<RatePoint> points;
    SlopeFit fit;  // slope of log eps_star against log m
};

// Least-squares slope of log eps* vs log m.
SlopeFit rate_fit(const std::vector<RatePoint>& points);

// For each m: bisection over epsilon locating risk = 1/2 (replicates double
// for the later bisection steps), then the slope fit. Uses dims[0].
RateResult rate_experiment(const ExperimentConfig& config);

// Two-sample risk experiment with both samples pushed through the surface
// map; bins in the ambient dimension at kappa(s, d0) and thresholds with d0.
// Base draws reuse the substreams of the native d0 experiment, so an
// axis-aligned surface reproduces the native run exactly.
RiskTable intrinsic_dim_experiment(std::uint32_t ambient_dim, std::uint32_t intrinsic_dim,
                                   const SurfaceSpec& surface, const ExperimentConfig& config);

// Largest admissible separation for the configured bump (density nonnegativity).
double max_admissible_epsilon(double bump_beta, std::uint32_t d);

}  // namespace gof
