#pragma once

#include <cstdint>
#include <functional>

#include "gof/rng.hpp"
#include "gof/sample.hpp"
#include "gof/statistics.hpp"

namespace gof {

struct CalibrationConfig {
    std::uint64_t replicates = 999;  // B
    std::uint64_t seed = 0;
    double alpha = 0.05;
};

// Add-one Monte Carlo p-value (1 + #{stat_b >= observed}) / (B + 1).
// null_sampler must map a replicate index to a deterministic draw, which keeps
// the result independent of thread count.
double monte_carlo_pvalue(double observed_stat,
                          const std::function<Sample(std::uint64_t)>& null_sampler,
                          const std::function<double(const Sample&)>& statistic,
                          const CalibrationConfig& config);

// Add-one permutation p-value from B random relabelings of the pooled sample
// into groups of the original sizes. Relabeling b draws from substream
// (seed, b); replicates run in parallel with bit-identical results.
double permutation_pvalue(const Sample& x, const Sample& y,
                          const std::function<double(const Sample&, const Sample&)>& statistic,
                          const CalibrationConfig& config);

// Fused permutation test for Gamma_2 at the given bin scale: pools and bins
// once, then relabels cell codes. Produces the same p-value as
// permutation_pvalue with a gamma_two statistic and the same config.
TestResult permutation_test_gamma(const Sample& x, const Sample& y, std::uint32_t kappa,
                                  const CalibrationConfig& config);

// Same machinery for the normalized statistic; accepts m != n.
TestResult permutation_test_normalized(const Sample& x, const Sample& y, std::uint32_t kappa,
                                       const CalibrationConfig& config);

// Permutation calibration of the multiscale statistic: the max over dyadic
// scales of (Gamma_kappa - 2m) kappa^{d/2} / m (for m = n; an analogous
// per-scale standardization of the normalized statistic otherwise). The max
// is taken inside each relabeling, giving a single p-value across scales.
TestResult permutation_multiscale(const Sample& x, const Sample& y, std::uint32_t d,
                                  const CalibrationConfig& config);

// One-sample test with Monte Carlo calibration under the uniform null.
TestResult monte_carlo_one_sample(const Sample& sample, const SmoothnessParams& params,
                                  const CalibrationConfig& config);

// Two-sample test with permutation calibration; kappa = kappa_for(min(m,n), s, d).
TestResult permutation_two_sample(const Sample& x, const Sample& y,
                                  const SmoothnessParams& params, bool normalized,
                                  const CalibrationConfig& config);

}  // namespace gof
