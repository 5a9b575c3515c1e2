#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gof/binning.hpp"
#include "gof/sample.hpp"

namespace gof {

// Hölder class parameters: exponent s and constant L.
struct SmoothnessParams {
    double s = 1.0;
    double L = 1.0;
};

enum class Calibration { analytic, monte_carlo, permutation };

const char* to_string(Calibration c);

struct TestResult {
    double statistic = 0.0;
    double threshold = 0.0;
    bool reject = false;
    std::uint32_t kappa_used = 1;
    std::optional<double> p_value;
    Calibration calibration = Calibration::analytic;
    std::vector<std::string> warnings;
};

struct MultiscaleResult {
    struct Scale {
        std::uint32_t kappa;
        double gamma;
        double tau;
        bool exceeded;
    };
    std::vector<Scale> per_scale;
    bool reject = false;
    int b_max = 0;
};

// Bin count per axis: floor(m^{2/(4s+d)}), at least 1. Exact at integer powers.
std::uint32_t kappa_for(std::uint64_t m, double s, std::uint32_t d);

// One-sample statistic sum_k (M_k - m kappa^{-d})^2, computed in the sparse
// form sum M_k^2 - m^2 kappa^{-d}.
double gamma_one(const SparseCounts& counts, std::uint64_t m);

// Two-sample statistic sum_k (M_k - N_k)^2; exact integer.
std::uint64_t gamma_two(const SparseCounts& x_counts, const SparseCounts& y_counts);

// Classical normalized statistic sum (n M_k - m N_k)^2 / (M_k + N_k) over
// occupied cells.
double chi_squared_normalized(const SparseCounts& x_counts, const SparseCounts& y_counts,
                              std::uint64_t m, std::uint64_t n);

// Analytic critical values.
double threshold_one(std::uint64_t m, std::uint32_t kappa, std::uint32_t d, double a);
double threshold_two(std::uint64_t m, std::uint32_t kappa, std::uint32_t d, double a);

// tau_kappa of the multiscale test: 2m + a m sqrt(log m) kappa^{-d/2}, natural log.
double threshold_multiscale(std::uint64_t m, std::uint32_t kappa, std::uint32_t d, double a);

// Null: uniform on [0,1]^d. Rejects when Gamma^one > threshold.
TestResult one_sample_test(const Sample& sample, const SmoothnessParams& params, double a);

// Analytic path; requires m == n (use the permutation path otherwise).
TestResult two_sample_test(const Sample& x, const Sample& y, const SmoothnessParams& params,
                           double a);

// b_max = floor((2/d) log2 m); scales kappa = 2^b, b = 1..b_max.
int multiscale_b_max(std::uint64_t m, std::uint32_t d);

// Gamma_kappa at every dyadic scale 2^1..2^(b_max); requires m == n.
// One pass per scale over codes derived from the finest dyadic grid.
std::vector<std::pair<std::uint32_t, std::uint64_t>> multiscale_scan(const Sample& x,
                                                                     const Sample& y,
                                                                     std::uint32_t d);

// Rejects when Gamma_kappa >= tau_kappa at any dyadic scale.
MultiscaleResult multiscale_test(const Sample& x, const Sample& y, std::uint32_t d, double a);

// --- Packed-code kernels ------------------------------------------------

// Gamma_2 from packed cell codes; sorts copies of the inputs.
std::uint64_t gamma_two_codes(std::vector<std::uint64_t> x_codes,
                              std::vector<std::uint64_t> y_codes);

// Gamma_2 from a pooled sorted code array and a 0/1 label per entry
// (label 0 = x). Used inside permutation loops; O(t).
std::uint64_t gamma_two_pooled(const std::vector<std::uint64_t>& sorted_codes,
                               const std::vector<std::uint8_t>& labels_in_sorted_order);

double chi_normalized_pooled(const std::vector<std::uint64_t>& sorted_codes,
                             const std::vector<std::uint8_t>& labels_in_sorted_order,
                             std::uint64_t m, std::uint64_t n);

}  // namespace gof
