#pragma once

#include <cstdint>
#include <vector>

#include "gof/errors.hpp"

namespace gof {

// Probability vector on a discrete cell set.
struct DiscreteDist {
    std::vector<double> probs;

    explicit DiscreteDist(std::vector<double> p);
};

// eta bounds every cell probability; v1/v2 are the universal constants of the
// Chebyshev power condition, defaulted from the proof's final display.
struct ChebConfig {
    double eta = 1.0;
    double a = 1.0;
    double v1 = 8.0;
    double v2 = 16.0;
};

// E(T) = 2m + m^2 <(p-q)^2> - m (<p^2> + <q^2>) for T = sum_k (M_k - N_k)^2
// with M, N multinomial counts of two independent size-m samples.
double expected_T(const DiscreteDist& p, const DiscreteDist& q, std::uint64_t m);

// Upper bound 2 m^2 <(p+q)^2> + 4 m^3 (<(p+q)(p-q)^2> + 2 <pq> <(p-q)^2>).
double var_T_bound(const DiscreteDist& p, const DiscreteDist& q, std::uint64_t m);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

// Exact E(T) and Var(T) by enumerating multinomial count vectors for both
// samples. Independent of the closed forms above; refuses when |K|^{2m} > 1e8.
Moments brute_force_moments(const DiscreteDist& p, const DiscreteDist& q, std::uint64_t m);

// True iff ||p-q||^2 >= v2 (a sqrt(eta) v a^2 eta v eta) / m. Requires every
// cell probability <= eta.
bool cheb_power_condition(const DiscreteDist& p, const DiscreteDist& q, std::uint64_t m,
                          const ChebConfig& config);

}  // namespace gof
