#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gof/errors.hpp"

namespace gof {

// Function values on the midpoint grid ((i-1/2)/res)^d of [0,1]^d, d <= 3.
// Integrals below are midpoint Riemann sums on this grid.
struct GridFunction {
    std::uint32_t dim = 1;
    std::uint32_t res = 1;
    std::vector<double> values;  // res^dim entries, axis-0 fastest

    GridFunction(std::uint32_t d, std::uint32_t r);
};

GridFunction sample_grid(std::uint32_t dim, std::uint32_t res,
                         const std::function<double(std::span<const double>)>& f);

// Cell-averaging operator: piecewise-constant function equal on each of the
// kappa^d cells to the average of h there. Grid resolution must be divisible
// by kappa. Averages use pairwise summation, so re-applying the operator
// reproduces its output bit-for-bit when res/kappa is a power of two.
GridFunction w_kappa(const GridFunction& h, std::uint32_t kappa);

// sqrt of the midpoint Riemann sum of h^2.
double l2_norm(const GridFunction& h);

struct SweepRow {
    std::uint32_t kappa;
    double w_norm;  // ||W_kappa[h]||_2
    double h_norm;  // ||h||_2
};

// ||W_kappa[h]||_2 against ||h||_2 for each requested kappa; the norm gap
// should decay at rate kappa^{-s} or faster for h in the (s, L) Holder class.
std::vector<SweepRow> approx_inequality_sweep(const GridFunction& h,
                                              const std::vector<std::uint32_t>& kappas);

}  // namespace gof
