#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "gof/errors.hpp"

namespace gof {

// Adaptive Simpson on [a, b]. tol is an absolute tolerance for the whole
// interval; throws when the recursion depth limit is hit before convergence.
double integrate_1d(const std::function<double(double)>& f, double a, double b, double tol,
                    int max_depth = 48);

// Iterated adaptive integration over [0,1]^d, d <= 3. Inner dimensions are
// integrated per outer evaluation point, so cost grows quickly with d.
double integrate_unit_cube(const std::function<double(std::span<const double>)>& f,
                           std::uint32_t d, double tol);

}  // namespace gof
