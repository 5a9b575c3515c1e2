#pragma once

#include <vector>

#include "gof/errors.hpp"

namespace gof {

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
};

// Ordinary least squares y = intercept + slope * x.
SlopeFit least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gof
