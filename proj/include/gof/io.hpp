#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gof/experiments.hpp"
#include "gof/sample.hpp"

namespace gof {

// Numeric text matrix: one observation per line, d columns, '.' decimal,
// configurable single-character delimiter, optional header line.
struct Matrix {
    std::vector<double> values;  // row-major
    std::size_t rows = 0;
    std::size_t cols = 0;

    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

Matrix load_matrix(const std::string& path, char delimiter = ',');

// Per-column affine transform to [0,1] fitted on the pooled data.
struct RescaleInfo {
    std::vector<double> min;
    std::vector<double> max;
};

RescaleInfo pooled_rescale(const std::vector<const Matrix*>& mats);

// Converts to a Sample in [0,1]^d. Without rescale info, any out-of-range
// value raises DataError citing its row.
Sample to_sample(const Matrix& mat, const std::optional<RescaleInfo>& rescale);

void write_risk_csv(const RiskTable& table, const std::string& path);
std::string risk_csv_string(const RiskTable& table);

}  // namespace gof
