#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gof/errors.hpp"

namespace gof {

// Ordered list of points in [0,1]^d, row-major.
struct Sample {
    std::vector<double> values;  // size() * dim entries
    std::uint32_t dim = 1;

    Sample() = default;
    Sample(std::vector<double> v, std::uint32_t d) : values(std::move(v)), dim(d) {
        if (dim == 0) throw ContractError("Sample: dim must be >= 1");
        if (values.size() % dim != 0)
            throw ContractError("Sample: flat size not a multiple of dim");
    }

    std::size_t size() const { return dim ? values.size() / dim : 0; }

    std::span<const double> point(std::size_t i) const {
        return {values.data() + i * dim, dim};
    }

    void push_point(std::span<const double> p) {
        values.insert(values.end(), p.begin(), p.end());
    }
};

}  // namespace gof
