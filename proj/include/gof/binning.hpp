#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "gof/sample.hpp"

namespace gof {

// Partition of [0,1]^d into kappa^d congruent half-open cells ((k-1)/kappa, k/kappa].
// kappa^d is never materialized; counts are sparse.
struct BinSpec {
    std::uint32_t kappa = 1;
    std::uint32_t dim = 1;

    BinSpec() = default;
    BinSpec(std::uint32_t k, std::uint32_t d) : kappa(k), dim(d) {
        if (kappa < 1 || dim < 1) throw ContractError("BinSpec: kappa and dim must be >= 1");
    }

    bool operator==(const BinSpec& o) const { return kappa == o.kappa && dim == o.dim; }

    // True when kappa^dim fits a 64-bit integer, enabling packed cell codes.
    bool cells_fit_u64() const;
};

// kappa^dim, exact when representable.
struct CellCount {
    bool exact = true;
    std::uint64_t value = 1;  // valid when exact
    double approx = 1.0;      // always valid
};

CellCount total_cells(const BinSpec& spec);

// Multi-index of a cell; coords[j] in [1, kappa].
using BinKey = std::vector<std::uint32_t>;

struct BinKeyHash {
    std::size_t operator()(const BinKey& k) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (std::uint32_t v : k) {
            h ^= v;
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

// Occupied cells only; sum of counts equals total.
struct SparseCounts {
    BinSpec spec;
    std::unordered_map<BinKey, std::uint64_t, BinKeyHash> counts;
    std::uint64_t total = 0;
};

// Index along one axis: ceil(kappa * x) clamped to [1, kappa]; x = 0 maps to 1.
std::uint32_t axis_index(double x, std::uint32_t kappa, std::uint32_t axis);

// Cell containing a point; throws DataError naming the offending axis when a
// coordinate falls outside [0,1].
BinKey bin_index(std::span<const double> point, const BinSpec& spec);

// Serial reference counter; the ground truth the packed kernels are tested against.
SparseCounts count_bins(const Sample& sample, const BinSpec& spec);

// --- Packed-code kernel path ------------------------------------------------
// Cells are flattened to a single integer (axis-0 least significant). Requires
// spec.cells_fit_u64(). Used by the calibration and experiment hot loops.

std::uint64_t bin_code(std::span<const double> point, const BinSpec& spec);

// One code per point. OpenMP-parallel; output is positionally deterministic.
std::vector<std::uint64_t> bin_codes(const Sample& sample, const BinSpec& spec);

// Serial variant kept as the reference for the parallel kernel.
std::vector<std::uint64_t> bin_codes_serial(const Sample& sample, const BinSpec& spec);

// Rebuilds sparse counts from packed codes (test/interop helper).
SparseCounts counts_from_codes(const std::vector<std::uint64_t>& codes, const BinSpec& spec);

BinKey unpack_code(std::uint64_t code, const BinSpec& spec);

}  // namespace gof
