#include "gof/binning.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gof {

bool BinSpec::cells_fit_u64() const {
    std::uint64_t acc = 1;
    for (std::uint32_t j = 0; j < dim; ++j) {
        if (acc > std::numeric_limits<std::uint64_t>::max() / kappa) return false;
        acc *= kappa;
    }
    return true;
}

CellCount total_cells(const BinSpec& spec) {
    CellCount out;
    out.approx = std::pow(static_cast<double>(spec.kappa), static_cast<double>(spec.dim));
    if (spec.cells_fit_u64()) {
        std::uint64_t acc = 1;
        for (std::uint32_t j = 0; j < spec.dim; ++j) acc *= spec.kappa;
        out.exact = true;
        out.value = acc;
        out.approx = static_cast<double>(acc);
    } else {
        out.exact = false;
        out.value = 0;
    }
    return out;
}

std::uint32_t axis_index(double x, std::uint32_t kappa, std::uint32_t axis) {
    if (!(x >= 0.0 && x <= 1.0)) {
        std::ostringstream os;
        os << "coordinate " << x << " on axis " << axis << " outside [0,1]";
        throw DataError(os.str());
    }
    double idx = std::ceil(static_cast<double>(kappa) * x);
    if (idx < 1.0) return 1;  // x == 0
    if (idx > static_cast<double>(kappa)) return kappa;
    return static_cast<std::uint32_t>(idx);
}

BinKey bin_index(std::span<const double> point, const BinSpec& spec) {
    if (point.size() != spec.dim)
        throw ContractError("bin_index: point dimension does not match spec");
    BinKey key(spec.dim);
    for (std::uint32_t j = 0; j < spec.dim; ++j)
        key[j] = axis_index(point[j], spec.kappa, j);
    return key;
}

SparseCounts count_bins(const Sample& sample, const BinSpec& spec) {
    if (sample.dim != spec.dim)
        throw ContractError("count_bins: sample dimension does not match spec");
    SparseCounts out;
    out.spec = spec;
    out.total = sample.size();
    out.counts.reserve(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i)
        ++out.counts[bin_index(sample.point(i), spec)];
    return out;
}

std::uint64_t bin_code(std::span<const double> point, const BinSpec& spec) {
    std::uint64_t code = 0;
    std::uint64_t stride = 1;
    for (std::uint32_t j = 0; j < spec.dim; ++j) {
        code += static_cast<std::uint64_t>(axis_index(point[j], spec.kappa, j) - 1) * stride;
        stride *= spec.kappa;
    }
    return code;
}

std::vector<std::uint64_t> bin_codes_serial(const Sample& sample, const BinSpec& spec) {
    if (sample.dim != spec.dim)
        throw ContractError("bin_codes: sample dimension does not match spec");
    if (!spec.cells_fit_u64())
        throw ContractError("bin_codes: kappa^dim exceeds 64-bit range; use count_bins");
    std::vector<std::uint64_t> codes(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i)
        codes[i] = bin_code(sample.point(i), spec);
    return codes;
}

std::vector<std::uint64_t> bin_codes(const Sample& sample, const BinSpec& spec) {
    if (sample.dim != spec.dim)
        throw ContractError("bin_codes: sample dimension does not match spec");
    if (!spec.cells_fit_u64())
        throw ContractError("bin_codes: kappa^dim exceeds 64-bit range; use count_bins");
    // Validate up front: the parallel loop below must not throw.
    for (double v : sample.values)
        if (!(v >= 0.0 && v <= 1.0))
            throw DataError("bin_codes: coordinate outside [0,1]");

    const std::int64_t n = static_cast<std::int64_t>(sample.size());
    std::vector<std::uint64_t> codes(sample.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        codes[static_cast<std::size_t>(i)] = bin_code(sample.point(static_cast<std::size_t>(i)), spec);
    return codes;
}

BinKey unpack_code(std::uint64_t code, const BinSpec& spec) {
    BinKey key(spec.dim);
    for (std::uint32_t j = 0; j < spec.dim; ++j) {
        key[j] = static_cast<std::uint32_t>(code % spec.kappa) + 1;
        code /= spec.kappa;
    }
    return key;
}

SparseCounts counts_from_codes(const std::vector<std::uint64_t>& codes, const BinSpec& spec) {
    SparseCounts out;
    out.spec = spec;
    out.total = codes.size();
    out.counts.reserve(codes.size());
    for (std::uint64_t c : codes) ++out.counts[unpack_code(c, spec)];
    return out;
}

}  // namespace gof
