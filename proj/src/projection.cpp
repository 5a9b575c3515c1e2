#include "gof/projection.hpp"

#include <array>
#include <cmath>

namespace gof {

namespace {

std::size_t grid_size(std::uint32_t dim, std::uint32_t res) {
    std::size_t n = 1;
    for (std::uint32_t j = 0; j < dim; ++j) n *= res;
    return n;
}

// Pairwise sum; exact for blocks of identical values when the block size is a
// power of two (every partial sum is then a power-of-two multiple).
double pairwise_sum(const double* v, std::size_t n) {
    if (n == 0) return 0.0;
    if (n == 1) return v[0];
    if (n == 2) return v[0] + v[1];
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

}  // namespace

GridFunction::GridFunction(std::uint32_t d, std::uint32_t r) : dim(d), res(r) {
    if (dim < 1 || dim > 3) throw ContractError("GridFunction: dim must be 1, 2 or 3");
    if (res < 1) throw ContractError("GridFunction: res must be >= 1");
    values.assign(grid_size(dim, res), 0.0);
}

GridFunction sample_grid(std::uint32_t dim, std::uint32_t res,
                         const std::function<double(std::span<const double>)>& f) {
    GridFunction g(dim, res);
    std::array<double, 3> x{};
    std::array<std::uint32_t, 3> idx{};
    for (std::size_t flat = 0; flat < g.values.size(); ++flat) {
        std::size_t rem = flat;
        for (std::uint32_t j = 0; j < dim; ++j) {
            idx[j] = static_cast<std::uint32_t>(rem % res);
            rem /= res;
            x[j] = (static_cast<double>(idx[j]) + 0.5) / static_cast<double>(res);
        }
        g.values[flat] = f(std::span<const double>(x.data(), dim));
    }
    return g;
}

GridFunction w_kappa(const GridFunction& h, std::uint32_t kappa) {
    if (kappa < 1) throw ContractError("w_kappa: kappa must be >= 1");
    if (h.res % kappa != 0)
        throw ContractError("w_kappa: grid resolution must be divisible by kappa");
    const std::uint32_t block = h.res / kappa;

    GridFunction out(h.dim, h.res);
    // Iterate cells; gather the block into a scratch buffer in a fixed order.
    std::size_t cells = grid_size(h.dim, kappa);
    std::size_t block_pts = grid_size(h.dim, block);
    std::vector<double> scratch(block_pts);
    std::vector<std::size_t> offsets(block_pts);

    std::array<std::uint32_t, 3> bidx{};
    for (std::size_t b = 0; b < block_pts; ++b) {
        std::size_t rem = b;
        std::size_t off = 0, stride = 1;
        for (std::uint32_t j = 0; j < h.dim; ++j) {
            bidx[j] = static_cast<std::uint32_t>(rem % block);
            rem /= block;
            off += bidx[j] * stride;
            stride *= h.res;
        }
        offsets[b] = off;
    }

    std::array<std::uint32_t, 3> cidx{};
    for (std::size_t c = 0; c < cells; ++c) {
        std::size_t rem = c;
        std::size_t base = 0, stride = 1;
        for (std::uint32_t j = 0; j < h.dim; ++j) {
            cidx[j] = static_cast<std::uint32_t>(rem % kappa);
            rem /= kappa;
            base += static_cast<std::size_t>(cidx[j]) * block * stride;
            stride *= h.res;
        }
        for (std::size_t b = 0; b < block_pts; ++b) scratch[b] = h.values[base + offsets[b]];
        const double avg = pairwise_sum(scratch.data(), block_pts) /
                           static_cast<double>(block_pts);
        for (std::size_t b = 0; b < block_pts; ++b) out.values[base + offsets[b]] = avg;
    }
    return out;
}

double l2_norm(const GridFunction& h) {
    double acc = 0.0;
    for (double v : h.values) acc += v * v;
    return std::sqrt(acc / static_cast<double>(h.values.size()));
}

std::vector<SweepRow> approx_inequality_sweep(const GridFunction& h,
                                              const std::vector<std::uint32_t>& kappas) {
    std::vector<SweepRow> rows;
    rows.reserve(kappas.size());
    const double hn = l2_norm(h);
    for (std::uint32_t k : kappas) rows.push_back({k, l2_norm(w_kappa(h, k)), hn});
    return rows;
}

}  // namespace gof
