#include "gof/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gof/binning.hpp"
#include "gof/generators.hpp"

namespace gof {

namespace {

constexpr std::uint64_t kPermRole = 0x7065726d;  // substream role tags
constexpr std::uint64_t kNullRole = 0x6e756c6c;

void check_config(const CalibrationConfig& c) {
    if (c.replicates < 1) throw ContractError("CalibrationConfig: replicates must be >= 1");
    if (!(c.alpha > 0.0 && c.alpha < 1.0))
        throw ContractError("CalibrationConfig: alpha must lie in (0, 1)");
}

double add_one_pvalue(std::uint64_t at_least, std::uint64_t B) {
    return static_cast<double>(1 + at_least) / static_cast<double>(B + 1);
}

// Counts replicates whose statistic reaches the observed value. Exceptions
// from user callables are captured and rethrown after the parallel loop.
template <typename Body>
std::uint64_t count_at_least(std::uint64_t replicates, Body&& body) {
    std::uint64_t at_least = 0;
    std::string error;
    const std::int64_t B = static_cast<std::int64_t>(replicates);
#pragma omp parallel for schedule(static) reduction(+ : at_least)
    for (std::int64_t b = 0; b < B; ++b) {
        try {
            if (body(static_cast<std::uint64_t>(b))) ++at_least;
        } catch (const std::exception& e) {
#pragma omp critical
            if (error.empty()) error = e.what();
        }
    }
    if (!error.empty()) throw ContractError("calibration replicate failed: " + error);
    return at_least;
}

// Relabeling b: shuffle 0..t-1 with substream (seed, b); the first m slots go
// to the first group. Shared by the generic and fused paths so their p-values
// agree exactly.
std::vector<std::uint32_t> relabeling(std::uint64_t seed, std::uint64_t b, std::size_t t) {
    std::vector<std::uint32_t> idx(t);
    std::iota(idx.begin(), idx.end(), 0u);
    Rng rng(seed, stream_id(kPermRole, b));
    rng.shuffle(idx);
    return idx;
}

}  // namespace

double monte_carlo_pvalue(double observed_stat,
                          const std::function<Sample(std::uint64_t)>& null_sampler,
                          const std::function<double(const Sample&)>& statistic,
                          const CalibrationConfig& config) {
    check_config(config);
    const std::uint64_t at_least = count_at_least(config.replicates, [&](std::uint64_t b) {
        const Sample s = null_sampler(b);
        return statistic(s) >= observed_stat;
    });
    return add_one_pvalue(at_least, config.replicates);
}

double permutation_pvalue(const Sample& x, const Sample& y,
                          const std::function<double(const Sample&, const Sample&)>& statistic,
                          const CalibrationConfig& config) {
    check_config(config);
    if (x.dim != y.dim) throw ContractError("permutation_pvalue: dimension mismatch");
    const std::size_t m = x.size(), n = y.size(), t = m + n;
    if (t < 2) throw ContractError("permutation_pvalue: pooled sample size must be >= 2");

    Sample pool;
    pool.dim = x.dim;
    pool.values = x.values;
    pool.values.insert(pool.values.end(), y.values.begin(), y.values.end());

    const double observed = statistic(x, y);
    const std::uint64_t at_least = count_at_least(config.replicates, [&](std::uint64_t b) {
        const auto idx = relabeling(config.seed, b, t);
        Sample xb, yb;
        xb.dim = yb.dim = pool.dim;
        xb.values.reserve(m * pool.dim);
        yb.values.reserve(n * pool.dim);
        for (std::size_t i = 0; i < t; ++i) {
            auto p = pool.point(idx[i]);
            (i < m ? xb : yb).values.insert((i < m ? xb : yb).values.end(), p.begin(), p.end());
        }
        return statistic(xb, yb) >= observed;
    });
    return add_one_pvalue(at_least, config.replicates);
}

namespace {

struct PooledCodes {
    std::vector<std::uint64_t> sorted_codes;
    std::vector<std::uint32_t> sorted_to_original;  // position in pooled order
};

PooledCodes pool_and_sort(const std::vector<std::uint64_t>& xc,
                          const std::vector<std::uint64_t>& yc) {
    PooledCodes pc;
    const std::size_t t = xc.size() + yc.size();
    pc.sorted_codes.reserve(t);
    pc.sorted_to_original.resize(t);
    std::vector<std::uint64_t> all;
    all.reserve(t);
    all.insert(all.end(), xc.begin(), xc.end());
    all.insert(all.end(), yc.begin(), yc.end());
    std::vector<std::uint32_t> order(t);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return all[a] < all[b] || (all[a] == all[b] && a < b); });
    for (std::size_t i = 0; i < t; ++i) {
        pc.sorted_codes.push_back(all[order[i]]);
        pc.sorted_to_original[i] = order[i];
    }
    return pc;
}

// Statistic value for one relabeling given labels in pooled-original order.
template <typename StatFn>
double relabeled_stat(const PooledCodes& pc, const std::vector<std::uint8_t>& labels_original,
                      StatFn&& stat) {
    const std::size_t t = pc.sorted_codes.size();
    std::vector<std::uint8_t> labels_sorted(t);
    for (std::size_t i = 0; i < t; ++i)
        labels_sorted[i] = labels_original[pc.sorted_to_original[i]];
    return stat(pc.sorted_codes, labels_sorted);
}

template <typename StatFn>
TestResult permutation_binned(const Sample& x, const Sample& y, std::uint32_t kappa,
                              const CalibrationConfig& config, StatFn&& stat,
                              Calibration tag) {
    check_config(config);
    if (x.dim != y.dim) throw ContractError("permutation test: dimension mismatch");
    const std::size_t m = x.size(), n = y.size(), t = m + n;
    if (t < 2) throw ContractError("permutation test: pooled sample size must be >= 2");

    const BinSpec spec(kappa, x.dim);
    const auto pc = pool_and_sort(bin_codes(x, spec), bin_codes(y, spec));

    std::vector<std::uint8_t> observed_labels(t, 0);
    for (std::size_t i = m; i < t; ++i) observed_labels[i] = 1;
    const double observed = relabeled_stat(pc, observed_labels, stat);

    const std::uint64_t at_least = count_at_least(config.replicates, [&](std::uint64_t b) {
        const auto idx = relabeling(config.seed, b, t);
        std::vector<std::uint8_t> labels(t);
        for (std::size_t i = 0; i < t; ++i) labels[idx[i]] = (i < m) ? 0 : 1;
        return relabeled_stat(pc, labels, stat) >= observed;
    });

    TestResult r;
    r.statistic = observed;
    r.p_value = add_one_pvalue(at_least, config.replicates);
    r.reject = *r.p_value <= config.alpha;
    r.threshold = config.alpha;
    r.kappa_used = kappa;
    r.calibration = tag;
    return r;
}

}  // namespace

TestResult permutation_test_gamma(const Sample& x, const Sample& y, std::uint32_t kappa,
                                  const CalibrationConfig& config) {
    if (x.size() != y.size())
        throw ContractError("permutation_test_gamma: Gamma_2 requires m == n; use the normalized statistic");
    return permutation_binned(
        x, y, kappa, config,
        [](const std::vector<std::uint64_t>& codes, const std::vector<std::uint8_t>& labels) {
            return static_cast<double>(gamma_two_pooled(codes, labels));
        },
        Calibration::permutation);
}

TestResult permutation_test_normalized(const Sample& x, const Sample& y, std::uint32_t kappa,
                                       const CalibrationConfig& config) {
    const std::uint64_t m = x.size(), n = y.size();
    return permutation_binned(
        x, y, kappa, config,
        [m, n](const std::vector<std::uint64_t>& codes, const std::vector<std::uint8_t>& labels) {
            return chi_normalized_pooled(codes, labels, m, n);
        },
        Calibration::permutation);
}

namespace {

// Multiscale permutation machinery: finest-scale Morton codes of the pooled
// sample, walked at every dyadic scale per relabeling.
struct MultiscalePool {
    std::vector<std::uint64_t> sorted_codes;
    std::vector<std::uint32_t> sorted_to_original;
    int b_max = 0;
    std::uint32_t d = 1;
};

MultiscalePool multiscale_pool(const Sample& x, const Sample& y, std::uint32_t d) {
    if (x.dim != d || y.dim != d)
        throw ContractError("permutation_multiscale: dimension mismatch");
    const std::uint64_t m_min = std::min<std::uint64_t>(x.size(), y.size());
    const int b_max = multiscale_b_max(m_min, d);
    if (b_max < 1)
        throw ContractError("permutation_multiscale: no admissible scale (m too small for d)");
    if (static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(b_max) > 63)
        throw ContractError("permutation_multiscale: packed dyadic code exceeds 64 bits");

    const std::uint32_t kappa = 1u << b_max;
    const BinSpec spec(kappa, d);
    auto xc = bin_codes(x, spec);
    auto yc = bin_codes(y, spec);
    // Convert flat codes to Morton layout: unpack per-axis, interleave bits.
    auto to_morton = [&](std::uint64_t code) {
        std::uint64_t out = 0;
        for (std::uint32_t j = 0; j < d; ++j) {
            const std::uint64_t field = code % kappa;
            code /= kappa;
            for (int k = 0; k < b_max; ++k)
                out |= ((field >> k) & 1ULL) << (static_cast<std::uint32_t>(k) * d + j);
        }
        return out;
    };
    for (auto& c : xc) c = to_morton(c);
    for (auto& c : yc) c = to_morton(c);

    auto pc = pool_and_sort(xc, yc);
    MultiscalePool mp;
    mp.sorted_codes = std::move(pc.sorted_codes);
    mp.sorted_to_original = std::move(pc.sorted_to_original);
    mp.b_max = b_max;
    mp.d = d;
    return mp;
}

// Max over scales of the standardized statistic for one relabeling.
double multiscale_max_stat(const MultiscalePool& mp, const std::vector<std::uint8_t>& labels_orig,
                           std::uint64_t m, std::uint64_t n) {
    const std::size_t t = mp.sorted_codes.size();
    std::vector<std::uint8_t> labels(t);
    for (std::size_t i = 0; i < t; ++i) labels[i] = labels_orig[mp.sorted_to_original[i]];

    const bool equal_sizes = (m == n);
    const double md = static_cast<double>(m), nd = static_cast<double>(n);
    double best = -std::numeric_limits<double>::infinity();
    for (int b = mp.b_max; b >= 1; --b) {
        const std::uint32_t shift = static_cast<std::uint32_t>(mp.b_max - b) * mp.d;
        double scale_stat;
        if (equal_sizes) {
            std::uint64_t gamma = 0;
            std::size_t i = 0;
            while (i < t) {
                const std::uint64_t cell = mp.sorted_codes[i] >> shift;
                std::int64_t diff = 0;
                while (i < t && (mp.sorted_codes[i] >> shift) == cell) {
                    diff += labels[i] ? -1 : 1;
                    ++i;
                }
                gamma += static_cast<std::uint64_t>(diff * diff);
            }
            // (Gamma - 2m) kappa^{d/2} / m: the analytic null scale at kappa.
            const double kd2 = std::pow(2.0, 0.5 * static_cast<double>(b) * mp.d);
            scale_stat = (static_cast<double>(gamma) - 2.0 * md) * kd2 / md;
        } else {
            // Normalized statistic divided by its exact permutation mean
            // mn t (K_occ - 1) / (t - 1).
            double chi = 0.0;
            std::uint64_t occupied = 0;
            std::size_t i = 0;
            while (i < t) {
                const std::uint64_t cell = mp.sorted_codes[i] >> shift;
                std::uint64_t mk = 0, nk = 0;
                while (i < t && (mp.sorted_codes[i] >> shift) == cell) {
                    if (labels[i]) ++nk; else ++mk;
                    ++i;
                }
                ++occupied;
                const double num = nd * static_cast<double>(mk) - md * static_cast<double>(nk);
                chi += num * num / static_cast<double>(mk + nk);
            }
            const double mean0 = md * nd * static_cast<double>(t) *
                                 (static_cast<double>(occupied) - 1.0) /
                                 (static_cast<double>(t) - 1.0);
            scale_stat = mean0 > 0.0 ? chi / mean0 : 0.0;
        }
        best = std::max(best, scale_stat);
    }
    return best;
}

}  // namespace

TestResult permutation_multiscale(const Sample& x, const Sample& y, std::uint32_t d,
                                  const CalibrationConfig& config) {
    check_config(config);
    const std::size_t m = x.size(), n = y.size(), t = m + n;
    if (t < 2) throw ContractError("permutation_multiscale: pooled sample size must be >= 2");
    const auto mp = multiscale_pool(x, y, d);

    std::vector<std::uint8_t> observed_labels(t, 0);
    for (std::size_t i = m; i < t; ++i) observed_labels[i] = 1;
    const double observed = multiscale_max_stat(mp, observed_labels, m, n);

    const std::uint64_t at_least = count_at_least(config.replicates, [&](std::uint64_t b) {
        const auto idx = relabeling(config.seed, b, t);
        std::vector<std::uint8_t> labels(t);
        for (std::size_t i = 0; i < t; ++i) labels[idx[i]] = (i < m) ? 0 : 1;
        return multiscale_max_stat(mp, labels, m, n) >= observed;
    });

    TestResult r;
    r.statistic = observed;
    r.p_value = add_one_pvalue(at_least, config.replicates);
    r.reject = *r.p_value <= config.alpha;
    r.threshold = config.alpha;
    r.kappa_used = 1u << mp.b_max;
    r.calibration = Calibration::permutation;
    return r;
}

TestResult monte_carlo_one_sample(const Sample& sample, const SmoothnessParams& params,
                                  const CalibrationConfig& config) {
    check_config(config);
    const std::uint64_t m = sample.size();
    const std::uint32_t kappa = kappa_for(m, params.s, sample.dim);
    const BinSpec spec(kappa, sample.dim);
    const double observed = gamma_one(count_bins(sample, spec), m);

    const std::uint32_t d = sample.dim;
    const std::uint64_t seed = config.seed;
    const double p = monte_carlo_pvalue(
        observed,
        [m, d, seed](std::uint64_t b) {
            Rng rng(seed, stream_id(kNullRole, b));
            return sample_uniform(m, d, rng);
        },
        [&spec, m](const Sample& s) { return gamma_one(count_bins(s, spec), m); }, config);

    TestResult r;
    r.statistic = observed;
    r.p_value = p;
    r.reject = p <= config.alpha;
    r.threshold = config.alpha;
    r.kappa_used = kappa;
    r.calibration = Calibration::monte_carlo;
    return r;
}

TestResult permutation_two_sample(const Sample& x, const Sample& y,
                                  const SmoothnessParams& params, bool normalized,
                                  const CalibrationConfig& config) {
    const std::uint64_t m_min = std::min<std::uint64_t>(x.size(), y.size());
    if (m_min < 1) throw ContractError("permutation_two_sample: empty sample");
    const std::uint32_t kappa = kappa_for(m_min, params.s, x.dim);
    if (!normalized && x.size() != y.size())
        throw ContractError(
            "permutation_two_sample: Gamma_2 requires m == n; pass normalized=true for unequal sizes");
    return normalized ? permutation_test_normalized(x, y, kappa, config)
                      : permutation_test_gamma(x, y, kappa, config);
}

}  // namespace gof
