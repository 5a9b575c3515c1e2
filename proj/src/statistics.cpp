#include "gof/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gof {

const char* to_string(Calibration c) {
    switch (c) {
        case Calibration::analytic: return "analytic";
        case Calibration::monte_carlo: return "monte_carlo";
        case Calibration::permutation: return "permutation";
    }
    return "unknown";
}

std::uint32_t kappa_for(std::uint64_t m, double s, std::uint32_t d) {
    if (m < 1) throw ContractError("kappa_for: m must be >= 1");
    if (!(s > 0.0)) throw ContractError("kappa_for: s must be > 0");
    if (d < 1) throw ContractError("kappa_for: d must be >= 1");
    const double expnt = 2.0 / (4.0 * s + static_cast<double>(d));
    double raw = std::pow(static_cast<double>(m), expnt);
    auto k = static_cast<std::uint64_t>(std::floor(raw));
    // pow can land just under an exact integer power; accept k+1 when
    // (k+1)^{1/expnt} <= m on the log scale.
    const double log_m = std::log(static_cast<double>(m));
    if (std::log(static_cast<double>(k + 1)) / expnt <= log_m * (1.0 + 1e-12) + 1e-12) ++k;
    if (k < 1) k = 1;
    return static_cast<std::uint32_t>(k);
}

double gamma_one(const SparseCounts& counts, std::uint64_t m) {
    if (counts.total != m) {
        std::ostringstream os;
        os << "gamma_one: counts.total = " << counts.total << " but m = " << m;
        throw ContractError(os.str());
    }
    double sum_sq = 0.0;
    for (const auto& [key, c] : counts.counts)
        sum_sq += static_cast<double>(c) * static_cast<double>(c);
    const double cells = std::pow(static_cast<double>(counts.spec.kappa),
                                  static_cast<double>(counts.spec.dim));
    const double md = static_cast<double>(m);
    return sum_sq - md * md / cells;
}

std::uint64_t gamma_two(const SparseCounts& x_counts, const SparseCounts& y_counts) {
    if (!(x_counts.spec == y_counts.spec))
        throw ContractError("gamma_two: BinSpec mismatch between count maps");
    std::uint64_t acc = 0;
    for (const auto& [key, mk] : x_counts.counts) {
        auto it = y_counts.counts.find(key);
        const std::uint64_t nk = (it == y_counts.counts.end()) ? 0 : it->second;
        const std::uint64_t diff = (mk > nk) ? mk - nk : nk - mk;
        acc += diff * diff;
    }
    for (const auto& [key, nk] : y_counts.counts) {
        if (x_counts.counts.find(key) == x_counts.counts.end()) acc += nk * nk;
    }
    return acc;
}

double chi_squared_normalized(const SparseCounts& x_counts, const SparseCounts& y_counts,
                              std::uint64_t m, std::uint64_t n) {
    if (!(x_counts.spec == y_counts.spec))
        throw ContractError("chi_squared_normalized: BinSpec mismatch");
    if (x_counts.total != m || y_counts.total != n)
        throw ContractError("chi_squared_normalized: totals do not match m, n");
    const double md = static_cast<double>(m), nd = static_cast<double>(n);
    double acc = 0.0;
    auto cell_term = [&](std::uint64_t mk, std::uint64_t nk) {
        const double num = nd * static_cast<double>(mk) - md * static_cast<double>(nk);
        acc += num * num / static_cast<double>(mk + nk);
    };
    for (const auto& [key, mk] : x_counts.counts) {
        auto it = y_counts.counts.find(key);
        cell_term(mk, it == y_counts.counts.end() ? 0 : it->second);
    }
    for (const auto& [key, nk] : y_counts.counts) {
        if (x_counts.counts.find(key) == x_counts.counts.end()) cell_term(0, nk);
    }
    return acc;
}

double threshold_one(std::uint64_t m, std::uint32_t kappa, std::uint32_t d, double a) {
    const double md = static_cast<double>(m);
    return md + a * md * std::pow(static_cast<double>(kappa), -0.5 * static_cast<double>(d));
}

double threshold_two(std::uint64_t m, std::uint32_t kappa, std::uint32_t d, double a) {
    const double md = static_cast<double>(m);
    return 2.0 * md + a * md * std::pow(static_cast<double>(kappa), -0.5 * static_cast<double>(d));
}

double threshold_multiscale(std::uint64_t m, std::uint32_t kappa, std::uint32_t d, double a) {
    const double md = static_cast<double>(m);
    return 2.0 * md +
           a * md * std::sqrt(std::log(md)) *
               std::pow(static_cast<double>(kappa), -0.5 * static_cast<double>(d));
}

TestResult one_sample_test(const Sample& sample, const SmoothnessParams& params, double a) {
    const std::uint64_t m = sample.size();
    const std::uint32_t kappa = kappa_for(m, params.s, sample.dim);
    const BinSpec spec(kappa, sample.dim);
    const double stat = gamma_one(count_bins(sample, spec), m);
    TestResult r;
    r.statistic = stat;
    r.threshold = threshold_one(m, kappa, sample.dim, a);
    r.reject = stat > r.threshold;
    r.kappa_used = kappa;
    r.calibration = Calibration::analytic;
    if (a < 1.0) r.warnings.push_back("a < 1: analytic risk bound assumes a >= 1");
    return r;
}

TestResult two_sample_test(const Sample& x, const Sample& y, const SmoothnessParams& params,
                           double a) {
    if (x.dim != y.dim) throw ContractError("two_sample_test: dimension mismatch");
    if (x.size() != y.size())
        throw ContractError(
            "two_sample_test: analytic thresholds require m == n; "
            "use permutation calibration or subsample");
    const std::uint64_t m = x.size();
    const std::uint32_t kappa = kappa_for(m, params.s, x.dim);
    const BinSpec spec(kappa, x.dim);
    const std::uint64_t stat = gamma_two(count_bins(x, spec), count_bins(y, spec));
    TestResult r;
    r.statistic = static_cast<double>(stat);
    r.threshold = threshold_two(m, kappa, x.dim, a);
    r.reject = r.statistic > r.threshold;
    r.kappa_used = kappa;
    r.calibration = Calibration::analytic;
    if (a < 1.0) r.warnings.push_back("a < 1: analytic risk bound assumes a >= 1");
    return r;
}

int multiscale_b_max(std::uint64_t m, std::uint32_t d) {
    if (m < 1) return 0;
    return static_cast<int>(std::floor(2.0 / static_cast<double>(d) *
                                       std::log2(static_cast<double>(m)) *
                                       (1.0 + 1e-12)));
}

namespace {

// Morton codes at the finest dyadic scale: bit k of axis j sits at position
// k*d + j. Shifting right by d drops one dyadic level on every axis at once,
// preserves order, and keeps equal coarse cells contiguous in sorted arrays.
std::vector<std::uint64_t> dyadic_codes(const Sample& s, int b_max) {
    const std::uint32_t kappa = 1u << b_max;
    const std::uint32_t d = s.dim;
    std::vector<std::uint64_t> codes(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto p = s.point(i);
        std::uint64_t code = 0;
        for (std::uint32_t j = 0; j < d; ++j) {
            const std::uint64_t field = axis_index(p[j], kappa, j) - 1;
            for (int k = 0; k < b_max; ++k)
                code |= ((field >> k) & 1ULL) << (static_cast<std::uint32_t>(k) * d + j);
        }
        codes[i] = code;
    }
    return codes;
}

}  // namespace

std::vector<std::pair<std::uint32_t, std::uint64_t>> multiscale_scan(const Sample& x,
                                                                     const Sample& y,
                                                                     std::uint32_t d) {
    if (x.dim != d || y.dim != d) throw ContractError("multiscale_scan: dimension mismatch");
    if (x.size() != y.size()) throw ContractError("multiscale_scan: requires m == n");
    const std::uint64_t m = x.size();
    const int b_max = multiscale_b_max(m, d);
    if (b_max < 1) throw ContractError("multiscale_scan: no admissible scale (m too small for d)");
    if (static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(b_max) > 63)
        throw ContractError("multiscale_scan: packed dyadic code exceeds 64 bits");

    auto xc = dyadic_codes(x, b_max);
    auto yc = dyadic_codes(y, b_max);
    struct Entry {
        std::uint64_t code;
        std::uint8_t label;
    };
    std::vector<Entry> pool;
    pool.reserve(xc.size() + yc.size());
    for (auto c : xc) pool.push_back({c, 0});
    for (auto c : yc) pool.push_back({c, 1});
    std::sort(pool.begin(), pool.end(), [](const Entry& a, const Entry& b) {
        return a.code < b.code || (a.code == b.code && a.label < b.label);
    });

    // Scales are independent given the sorted pool; each writes its own slot.
    std::vector<std::pair<std::uint32_t, std::uint64_t>> out(static_cast<std::size_t>(b_max));
#pragma omp parallel for schedule(static)
    for (int b = 1; b <= b_max; ++b) {
        const std::uint32_t shift = static_cast<std::uint32_t>(b_max - b) * d;
        std::uint64_t gamma = 0;
        std::size_t i = 0;
        while (i < pool.size()) {
            const std::uint64_t cell = pool[i].code >> shift;
            std::int64_t diff = 0;
            std::size_t j = i;
            while (j < pool.size() && (pool[j].code >> shift) == cell) {
                diff += pool[j].label ? -1 : 1;
                ++j;
            }
            gamma += static_cast<std::uint64_t>(diff * diff);
            i = j;
        }
        out[static_cast<std::size_t>(b - 1)] = {1u << b, gamma};
    }
    return out;
}

MultiscaleResult multiscale_test(const Sample& x, const Sample& y, std::uint32_t d, double a) {
    const std::uint64_t m = x.size();
    auto scan = multiscale_scan(x, y, d);
    MultiscaleResult res;
    res.b_max = multiscale_b_max(m, d);
    res.per_scale.reserve(scan.size());
    for (const auto& [kappa, gamma] : scan) {
        const double tau = threshold_multiscale(m, kappa, d, a);
        const double g = static_cast<double>(gamma);
        const bool exceeded = g >= tau;  // non-strict, matching the max-test definition
        res.per_scale.push_back({kappa, g, tau, exceeded});
        res.reject = res.reject || exceeded;
    }
    return res;
}

std::uint64_t gamma_two_codes(std::vector<std::uint64_t> x_codes,
                              std::vector<std::uint64_t> y_codes) {
    std::sort(x_codes.begin(), x_codes.end());
    std::sort(y_codes.begin(), y_codes.end());
    std::uint64_t acc = 0;
    std::size_t i = 0, j = 0;
    while (i < x_codes.size() || j < y_codes.size()) {
        std::uint64_t cell;
        if (j == y_codes.size() || (i < x_codes.size() && x_codes[i] < y_codes[j]))
            cell = x_codes[i];
        else
            cell = y_codes[j];
        std::uint64_t mk = 0, nk = 0;
        while (i < x_codes.size() && x_codes[i] == cell) ++mk, ++i;
        while (j < y_codes.size() && y_codes[j] == cell) ++nk, ++j;
        const std::uint64_t diff = (mk > nk) ? mk - nk : nk - mk;
        acc += diff * diff;
    }
    return acc;
}

std::uint64_t gamma_two_pooled(const std::vector<std::uint64_t>& sorted_codes,
                               const std::vector<std::uint8_t>& labels) {
    std::uint64_t acc = 0;
    std::size_t i = 0;
    const std::size_t t = sorted_codes.size();
    while (i < t) {
        const std::uint64_t cell = sorted_codes[i];
        std::int64_t diff = 0;
        while (i < t && sorted_codes[i] == cell) {
            diff += labels[i] ? -1 : 1;
            ++i;
        }
        acc += static_cast<std::uint64_t>(diff * diff);
    }
    return acc;
}

double chi_normalized_pooled(const std::vector<std::uint64_t>& sorted_codes,
                             const std::vector<std::uint8_t>& labels, std::uint64_t m,
                             std::uint64_t n) {
    const double md = static_cast<double>(m), nd = static_cast<double>(n);
    double acc = 0.0;
    std::size_t i = 0;
    const std::size_t t = sorted_codes.size();
    while (i < t) {
        const std::uint64_t cell = sorted_codes[i];
        std::uint64_t mk = 0, nk = 0;
        while (i < t && sorted_codes[i] == cell) {
            if (labels[i]) ++nk; else ++mk;
            ++i;
        }
        const double num = nd * static_cast<double>(mk) - md * static_cast<double>(nk);
        acc += num * num / static_cast<double>(mk + nk);
    }
    return acc;
}

}  // namespace gof
