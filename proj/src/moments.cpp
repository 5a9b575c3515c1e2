#include "gof/moments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace gof {

DiscreteDist::DiscreteDist(std::vector<double> p) : probs(std::move(p)) {
    if (probs.empty()) throw ContractError("DiscreteDist: empty probability vector");
    double sum = 0.0;
    for (double v : probs) {
        if (v < 0.0) throw ContractError("DiscreteDist: negative entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ContractError("DiscreteDist: probabilities do not sum to 1 within 1e-12");
}

namespace {

void check_same_length(const DiscreteDist& p, const DiscreteDist& q, const char* who) {
    if (p.probs.size() != q.probs.size()) {
        std::ostringstream os;
        os << who << ": length mismatch (" << p.probs.size() << " vs " << q.probs.size() << ")";
        throw ContractError(os.str());
    }
}

}  // namespace

double expected_T(const DiscreteDist& p, const DiscreteDist& q, std::uint64_t m) {
    check_same_length(p, q, "expected_T");
    if (m < 1) throw ContractError("expected_T: m must be >= 1");
    const double md = static_cast<double>(m);
    double diff2 = 0.0, p2 = 0.0, q2 = 0.0;
    for (std::size_t k = 0; k < p.probs.size(); ++k) {
        const double d = p.probs[k] - q.probs[k];
        diff2 += d * d;
        p2 += p.probs[k] * p.probs[k];
        q2 += q.probs[k] * q.probs[k];
    }
    return 2.0 * md + md * md * diff2 - md * (p2 + q2);
}

double var_T_bound(const DiscreteDist& p, const DiscreteDist& q, std::uint64_t m) {
    check_same_length(p, q, "var_T_bound");
    const double md = static_cast<double>(m);
    double sum_pq2 = 0.0;       // <(p+q)^2>
    double sum_pqd2 = 0.0;      // <(p+q)(p-q)^2>
    double sum_pq = 0.0;        // <pq>
    double sum_d2 = 0.0;        // <(p-q)^2>
    for (std::size_t k = 0; k < p.probs.size(); ++k) {
        const double s = p.probs[k] + q.probs[k];
        const double d = p.probs[k] - q.probs[k];
        sum_pq2 += s * s;
        sum_pqd2 += s * d * d;
        sum_pq += p.probs[k] * q.probs[k];
        sum_d2 += d * d;
    }
    return 2.0 * md * md * sum_pq2 + 4.0 * md * md * md * (sum_pqd2 + 2.0 * sum_pq * sum_d2);
}

namespace {

// All count vectors summing to m, with their multinomial probabilities.
struct Outcome {
    std::vector<std::uint32_t> counts;
    double prob;
};

std::vector<Outcome> enumerate_outcomes(const std::vector<double>& probs, std::uint64_t m) {
    const std::size_t K = probs.size();
    std::vector<double> log_fact(m + 1, 0.0);
    for (std::uint64_t i = 2; i <= m; ++i)
        log_fact[i] = log_fact[i - 1] + std::log(static_cast<double>(i));

    std::vector<Outcome> out;
    std::vector<std::uint32_t> counts(K, 0);
    std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t k, std::uint64_t left) {
        if (k + 1 == K) {
            counts[k] = static_cast<std::uint32_t>(left);
            double logw = log_fact[m];
            bool impossible = false;
            for (std::size_t j = 0; j < K; ++j) {
                logw -= log_fact[counts[j]];
                if (counts[j] > 0) {
                    if (probs[j] == 0.0) { impossible = true; break; }
                    logw += counts[j] * std::log(probs[j]);
                }
            }
            out.push_back({counts, impossible ? 0.0 : std::exp(logw)});
            return;
        }
        for (std::uint64_t c = 0; c <= left; ++c) {
            counts[k] = static_cast<std::uint32_t>(c);
            rec(k + 1, left - c);
        }
    };
    rec(0, m);
    return out;
}

}  // namespace

Moments brute_force_moments(const DiscreteDist& p, const DiscreteDist& q, std::uint64_t m) {
    check_same_length(p, q, "brute_force_moments");
    const std::size_t K = p.probs.size();
    const double states = std::pow(static_cast<double>(K), 2.0 * static_cast<double>(m));
    if (states > 1e8) {
        std::ostringstream os;
        os << "brute_force_moments: |K|^(2m) = " << states << " exceeds the 1e8 enumeration bound";
        throw ContractError(os.str());
    }
    if (m == 0) return {0.0, 0.0};

    const auto a_outcomes = enumerate_outcomes(p.probs, m);
    const auto b_outcomes = enumerate_outcomes(q.probs, m);

    double mean = 0.0, mean_sq = 0.0;
    for (const auto& a : a_outcomes) {
        if (a.prob == 0.0) continue;
        for (const auto& b : b_outcomes) {
            if (b.prob == 0.0) continue;
            double t = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                const double d = static_cast<double>(a.counts[k]) - static_cast<double>(b.counts[k]);
                t += d * d;
            }
            const double w = a.prob * b.prob;
            mean += w * t;
            mean_sq += w * t * t;
        }
    }
    return {mean, mean_sq - mean * mean};
}

bool cheb_power_condition(const DiscreteDist& p, const DiscreteDist& q, std::uint64_t m,
                          const ChebConfig& config) {
    check_same_length(p, q, "cheb_power_condition");
    if (!(config.eta > 0.0 && config.eta <= 1.0))
        throw ContractError("cheb_power_condition: eta must lie in (0, 1]");
    for (std::size_t k = 0; k < p.probs.size(); ++k) {
        if (p.probs[k] > config.eta || q.probs[k] > config.eta) {
            std::ostringstream os;
            os << "cheb_power_condition: cell " << k << " violates the eta bound ("
               << std::max(p.probs[k], q.probs[k]) << " > " << config.eta << ")";
            throw ContractError(os.str());
        }
    }
    double diff2 = 0.0;
    for (std::size_t k = 0; k < p.probs.size(); ++k) {
        const double d = p.probs[k] - q.probs[k];
        diff2 += d * d;
    }
    const double root_eta = std::sqrt(config.eta);
    const double rhs = config.v2 *
                       std::max({config.a * root_eta, config.a * config.a * config.eta, config.eta}) /
                       static_cast<double>(m);
    return diff2 >= rhs;
}

}  // namespace gof
