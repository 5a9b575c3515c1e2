#include "gof/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "gof/binning.hpp"
#include "gof/calibration.hpp"

namespace gof {

const char* to_string(TestKind k) {
    switch (k) {
        case TestKind::one_sample: return "one_sample";
        case TestKind::two_sample: return "two_sample";
        case TestKind::multiscale: return "multiscale";
        case TestKind::normalized: return "normalized";
    }
    return "unknown";
}

const char* to_string(CalibKind k) {
    switch (k) {
        case CalibKind::analytic: return "analytic";
        case CalibKind::permutation: return "permutation";
        case CalibKind::monte_carlo: return "monte_carlo";
    }
    return "unknown";
}

void ExperimentConfig::validate() const {
    if (dims.empty()) throw ContractError("config.dims: must be nonempty");
    for (std::size_t i = 0; i < dims.size(); ++i)
        if (dims[i] < 1) throw ContractError("config.dims[" + std::to_string(i) + "]: must be >= 1");
    if (sizes.empty()) throw ContractError("config.sizes: must be nonempty");
    for (std::size_t i = 0; i < sizes.size(); ++i)
        if (sizes[i] < 1) throw ContractError("config.sizes[" + std::to_string(i) + "]: must be >= 1");
    if (!(smoothness > 0.0)) throw ContractError("config.smoothness: must be > 0");
    bool needs_alternatives = false;
    for (double e : epsilons)
        if (e > 0.0) needs_alternatives = true;
    if (epsilons.empty()) needs_alternatives = true;  // rate mode bisects over epsilon
    if (needs_alternatives && smoothness > 2.0)
        throw ContractError(
            "config.smoothness: alternative construction supports s <= 2 "
            "(bump derivative bounds are computed up to order 2)");
    if (!(holder_L > 0.0)) throw ContractError("config.holder_L: must be > 0");
    if (replicates < 1) throw ContractError("config.replicates: must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ContractError("config.alpha: must lie in (0,1)");
    if (B < 1) throw ContractError("config.B: must be >= 1");
    if (!(bump_beta > 0.0)) throw ContractError("config.bump_beta: must be > 0");
    if (bisection_steps < 1) throw ContractError("config.bisection_steps: must be >= 1");
    if (type1_replicates < 1) throw ContractError("config.type1_replicates: must be >= 1");
    if (test == TestKind::normalized && calibration == CalibKind::analytic)
        throw ContractError("config.test: the normalized statistic has no analytic threshold");
    if (test == TestKind::one_sample && calibration == CalibKind::permutation)
        throw ContractError("config.calibration: permutation applies to two-sample tests only");
}

double max_admissible_epsilon(double bump_beta, std::uint32_t d) {
    return 1.0 / make_bump(d, bump_beta)->sup_norm();
}

namespace {

// Substream roles inside one experiment cell replicate.
enum Role : std::uint64_t {
    kRoleNullX = 1,
    kRoleNullY = 2,
    kRoleAltX = 3,
    kRoleAltY = 4,
    kRoleSigns = 5,
    kRoleCalib = 6,
    kRoleAltCalib = 7
};

std::uint64_t sub(std::uint64_t cell, std::uint64_t rep, Role role) {
    return stream_id(cell, rep, static_cast<std::uint64_t>(role));
}

// Everything one (d, m, epsilon) cell needs to run a replicate.
struct CellPlan {
    const ExperimentConfig* cfg = nullptr;
    std::uint64_t cell_index = 0;
    std::uint64_t m = 0;
    std::uint32_t ambient_dim = 1;  // dimension points live in
    std::uint32_t base_dim = 1;     // dimension samples are drawn in (d0 when embedded)
    std::uint32_t d_eff = 1;        // dimension used for kappa and thresholds
    double epsilon = 0.0;
    std::uint32_t kappa_test = 1;
    const SurfaceSpec* surface = nullptr;  // null = native
    std::shared_ptr<const BumpFunction> bump;
    // alternative construction (epsilon > 0)
    std::uint32_t kappa_alt = 1;
    double rho = 0.0;
};

Sample maybe_embed(Sample base, const CellPlan& plan) {
    if (!plan.surface) return base;
    return embed_surface(base, *plan.surface);
}

bool run_test_replicate(const CellPlan& plan, const Sample& x, const Sample& y,
                        std::uint64_t rep, Role calib_role) {
    const ExperimentConfig& cfg = *plan.cfg;
    const std::uint64_t m = plan.m;
    switch (cfg.test) {
        case TestKind::one_sample: {
            if (cfg.calibration == CalibKind::analytic) {
                const BinSpec spec(plan.kappa_test, plan.ambient_dim);
                const double g1 = gamma_one(counts_from_codes(bin_codes(x, spec), spec), m);
                return g1 > threshold_one(m, plan.kappa_test, plan.d_eff, cfg.a);
            }
            CalibrationConfig cc{cfg.B, sub(plan.cell_index, rep, calib_role), cfg.alpha};
            SmoothnessParams sp{cfg.smoothness, cfg.holder_L};
            return monte_carlo_one_sample(x, sp, cc).reject;
        }
        case TestKind::two_sample: {
            if (cfg.calibration == CalibKind::analytic) {
                const BinSpec spec(plan.kappa_test, plan.ambient_dim);
                const std::uint64_t g2 = gamma_two_codes(bin_codes(x, spec), bin_codes(y, spec));
                return static_cast<double>(g2) >
                       threshold_two(m, plan.kappa_test, plan.d_eff, cfg.a);
            }
            CalibrationConfig cc{cfg.B, sub(plan.cell_index, rep, calib_role), cfg.alpha};
            return permutation_test_gamma(x, y, plan.kappa_test, cc).reject;
        }
        case TestKind::multiscale: {
            if (cfg.calibration == CalibKind::analytic)
                return multiscale_test(x, y, plan.ambient_dim, cfg.a).reject;
            CalibrationConfig cc{cfg.B, sub(plan.cell_index, rep, calib_role), cfg.alpha};
            return permutation_multiscale(x, y, plan.ambient_dim, cc).reject;
        }
        case TestKind::normalized: {
            CalibrationConfig cc{cfg.B, sub(plan.cell_index, rep, calib_role), cfg.alpha};
            return permutation_test_normalized(x, y, plan.kappa_test, cc).reject;
        }
    }
    return false;
}

// Runs independent replicates in parallel; exceptions are captured and
// rethrown after the loop (throwing out of an OpenMP region aborts).
template <typename Body>
double reject_rate(std::uint64_t replicates, Body&& body) {
    std::uint64_t rejects = 0;
    std::string error;
    const std::int64_t R = static_cast<std::int64_t>(replicates);
#pragma omp parallel for schedule(static) reduction(+ : rejects)
    for (std::int64_t r = 0; r < R; ++r) {
        try {
            if (body(static_cast<std::uint64_t>(r))) ++rejects;
        } catch (const std::exception& e) {
#pragma omp critical
            if (error.empty()) error = e.what();
        }
    }
    if (!error.empty()) throw ContractError("experiment replicate failed: " + error);
    return static_cast<double>(rejects) / static_cast<double>(replicates);
}

// Rejection rate under the null, f = g = uniform.
double type1_rate(const CellPlan& plan, std::uint64_t replicates) {
    const ExperimentConfig& cfg = *plan.cfg;
    return reject_rate(replicates, [&](std::uint64_t rep) {
        Rng rx(cfg.seed, sub(plan.cell_index, rep, kRoleNullX));
        const Sample x = maybe_embed(sample_uniform(plan.m, plan.base_dim, rx), plan);
        if (cfg.test == TestKind::one_sample)
            return run_test_replicate(plan, x, x, rep, kRoleCalib);
        Rng ry(cfg.seed, sub(plan.cell_index, rep, kRoleNullY));
        const Sample y = maybe_embed(sample_uniform(plan.m, plan.base_dim, ry), plan);
        return run_test_replicate(plan, x, y, rep, kRoleCalib);
    });
}

// Rejection rate under the alternative: x uniform, y ~ f_eta with fresh signs
// per replicate. Power; type II is its complement.
double power_rate(const CellPlan& plan, std::uint64_t replicates) {
    const ExperimentConfig& cfg = *plan.cfg;
    return reject_rate(replicates, [&](std::uint64_t rep) {
        Rng rs(cfg.seed, sub(plan.cell_index, rep, kRoleSigns));
        Rng ry(cfg.seed, sub(plan.cell_index, rep, kRoleAltY));
        Sample x;
        if (cfg.test != TestKind::one_sample) {
            Rng rx(cfg.seed, sub(plan.cell_index, rep, kRoleAltX));
            x = maybe_embed(sample_uniform(plan.m, plan.base_dim, rx), plan);
        }
        Sample ybase;
        if (plan.epsilon == 0.0) {
            ybase = sample_uniform(plan.m, plan.base_dim, ry);
        } else {
            IngsterAlternative alt(plan.kappa_alt, plan.base_dim, plan.rho,
                                   random_signs(plan.kappa_alt, plan.base_dim, rs), plan.bump);
            ybase = sample_ingster(alt, plan.m, ry);
        }
        const Sample y = maybe_embed(std::move(ybase), plan);
        if (cfg.test == TestKind::one_sample)
            return run_test_replicate(plan, y, y, rep, kRoleAltCalib);
        return run_test_replicate(plan, x, y, rep, kRoleAltCalib);
    });
}

CellPlan make_plan(const ExperimentConfig& cfg, std::uint64_t cell_index, std::uint32_t base_dim,
                   std::uint32_t ambient_dim, std::uint32_t d_eff, std::uint64_t m, double eps,
                   const SurfaceSpec* surface, std::shared_ptr<const BumpFunction> bump) {
    CellPlan plan;
    plan.cfg = &cfg;
    plan.cell_index = cell_index;
    plan.m = m;
    plan.base_dim = base_dim;
    plan.ambient_dim = ambient_dim;
    plan.d_eff = d_eff;
    plan.epsilon = eps;
    plan.kappa_test = kappa_for(m, cfg.smoothness, d_eff);
    plan.surface = surface;
    plan.bump = std::move(bump);
    if (cfg.test == TestKind::multiscale && multiscale_b_max(m, ambient_dim) < 1)
        throw ContractError("config: no admissible multiscale scale for m = " +
                            std::to_string(m) + " in dimension " + std::to_string(ambient_dim));
    if (eps > 0.0) {
        const double eps_max = 1.0 / plan.bump->sup_norm();
        if (eps > eps_max) {
            std::ostringstream os;
            os << "epsilon = " << eps << " is inadmissible for the bump in dimension " << base_dim
               << " (density would go negative); max admissible epsilon = " << eps_max;
            throw ContractError(os.str());
        }
        plan.kappa_alt = kappa_alt_for(eps, cfg.smoothness, cfg.holder_L, *plan.bump);
        plan.rho = eps * std::pow(static_cast<double>(plan.kappa_alt), -0.5 * base_dim);
    }
    return plan;
}

RiskRow run_cell(const CellPlan& plan) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig& cfg = *plan.cfg;
    RiskRow row;
    row.d = plan.surface ? plan.base_dim : plan.ambient_dim;
    row.m = plan.m;
    row.epsilon = plan.epsilon;
    row.type1 = type1_rate(plan, cfg.replicates);
    row.type2 = 1.0 - power_rate(plan, cfg.replicates);
    row.risk = row.type1 + row.type2;
    const double R = static_cast<double>(cfg.replicates);
    row.se = std::sqrt(row.type1 * (1.0 - row.type1) / R + row.type2 * (1.0 - row.type2) / R);
    row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

}  // namespace

RiskTable risk_experiment(const ExperimentConfig& config) {
    config.validate();
    if (config.epsilons.empty())
        throw ContractError("config.epsilons: must be nonempty for the risk experiment");
    RiskTable table;
    std::uint64_t cell_index = 0;
    for (std::uint32_t d : config.dims) {
        auto bump = make_bump(d, config.bump_beta);
        for (std::uint64_t m : config.sizes) {
            for (double eps : config.epsilons) {
                const CellPlan plan =
                    make_plan(config, cell_index, d, d, d, m, eps, nullptr, bump);
                table.rows.push_back(run_cell(plan));
                ++cell_index;
            }
        }
    }
    return table;
}

RiskTable intrinsic_dim_experiment(std::uint32_t ambient_dim, std::uint32_t intrinsic_dim,
                                   const SurfaceSpec& surface, const ExperimentConfig& config) {
    config.validate();
    if (intrinsic_dim > ambient_dim)
        throw ContractError("intrinsic_dim_experiment: d0 must not exceed the ambient dimension");
    if (surface.intrinsic_dim != intrinsic_dim || surface.ambient_dim != ambient_dim)
        throw ContractError("intrinsic_dim_experiment: surface dimensions do not match");
    if (config.test != TestKind::two_sample)
        throw ContractError("intrinsic_dim_experiment: only the two-sample test is supported");
    if (config.epsilons.empty())
        throw ContractError("config.epsilons: must be nonempty for the intrinsic experiment");

    RiskTable table;
    table.note += "; samples embedded through a d0-dimensional surface";
    auto bump = make_bump(intrinsic_dim, config.bump_beta);
    std::uint64_t cell_index = 0;
    for (std::uint64_t m : config.sizes) {
        for (double eps : config.epsilons) {
            const CellPlan plan = make_plan(config, cell_index, intrinsic_dim, ambient_dim,
                                            intrinsic_dim, m, eps, &surface, bump);
            table.rows.push_back(run_cell(plan));
            ++cell_index;
        }
    }
    return table;
}

SlopeFit rate_fit(const std::vector<RatePoint>& points) {
    if (points.size() < 2) throw ContractError("rate_fit: need at least two (m, eps*) points");
    std::vector<double> lx, ly;
    lx.reserve(points.size());
    ly.reserve(points.size());
    for (const auto& p : points) {
        if (!(p.eps_star > 0.0)) throw ContractError("rate_fit: eps* must be positive");
        lx.push_back(std::log(static_cast<double>(p.m)));
        ly.push_back(std::log(p.eps_star));
    }
    return least_squares_slope(lx, ly);
}

RateResult rate_experiment(const ExperimentConfig& config) {
    config.validate();
    if (config.dims.size() != 1)
        throw ContractError("config.dims: the rate experiment runs one dimension at a time");
    const std::uint32_t d = config.dims.front();
    auto bump = make_bump(d, config.bump_beta);
    const double eps_cap = 0.98 / bump->sup_norm();

    RateResult result;
    std::uint64_t cell_index = 0x52415445;  // distinct substream namespace from risk cells
    for (std::uint64_t m : config.sizes) {
        // Type-I rate is epsilon-free; estimate it once per m at high precision.
        const CellPlan null_plan =
            make_plan(config, cell_index, d, d, d, m, 0.0, nullptr, bump);
        const double t1 = type1_rate(null_plan, config.type1_replicates);

        struct Eval {
            double eps, risk, se;
        };
        std::vector<Eval> evals;
        auto risk_at = [&](double eps, std::uint64_t R) {
            const CellPlan plan = make_plan(config, cell_index, d, d, d, m, eps, nullptr, bump);
            const double power = power_rate(plan, R);
            const double risk = t1 + (1.0 - power);
            evals.push_back({eps, risk, std::sqrt(power * (1.0 - power) / static_cast<double>(R))});
            return risk;
        };

        double lo = 0.0, hi = eps_cap;
        const double risk_hi = risk_at(hi, config.replicates);
        if (risk_hi >= 0.5) {
            std::ostringstream os;
            os << "rate_experiment: risk at the admissibility cap eps = " << hi << " is "
               << risk_hi << " >= 0.5 for m = " << m << "; the 0.5 crossing cannot be bracketed";
            throw ContractError(os.str());
        }
        for (int step = 0; step < config.bisection_steps; ++step) {
            // Double the replicate count for the final refinement steps.
            const std::uint64_t R = (step >= config.bisection_steps - 4)
                                        ? 2 * config.replicates
                                        : config.replicates;
            const double mid = 0.5 * (lo + hi);
            if (risk_at(mid, R) > 0.5)
                lo = mid;
            else
                hi = mid;
        }

        // Monotonicity guard: risk significantly increasing in epsilon means
        // the MC noise dominates the signal.
        std::sort(evals.begin(), evals.end(),
                  [](const Eval& a, const Eval& b) { return a.eps < b.eps; });
        for (std::size_t i = 0; i + 1 < evals.size(); ++i) {
            for (std::size_t j = i + 1; j < evals.size(); ++j) {
                if (evals[j].risk > evals[i].risk + 4.0 * (evals[i].se + evals[j].se) + 1e-9) {
                    std::ostringstream os;
                    os << "rate_experiment: non-monotone risk in epsilon at m = " << m
                       << " (risk(" << evals[i].eps << ") = " << evals[i].risk << " vs risk("
                       << evals[j].eps << ") = " << evals[j].risk
                       << "); increase replicates";
                    throw ContractError(os.str());
                }
            }
        }

        RatePoint pt;
        pt.m = m;
        pt.eps_star = 0.5 * (lo + hi);
        pt.kappa_test = kappa_for(m, config.smoothness, d);
        result.points.push_back(pt);
        ++cell_index;
    }
    result.fit = rate_fit(result.points);
    return result;
}

}  // namespace gof
