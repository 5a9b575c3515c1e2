#include "doctest.h"

#include <cmath>

#include "gof/experiments.hpp"

using namespace gof;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.dims = {1};
    cfg.sizes = {256};
    cfg.epsilons = {0.0, 0.2};
    cfg.replicates = 300;
    cfg.seed = 99;
    cfg.a = 1.0;
    return cfg;
}

}  // namespace

TEST_CASE("config validation names the offending field") {
    ExperimentConfig cfg = small_config();
    cfg.sizes = {};
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("sizes"), ContractError);
    cfg = small_config();
    cfg.dims = {1, 0};
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("dims[1]"), ContractError);
    cfg = small_config();
    cfg.test = TestKind::normalized;
    cfg.calibration = CalibKind::analytic;
    CHECK_THROWS_AS(cfg.validate(), ContractError);
}

TEST_CASE("zero separation makes the alternative the null") {
    ExperimentConfig cfg = small_config();
    cfg.epsilons = {0.0};
    auto table = risk_experiment(cfg);
    REQUIRE(table.rows.size() == 1);
    const auto& r = table.rows[0];
    // type2 ~ 1 - type1; the two rates come from independent replicates
    CHECK(std::abs(r.type2 - (1.0 - r.type1)) <= 5.0 * r.se + 0.02);
    CHECK(r.risk == doctest::Approx(r.type1 + r.type2));
}

TEST_CASE("risk experiment is deterministic and ordered in epsilon") {
    ExperimentConfig cfg = small_config();
    cfg.epsilons = {0.05, 0.15, 0.3};
    auto t1 = risk_experiment(cfg);
    auto t2 = risk_experiment(cfg);
    REQUIRE(t1.rows.size() == t2.rows.size());
    for (std::size_t i = 0; i < t1.rows.size(); ++i) {
        CHECK(t1.rows[i].type1 == t2.rows[i].type1);
        CHECK(t1.rows[i].type2 == t2.rows[i].type2);
    }
    // risk non-increasing in epsilon up to MC noise
    for (std::size_t i = 0; i + 1 < t1.rows.size(); ++i)
        CHECK(t1.rows[i + 1].risk <= t1.rows[i].risk + 2.0 * (t1.rows[i].se + t1.rows[i + 1].se));
}

TEST_CASE("quadrupling replicates halves the reported standard error") {
    ExperimentConfig cfg = small_config();
    cfg.epsilons = {0.12};
    cfg.replicates = 250;
    auto t1 = risk_experiment(cfg);
    cfg.replicates = 1000;
    auto t4 = risk_experiment(cfg);
    const double ratio = t1.rows[0].se / t4.rows[0].se;
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("inadmissible separation is refused with the admissible maximum") {
    ExperimentConfig cfg = small_config();
    cfg.epsilons = {0.9};  // above 1/||h||_inf for d = 1
    CHECK_THROWS_WITH_AS(risk_experiment(cfg), doctest::Contains("max admissible"), ContractError);
    CHECK(max_admissible_epsilon(cfg.bump_beta, 1) < 0.9);
}

TEST_CASE("rate_fit recovers a noiseless power law") {
    std::vector<RatePoint> pts;
    for (std::uint64_t m : {512ull, 1024ull, 2048ull, 4096ull}) {
        RatePoint p;
        p.m = m;
        p.eps_star = 3.7 * std::pow(static_cast<double>(m), -0.37);
        pts.push_back(p);
    }
    auto fit = rate_fit(pts);
    CHECK(fit.slope == doctest::Approx(-0.37).epsilon(1e-6));
}

TEST_CASE("rate experiment smoke run tracks the d = 1 exponent") {
    ExperimentConfig cfg;
    cfg.dims = {1};
    cfg.sizes = {256, 1024, 4096};
    cfg.epsilons = {};
    cfg.replicates = 150;
    cfg.type1_replicates = 600;
    cfg.bisection_steps = 10;
    cfg.seed = 12345;
    cfg.a = 1.0;
    auto res = rate_experiment(cfg);
    REQUIRE(res.points.size() == 3);
    for (const auto& p : res.points) CHECK(p.eps_star > 0.0);
    CHECK(res.fit.slope < -0.2);
    CHECK(res.fit.slope > -0.6);
}

TEST_CASE("identity surface reproduces the native experiment exactly") {
    ExperimentConfig cfg = small_config();
    cfg.epsilons = {0.15};
    auto native = risk_experiment(cfg);
    auto embedded = intrinsic_dim_experiment(1, 1, axis_surface(1, 1), cfg);
    REQUIRE(native.rows.size() == embedded.rows.size());
    CHECK(native.rows[0].type1 == embedded.rows[0].type1);
    CHECK(native.rows[0].type2 == embedded.rows[0].type2);
}

TEST_CASE("axis embedding in ambient dimension 5 matches native d = 1 bitwise") {
    ExperimentConfig cfg = small_config();
    cfg.sizes = {256, 512};
    cfg.epsilons = {0.1, 0.25};
    auto native = risk_experiment(cfg);
    auto embedded = intrinsic_dim_experiment(5, 1, axis_surface(1, 5), cfg);
    REQUIRE(native.rows.size() == embedded.rows.size());
    for (std::size_t i = 0; i < native.rows.size(); ++i) {
        CHECK(native.rows[i].type1 == embedded.rows[i].type1);
        CHECK(native.rows[i].type2 == embedded.rows[i].type2);
        CHECK(native.rows[i].risk == embedded.rows[i].risk);
    }
}

TEST_CASE("risk decomposition invariant") {
    ExperimentConfig cfg = small_config();
    cfg.epsilons = {0.0, 0.2};
    auto table = risk_experiment(cfg);
    for (const auto& r : table.rows) {
        CHECK(r.risk == doctest::Approx(r.type1 + r.type2));
        CHECK(r.type1 >= 0.0);
        CHECK(r.type1 <= 1.0);
        CHECK(r.type2 >= 0.0);
        CHECK(r.type2 <= 1.0);
    }
}

TEST_CASE("permutation-calibrated risk experiment runs") {
    ExperimentConfig cfg;
    cfg.dims = {1};
    cfg.sizes = {64};
    cfg.epsilons = {0.0};
    cfg.replicates = 60;
    cfg.B = 49;
    cfg.calibration = CalibKind::permutation;
    cfg.seed = 5;
    auto table = risk_experiment(cfg);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].type1 <= 0.25);
}
