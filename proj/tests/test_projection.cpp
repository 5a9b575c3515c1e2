#include "doctest.h"

#include <cmath>
#include <numbers>

#include "gof/fit.hpp"
#include "gof/projection.hpp"
#include "gof/rng.hpp"

using namespace gof;

TEST_CASE("averaging fixes constants") {
    auto g = sample_grid(1, 64, [](std::span<const double>) { return 3.25; });
    auto w = w_kappa(g, 4);
    for (double v : w.values) CHECK(v == 3.25);
    CHECK(l2_norm(g) == doctest::Approx(3.25));
}

TEST_CASE("exact cell means of the identity map") {
    auto g = sample_grid(1, 16, [](std::span<const double> x) { return x[0]; });
    auto w = w_kappa(g, 2);
    for (std::size_t i = 0; i < 8; ++i) CHECK(w.values[i] == doctest::Approx(0.25).epsilon(1e-15));
    for (std::size_t i = 8; i < 16; ++i) CHECK(w.values[i] == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("idempotence holds bit-for-bit") {
    Rng rng(3);
    for (std::uint32_t d : {1u, 2u}) {
        const std::uint32_t res = d == 1 ? 256 : 64;
        auto g = sample_grid(d, res, [&](std::span<const double> x) {
            double v = 1.0;
            for (double xi : x) v *= std::sin(5.0 * xi) + 1.3 * xi;
            return v + rng.uniform01() * 0.01;
        });
        for (std::uint32_t kappa : {2u, 4u, 8u}) {
            auto once = w_kappa(g, kappa);
            auto twice = w_kappa(once, kappa);
            CHECK(once.values == twice.values);
        }
    }
}

TEST_CASE("w_kappa divisibility error") {
    auto g = sample_grid(1, 64, [](std::span<const double> x) { return x[0]; });
    CHECK_THROWS_AS(w_kappa(g, 3), ContractError);
}

TEST_CASE("l2 norm of sin(2 pi x)") {
    auto g = sample_grid(1, 4096,
                         [](std::span<const double> x) { return std::sin(2.0 * std::numbers::pi * x[0]); });
    CHECK(l2_norm(g) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-4));
}

TEST_CASE("triangle inequality on random grid functions") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        GridFunction a(1, 128), b(1, 128), c(1, 128);
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            a.values[i] = rng.uniform01() - 0.5;
            b.values[i] = rng.uniform01() - 0.5;
            c.values[i] = a.values[i] + b.values[i];
        }
        CHECK(l2_norm(c) <= l2_norm(a) + l2_norm(b) + 1e-12);
    }
}

TEST_CASE("linearity of the averaging operator") {
    Rng rng(7);
    GridFunction f(1, 128), g(1, 128);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        f.values[i] = rng.uniform01();
        g.values[i] = rng.uniform01();
    }
    const double alpha = 1.7, beta = -0.4;
    GridFunction combo(1, 128);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        combo.values[i] = alpha * f.values[i] + beta * g.values[i];
    auto wf = w_kappa(f, 8), wg = w_kappa(g, 8), wc = w_kappa(combo, 8);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        CHECK(wc.values[i] == doctest::Approx(alpha * wf.values[i] + beta * wg.values[i]).epsilon(1e-12));
}

TEST_CASE("contraction and monotone convergence for a smooth function") {
    auto g = sample_grid(1, 4096, [](std::span<const double> x) {
        return std::sin(2.0 * std::numbers::pi * x[0]) + 0.3 * std::cos(6.0 * std::numbers::pi * x[0]);
    });
    const double hn = l2_norm(g);
    double prev_err = 1e300;
    for (std::uint32_t kappa : {2u, 4u, 8u, 16u, 32u, 64u}) {
        auto w = w_kappa(g, kappa);
        CHECK(l2_norm(w) <= hn + 1e-12);
        GridFunction diff(1, 4096);
        for (std::size_t i = 0; i < diff.values.size(); ++i)
            diff.values[i] = g.values[i] - w.values[i];
        const double err = l2_norm(diff);
        CHECK(err <= prev_err + 1e-12);
        prev_err = err;
    }
    // ||h - W_64 h|| ~ ||h'|| / (sqrt(12) * 64) ~ 0.027 for this h
    CHECK(prev_err <= 0.05);
}

TEST_CASE("constant function keeps the norm at every scale") {
    auto g = sample_grid(1, 512, [](std::span<const double>) { return 2.0; });
    auto rows = approx_inequality_sweep(g, {2, 4, 8, 16});
    for (const auto& r : rows) CHECK(r.w_norm == doctest::Approx(r.h_norm));
}

TEST_CASE("norm gap of sin(2 pi x) decays at least like kappa^{-1}") {
    auto g = sample_grid(1, 16384,
                         [](std::span<const double> x) { return std::sin(2.0 * std::numbers::pi * x[0]); });
    std::vector<std::uint32_t> kappas{2, 4, 8, 16, 32, 64, 128, 256};
    auto rows = approx_inequality_sweep(g, kappas);
    std::vector<double> lx, ly;
    for (const auto& r : rows) {
        const double gap = r.h_norm - r.w_norm;
        REQUIRE(gap > 0.0);
        lx.push_back(std::log(static_cast<double>(r.kappa)));
        ly.push_back(std::log(gap));
    }
    const auto fit = least_squares_slope(lx, ly);
    CHECK(fit.slope <= -1.0 + 0.3);
}
