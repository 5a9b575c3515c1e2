#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "gof/rng.hpp"
#include "gof/sample.hpp"

namespace gof {

// Smooth bump h on [0,1]^d with int h = 0 and int h^2 = 1:
//   h(x) = c * psi(x_1) * prod_j phi(x_j),
// phi(t) = exp(-beta/(t(1-t))) on (0,1) and 0 outside, psi(t) = sin(2 pi t).
// c is fixed by quadrature; sup norms are numeric estimates on a grid.
class BumpFunction {
public:
    BumpFunction(std::uint32_t dim, double beta);

    double operator()(std::span<const double> x) const;

    std::uint32_t dim() const { return dim_; }
    double beta() const { return beta_; }
    double sup_norm() const { return sup_norm_; }
    // Numeric check values: |integral_h| ~ 0, integral_h2 ~ 1.
    double integral_h() const { return integral_h_; }
    double integral_h2() const { return integral_h2_; }
    // Sup norm of the derivative tensor of the given order (0, 1 or 2);
    // grid estimates used for Holder admissibility bookkeeping.
    double derivative_sup(int order) const;

    double phi(double t) const;
    double phi_psi(double t) const;

private:
    std::uint32_t dim_;
    double beta_;
    double norm_const_;
    double sup_norm_;
    double integral_h_;
    double integral_h2_;
    double sup_phi_, sup_phipsi_;
    double sup_dphi_, sup_dphipsi_;
    double sup_d2phi_, sup_d2phipsi_;
};

// Flatter than the classical exp(-1/(t(1-t))) so that admissible signal
// amplitudes stay usable in higher dimension.
constexpr double kDefaultBumpSharpness = 0.02;

std::shared_ptr<const BumpFunction> make_bump(std::uint32_t dim,
                                              double beta = kDefaultBumpSharpness);

// Density f_eta = 1 + rho * sum_j eta_j h_{j,kappa} built from sign-flipped,
// rescaled copies of the bump on the kappa^d cells.
struct IngsterAlternative {
    std::uint32_t kappa = 1;
    std::uint32_t dim = 1;
    double rho = 0.0;
    std::vector<std::int8_t> signs;  // length kappa^dim, cell order matches bin_code
    std::shared_ptr<const BumpFunction> bump;

    IngsterAlternative(std::uint32_t kappa, std::uint32_t dim, double rho,
                       std::vector<std::int8_t> signs,
                       std::shared_ptr<const BumpFunction> bump);

    double density(std::span<const double> x) const;

    // 1 + rho kappa^{d/2} ||h||_inf; rejection-sampling envelope, <= 2.
    double envelope() const;
};

// ||f_eta - 1||_2 = rho kappa^{d/2}, exactly.
double l2_distance_to_null(const IngsterAlternative& alt);

// rho kappa^{d/2+s} C_h / L with C_h = 4||h^(floor s)||_inf v 2||h^(floor s + 1)||_inf.
// <= 1 means f_eta lies in the (s, L) Holder class; informational.
double holder_admissibility(const IngsterAlternative& alt, double s, double L);

// Largest kappa at which an alternative of L2 separation eps stays in the
// (s, L) Holder class; at least 1.
std::uint32_t kappa_alt_for(double eps, double s, double L, const BumpFunction& bump);

// m IID draws from f_eta by rejection against uniform proposals; acceptance
// probability is at least 1/2 by the envelope bound. proposals_out, when
// given, receives the number of proposals consumed.
Sample sample_ingster(const IngsterAlternative& alt, std::uint64_t m, Rng& rng,
                      std::uint64_t* proposals_out = nullptr);

// Cell-aligned quadrature of the density over [0,1]^d (d <= 2); should be 1.
double integrate_density(const IngsterAlternative& alt, double tol = 1e-9);

// Cell-aligned quadrature of (f_eta - 1)^2; should equal rho^2 kappa^d.
double integrate_squared_deviation(const IngsterAlternative& alt, double tol = 1e-9);

Sample sample_uniform(std::uint64_t m, std::uint32_t d, Rng& rng);

// Rademacher vector of length kappa^d.
std::vector<std::int8_t> random_signs(std::uint32_t kappa, std::uint32_t d, Rng& rng);

// Smooth map sigma : [0,1]^{d0} -> [0,1]^d realizing a low-dimensional support.
struct SurfaceSpec {
    std::uint32_t intrinsic_dim = 1;
    std::uint32_t ambient_dim = 1;
    int smoothness_order = 1;
    std::function<void(std::span<const double>, std::span<double>)> map;
};

SurfaceSpec axis_surface(std::uint32_t intrinsic_dim, std::uint32_t ambient_dim);

// sigma applied pointwise; throws DataError naming the point if it leaves the cube.
Sample embed_surface(const Sample& base, const SurfaceSpec& spec);

// Lower bound (1 - C (1-2 eps)^d)^m on the probability that the inner cube
// [eps, 1-eps]^d contains no sample point, clamped to [0,1].
double empty_cube_probability(std::uint64_t m, std::uint32_t d, double eps, double C);

}  // namespace gof
