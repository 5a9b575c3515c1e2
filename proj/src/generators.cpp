#include "gof/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gof/binning.hpp"
#include "gof/quadrature.hpp"

namespace gof {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double phi_raw(double t, double beta) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return std::exp(-beta / (t * (1.0 - t)));
}

// First and second derivatives of phi, used only for sup-norm estimates.
double dphi_raw(double t, double beta) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double w = 1.0 / (t * (1.0 - t));
    return phi_raw(t, beta) * beta * (1.0 - 2.0 * t) * w * w;
}

double d2phi_raw(double t, double beta) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double w = 1.0 / (t * (1.0 - t));
    const double gp = beta * (1.0 - 2.0 * t) * w * w;
    const double gpp = beta * (-2.0 * w * w - 2.0 * (1.0 - 2.0 * t) * (1.0 - 2.0 * t) * w * w * w);
    return phi_raw(t, beta) * (gpp + gp * gp);
}

double grid_sup(const std::function<double(double)>& f, int n = 20001) {
    double best = 0.0;
    for (int i = 0; i <= n; ++i)
        best = std::max(best, std::abs(f(static_cast<double>(i) / n)));
    return best;
}

}  // namespace

BumpFunction::BumpFunction(std::uint32_t dim, double beta) : dim_(dim), beta_(beta) {
    if (dim < 1) throw ContractError("BumpFunction: dim must be >= 1");
    if (!(beta > 0.0)) throw ContractError("BumpFunction: beta must be > 0");

    const double tol = 1e-12;
    const double I1 = integrate_1d([&](double t) { return phi_raw(t, beta_); }, 0.0, 1.0, tol);
    const double I2 = integrate_1d(
        [&](double t) { const double p = phi_raw(t, beta_); return p * p; }, 0.0, 1.0, tol);
    const double J1 = integrate_1d(
        [&](double t) { return phi_raw(t, beta_) * std::sin(kTwoPi * t); }, 0.0, 1.0, tol);
    const double J2 = integrate_1d(
        [&](double t) {
            const double v = phi_raw(t, beta_) * std::sin(kTwoPi * t);
            return v * v;
        },
        0.0, 1.0, tol);

    norm_const_ = 1.0 / std::sqrt(J2 * std::pow(I2, static_cast<double>(dim_ - 1)));
    integral_h_ = norm_const_ * J1 * std::pow(I1, static_cast<double>(dim_ - 1));
    integral_h2_ = norm_const_ * norm_const_ * J2 * std::pow(I2, static_cast<double>(dim_ - 1));

    sup_phi_ = grid_sup([&](double t) { return phi_raw(t, beta_); });
    sup_phipsi_ = grid_sup([&](double t) { return phi_raw(t, beta_) * std::sin(kTwoPi * t); });
    sup_dphi_ = grid_sup([&](double t) { return dphi_raw(t, beta_); });
    sup_dphipsi_ = grid_sup([&](double t) {
        return dphi_raw(t, beta_) * std::sin(kTwoPi * t) +
               phi_raw(t, beta_) * kTwoPi * std::cos(kTwoPi * t);
    });
    sup_d2phi_ = grid_sup([&](double t) { return d2phi_raw(t, beta_); });
    sup_d2phipsi_ = grid_sup([&](double t) {
        return d2phi_raw(t, beta_) * std::sin(kTwoPi * t) +
               2.0 * dphi_raw(t, beta_) * kTwoPi * std::cos(kTwoPi * t) -
               phi_raw(t, beta_) * kTwoPi * kTwoPi * std::sin(kTwoPi * t);
    });
    sup_norm_ = norm_const_ * sup_phipsi_ * std::pow(sup_phi_, static_cast<double>(dim_ - 1));
}

double BumpFunction::phi(double t) const { return phi_raw(t, beta_); }

double BumpFunction::phi_psi(double t) const {
    return phi_raw(t, beta_) * std::sin(kTwoPi * t);
}

double BumpFunction::operator()(std::span<const double> x) const {
    if (x.size() != dim_) throw ContractError("BumpFunction: point dimension mismatch");
    double v = norm_const_ * phi_psi(x[0]);
    for (std::uint32_t j = 1; j < dim_; ++j) v *= phi_raw(x[j], beta_);
    return v;
}

double BumpFunction::derivative_sup(int order) const {
    const double rest = std::pow(sup_phi_, static_cast<double>(dim_ - 1));
    const double rest2 = dim_ >= 2 ? std::pow(sup_phi_, static_cast<double>(dim_ - 2)) : 0.0;
    switch (order) {
        case 0:
            return sup_norm_;
        case 1: {
            const double axis1 = sup_dphipsi_ * rest;
            const double axisj = dim_ >= 2 ? sup_phipsi_ * sup_dphi_ * rest2 : 0.0;
            return norm_const_ * std::max(axis1, axisj);
        }
        case 2: {
            const double d11 = sup_d2phipsi_ * rest;
            const double djj = dim_ >= 2 ? sup_phipsi_ * sup_d2phi_ * rest2 : 0.0;
            const double d1j = dim_ >= 2 ? sup_dphipsi_ * sup_dphi_ * rest2 : 0.0;
            return norm_const_ * std::max({d11, djj, d1j});
        }
        default:
            throw ContractError("BumpFunction::derivative_sup: order must be 0, 1 or 2");
    }
}

std::shared_ptr<const BumpFunction> make_bump(std::uint32_t dim, double beta) {
    return std::make_shared<BumpFunction>(dim, beta);
}

namespace {

std::uint64_t cell_count_checked(std::uint32_t kappa, std::uint32_t dim, const char* who) {
    double approx = std::pow(static_cast<double>(kappa), static_cast<double>(dim));
    if (approx > 1e8) {
        std::ostringstream os;
        os << who << ": kappa^d = " << approx << " exceeds the 1e8 sign-vector bound";
        throw ContractError(os.str());
    }
    std::uint64_t n = 1;
    for (std::uint32_t j = 0; j < dim; ++j) n *= kappa;
    return n;
}

}  // namespace

IngsterAlternative::IngsterAlternative(std::uint32_t kappa_, std::uint32_t dim_, double rho_,
                                       std::vector<std::int8_t> signs_,
                                       std::shared_ptr<const BumpFunction> bump_)
    : kappa(kappa_), dim(dim_), rho(rho_), signs(std::move(signs_)), bump(std::move(bump_)) {
    if (kappa < 1 || dim < 1) throw ContractError("IngsterAlternative: kappa, dim must be >= 1");
    if (rho < 0.0) throw ContractError("IngsterAlternative: rho must be >= 0");
    if (!bump || bump->dim() != dim)
        throw ContractError("IngsterAlternative: bump dimension mismatch");
    const std::uint64_t cells = cell_count_checked(kappa, dim, "IngsterAlternative");
    if (signs.size() != cells)
        throw ContractError("IngsterAlternative: sign vector length must equal kappa^d");
    for (std::int8_t s : signs)
        if (s != 1 && s != -1) throw ContractError("IngsterAlternative: signs must be +-1");
    const double amp = rho * std::pow(static_cast<double>(kappa), 0.5 * dim) * bump->sup_norm();
    if (amp > 1.0 + 1e-9) {
        std::ostringstream os;
        os << "IngsterAlternative: rho kappa^{d/2} ||h||_inf = " << amp
           << " > 1; density would go negative (max admissible rho = "
           << 1.0 / (std::pow(static_cast<double>(kappa), 0.5 * dim) * bump->sup_norm()) << ")";
        throw ContractError(os.str());
    }
}

double IngsterAlternative::density(std::span<const double> x) const {
    if (x.size() != dim) throw ContractError("IngsterAlternative::density: dimension mismatch");
    // Only the cell containing x contributes; supports are disjoint.
    std::uint64_t cell = 0;
    std::uint64_t stride = 1;
    double u[8];
    if (dim > 8) throw ContractError("IngsterAlternative::density: dim > 8 unsupported");
    for (std::uint32_t j = 0; j < dim; ++j) {
        const std::uint32_t k = axis_index(x[j], kappa, j);
        cell += static_cast<std::uint64_t>(k - 1) * stride;
        stride *= kappa;
        u[j] = static_cast<double>(kappa) * x[j] - static_cast<double>(k - 1);
    }
    const double hval = (*bump)(std::span<const double>(u, dim));
    return 1.0 + rho * static_cast<double>(signs[cell]) *
                     std::pow(static_cast<double>(kappa), 0.5 * dim) * hval;
}

double IngsterAlternative::envelope() const {
    return 1.0 + rho * std::pow(static_cast<double>(kappa), 0.5 * dim) * bump->sup_norm();
}

double l2_distance_to_null(const IngsterAlternative& alt) {
    return alt.rho * std::pow(static_cast<double>(alt.kappa), 0.5 * alt.dim);
}

namespace {

int floor_strict(double s) {
    // Largest integer strictly smaller than s.
    const int f = static_cast<int>(std::floor(s));
    return (static_cast<double>(f) == s) ? f - 1 : f;
}

double holder_const(const BumpFunction& bump, double s) {
    const int k = floor_strict(s);
    if (k < 0 || k > 1)
        throw ContractError("holder_const: supported smoothness range is 0 < s <= 2");
    return std::max(4.0 * bump.derivative_sup(k), 2.0 * bump.derivative_sup(k + 1));
}

}  // namespace

double holder_admissibility(const IngsterAlternative& alt, double s, double L) {
    if (!(L > 0.0)) throw ContractError("holder_admissibility: L must be > 0");
    const double c = holder_const(*alt.bump, s);
    return alt.rho * std::pow(static_cast<double>(alt.kappa), 0.5 * alt.dim + s) * c / L;
}

std::uint32_t kappa_alt_for(double eps, double s, double L, const BumpFunction& bump) {
    if (!(eps > 0.0)) throw ContractError("kappa_alt_for: eps must be > 0");
    const double c = holder_const(bump, s);
    const double raw = std::pow(L / (c * eps), 1.0 / s);
    if (raw < 1.0) return 1;
    if (raw > static_cast<double>(1u << 20)) return 1u << 20;
    return static_cast<std::uint32_t>(std::floor(raw));
}

Sample sample_uniform(std::uint64_t m, std::uint32_t d, Rng& rng) {
    std::vector<double> v(m * d);
    for (auto& x : v) x = rng.uniform01();
    return Sample(std::move(v), d);
}

Sample sample_ingster(const IngsterAlternative& alt, std::uint64_t m, Rng& rng,
                      std::uint64_t* proposals_out) {
    const double env = alt.envelope();
    std::vector<double> v;
    v.reserve(m * alt.dim);
    double point[8];
    std::uint64_t proposals = 0;
    for (std::uint64_t i = 0; i < m; ++i) {
        for (;;) {
            ++proposals;
            for (std::uint32_t j = 0; j < alt.dim; ++j) point[j] = rng.uniform01();
            const double u = rng.uniform01() * env;
            if (u <= alt.density(std::span<const double>(point, alt.dim))) break;
        }
        v.insert(v.end(), point, point + alt.dim);
    }
    if (proposals_out) *proposals_out = proposals;
    return Sample(std::move(v), alt.dim);
}

double integrate_density(const IngsterAlternative& alt, double tol) {
    if (alt.dim > 2)
        throw ContractError("integrate_density: quadrature supported for d <= 2");
    const double k = static_cast<double>(alt.kappa);
    const double cell_tol = tol / std::pow(k, static_cast<double>(alt.dim));
    double total = 0.0;
    if (alt.dim == 1) {
        for (std::uint32_t j = 1; j <= alt.kappa; ++j) {
            total += integrate_1d(
                [&](double x) {
                    const double pt[1] = {x};
                    return alt.density(std::span<const double>(pt, 1));
                },
                (j - 1) / k, j / k, cell_tol);
        }
        return total;
    }
    for (std::uint32_t j1 = 1; j1 <= alt.kappa; ++j1) {
        for (std::uint32_t j2 = 1; j2 <= alt.kappa; ++j2) {
            total += integrate_1d(
                [&](double x) {
                    return integrate_1d(
                        [&](double y) {
                            const double pt[2] = {x, y};
                            return alt.density(std::span<const double>(pt, 2));
                        },
                        (j2 - 1) / k, j2 / k, cell_tol * 0.1);
                },
                (j1 - 1) / k, j1 / k, cell_tol);
        }
    }
    return total;
}

double integrate_squared_deviation(const IngsterAlternative& alt, double tol) {
    if (alt.dim > 2)
        throw ContractError("integrate_squared_deviation: quadrature supported for d <= 2");
    const double k = static_cast<double>(alt.kappa);
    const double cell_tol = tol / std::pow(k, static_cast<double>(alt.dim));
    double total = 0.0;
    if (alt.dim == 1) {
        for (std::uint32_t j = 1; j <= alt.kappa; ++j) {
            total += integrate_1d(
                [&](double x) {
                    const double pt[1] = {x};
                    const double dev = alt.density(std::span<const double>(pt, 1)) - 1.0;
                    return dev * dev;
                },
                (j - 1) / k, j / k, cell_tol);
        }
        return total;
    }
    for (std::uint32_t j1 = 1; j1 <= alt.kappa; ++j1) {
        for (std::uint32_t j2 = 1; j2 <= alt.kappa; ++j2) {
            total += integrate_1d(
                [&](double x) {
                    return integrate_1d(
                        [&](double y) {
                            const double pt[2] = {x, y};
                            const double dev = alt.density(std::span<const double>(pt, 2)) - 1.0;
                            return dev * dev;
                        },
                        (j2 - 1) / k, j2 / k, cell_tol * 0.1);
                },
                (j1 - 1) / k, j1 / k, cell_tol);
        }
    }
    return total;
}

std::vector<std::int8_t> random_signs(std::uint32_t kappa, std::uint32_t d, Rng& rng) {
    const std::uint64_t n = cell_count_checked(kappa, d, "random_signs");
    std::vector<std::int8_t> signs(n);
    for (auto& s : signs) s = static_cast<std::int8_t>(rng.rademacher());
    return signs;
}

SurfaceSpec axis_surface(std::uint32_t intrinsic_dim, std::uint32_t ambient_dim) {
    if (intrinsic_dim > ambient_dim)
        throw ContractError("axis_surface: intrinsic dimension exceeds ambient dimension");
    SurfaceSpec spec;
    spec.intrinsic_dim = intrinsic_dim;
    spec.ambient_dim = ambient_dim;
    spec.smoothness_order = 1;
    spec.map = [intrinsic_dim, ambient_dim](std::span<const double> in, std::span<double> out) {
        for (std::uint32_t j = 0; j < ambient_dim; ++j)
            out[j] = (j < intrinsic_dim) ? in[j] : 0.0;
    };
    return spec;
}

Sample embed_surface(const Sample& base, const SurfaceSpec& spec) {
    if (base.dim != spec.intrinsic_dim)
        throw ContractError("embed_surface: base dimension does not match spec.intrinsic_dim");
    if (!spec.map) throw ContractError("embed_surface: spec.map is empty");
    std::vector<double> out(base.size() * spec.ambient_dim);
    std::vector<double> img(spec.ambient_dim);
    for (std::size_t i = 0; i < base.size(); ++i) {
        spec.map(base.point(i), img);
        for (std::uint32_t j = 0; j < spec.ambient_dim; ++j) {
            if (!(img[j] >= 0.0 && img[j] <= 1.0)) {
                std::ostringstream os;
                os << "embed_surface: image of point " << i << " leaves [0,1] on axis " << j
                   << " (value " << img[j] << ")";
                throw DataError(os.str());
            }
            out[i * spec.ambient_dim + j] = img[j];
        }
    }
    return Sample(std::move(out), spec.ambient_dim);
}

double empty_cube_probability(std::uint64_t m, std::uint32_t d, double eps, double C) {
    if (!(eps > 0.0 && eps < 0.5))
        throw ContractError("empty_cube_probability: eps must lie in (0, 1/2)");
    if (!(C >= 1.0)) throw ContractError("empty_cube_probability: C must be >= 1");
    const double inner = C * std::pow(1.0 - 2.0 * eps, static_cast<double>(d));
    const double base = 1.0 - inner;
    if (base <= 0.0) return 0.0;
    const double bound = std::pow(base, static_cast<double>(m));
    return std::clamp(bound, 0.0, 1.0);
}

}  // namespace gof
