#include "gof/quadrature.hpp"

#include <array>
#include <cmath>

namespace gof {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa, double b, double fb,
             double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || (b - a) < 1e-14)
        return left + right + delta / 15.0;
    if (depth <= 0) throw std::runtime_error("integrate_1d: adaptive quadrature failed to converge");
    return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_1d(const std::function<double(double)>& f, double a, double b, double tol,
                    int max_depth) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = simpson(a, fa, b, fb, fm);
    return adapt(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double integrate_unit_cube(const std::function<double(std::span<const double>)>& f,
                           std::uint32_t d, double tol) {
    if (d < 1 || d > 3)
        throw ContractError("integrate_unit_cube: supported for 1 <= d <= 3");
    std::array<double, 3> x{0.0, 0.0, 0.0};
    // Inner integrals get a tighter tolerance so the outer estimate stays honest.
    std::function<double(std::uint32_t, double)> level = [&](std::uint32_t axis,
                                                             double level_tol) -> double {
        return integrate_1d(
            [&](double t) {
                x[axis] = t;
                if (axis + 1 == d) return f(std::span<const double>(x.data(), d));
                return level(axis + 1, level_tol * 0.1);
            },
            0.0, 1.0, level_tol);
    };
    return level(0, tol);
}

}  // namespace gof
