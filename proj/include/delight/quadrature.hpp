#pragma once

// Small numeric-integration utilities. Adaptive Simpson for smooth
// integrands (horizon pricing); tanh-sinh for the Beta-density oracles,
// which may carry integrable endpoint singularities.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace delight {

namespace detail {

inline double simpson_segment(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson_rec(F&& f, double a, double fa, double b, double fb, double m, double fm,
                            double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson_segment(a, fa, m, fm, flm);
    const double right = simpson_segment(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a,b] to absolute tolerance tol.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-10, int max_depth = 60) {
    if (!(b >= a)) throw std::invalid_argument("adaptive_simpson: b < a");
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(m);
    const double whole = detail::simpson_segment(a, fa, b, fb, fm);
    return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

/// Tanh-sinh (double exponential) quadrature over (a,b). Tolerates
/// integrable singularities at either endpoint; never evaluates f at a or b.
template <typename F>
double tanh_sinh(F&& f, double a, double b, double tol = 1e-12) {
    if (!(b >= a)) throw std::invalid_argument("tanh_sinh: b < a");
    if (a == b) return 0.0;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    constexpr double pi_half = 1.5707963267948966192313216916398;

    auto node = [&](double t, double& x, double& w) {
        const double s = pi_half * std::sinh(t);
        const double ch = std::cosh(s);
        x = mid + half * std::tanh(s);
        w = half * pi_half * std::cosh(t) / (ch * ch);
    };

    // Contribution of the symmetric node pair at +-t; false once the
    // abscissas have saturated to the interval endpoints.
    auto pair_term = [&](double t, double& acc) {
        double x, w;
        node(t, x, w);
        bool live = false;
        if (w > 1e-320) {
            if (x > a && x < b) {
                acc += w * f(x);
                live = true;
            }
            node(-t, x, w);
            if (x > a && x < b) {
                acc += w * f(x);
                live = true;
            }
        }
        return live;
    };

    double h = 1.0;
    double x, w;
    node(0.0, x, w);
    double terms = w * f(x);
    for (int k = 1; k < 8; ++k) {
        if (!pair_term(static_cast<double>(k), terms)) break;
    }
    double integral = h * terms;

    for (int level = 1; level <= 12; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (int k = 1; k * h <= 8.0; k += 2) {
            if (!pair_term(k * h, add)) break;
        }
        const double prev = integral;
        integral = 0.5 * integral + h * add;
        if (level >= 3 && std::fabs(integral - prev) <= tol * (1.0 + std::fabs(integral))) break;
    }
    return integral;
}

}  // namespace delight
