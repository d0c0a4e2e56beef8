#pragma once

// Special functions backing the analytic expected-improvement formulas:
// regularized incomplete beta I_x(a,b) and the standard normal pdf/cdf.
// Pure functions, thread-safe.

#include <cmath>
#include <stdexcept>
#include <string>

namespace delight {

struct ToleranceSpec {
    double abs_tol = 1e-12;
    int max_iter = 500;
};

inline constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
inline constexpr double kSqrt2 = 1.4142135623730950488016887242097;

/// Standard normal density phi(z).
inline double std_normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

/// Standard normal cdf Phi(z), accurate to ~1e-15 via erfc.
inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

namespace detail {

// Continued fraction for I_x(a,b), modified Lentz. Valid (rapidly convergent)
// for x < (a+1)/(a+b+2); callers apply the symmetry switch.
inline double inc_beta_cf(double a, double b, double x, const ToleranceSpec& tol) {
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;

    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;

    for (int m = 1; m <= tol.max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < tol.abs_tol) return h;
    }
    throw std::runtime_error("reg_inc_beta: continued fraction did not converge (a=" +
                             std::to_string(a) + ", b=" + std::to_string(b) + ", x=" +
                             std::to_string(x) + ")");
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a,b).
inline double reg_inc_beta(double a, double b, double x, const ToleranceSpec& tol = {}) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("reg_inc_beta: a and b must be positive");
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("reg_inc_beta: x must lie in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);

    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::inc_beta_cf(a, b, x, tol) / a;
    }
    return 1.0 - front * detail::inc_beta_cf(b, a, 1.0 - x, tol) / b;
}

}  // namespace delight
