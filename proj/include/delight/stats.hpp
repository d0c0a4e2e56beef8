#pragma once

// Summary statistics and the log-log slope fit used by the rate experiments.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace delight {

inline double mean(std::span<const double> xs) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
}

inline double sample_std(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

inline double standard_error(std::span<const double> xs) {
    return sample_std(xs) / std::sqrt(static_cast<double>(xs.size()));
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

/// Ordinary least squares y = a + b*x with the usual slope standard error.
inline LineFit ols_fit(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n != ys.size() || n < 2) throw std::invalid_argument("ols_fit: need >= 2 paired points");
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("ols_fit: degenerate x values");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = ys[i] - fit.intercept - fit.slope * xs[i];
            rss += r * r;
        }
        fit.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    }
    return fit;
}

/// Slope of log(y) against log(x).
inline LineFit loglog_fit(std::span<const double> xs, std::span<const double> ys) {
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::invalid_argument("loglog_fit: values must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    return ols_fit(lx, ly);
}

}  // namespace delight
