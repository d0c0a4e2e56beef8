#pragma once

// Infinite-arm revealed-value discovery model: threshold reservation
// policies, horizon pricing of the gate, and the prior-tail rate experiment.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "delight/quadrature.hpp"
#include "delight/rng.hpp"
#include "delight/stats.hpp"

namespace delight {

// Prior over revealed values X in [0,1], described by its upper tail
// p(y) = Pr(X >= 1-y). The polynomial-tail family is normalized so that
// p(y) = y^alpha exactly (unit tail constants).
struct TailPrior {
    enum class Kind { uniform, polynomial_tail };
    Kind kind = Kind::uniform;
    double alpha = 1.0;

    double tail(double y) const {
        if (y <= 0.0) return 0.0;
        if (y >= 1.0) return 1.0;
        return kind == Kind::uniform ? y : std::pow(y, alpha);
    }

    double sample(SplitMix64& rng) const {
        const double u = rng.next_double_open();
        return kind == Kind::uniform ? 1.0 - u : 1.0 - std::pow(u, 1.0 / alpha);
    }

    double tail_exponent() const { return kind == Kind::uniform ? 1.0 : alpha; }
};

inline TailPrior uniform_prior() { return TailPrior{TailPrior::Kind::uniform, 1.0}; }

inline TailPrior polynomial_tail_prior(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("polynomial_tail_prior: alpha must be > 0");
    return TailPrior{TailPrior::Kind::polynomial_tail, alpha};
}

struct ReservoirRunResult {
    double regret = 0.0;
    std::uint64_t inspections = 0;
    double best_found = 0.0;
};

/// Threshold reservation policy: inspect fresh arms until one reveals a value
/// >= 1-y, then exploit the best observed arm for the remaining rounds. With
/// an override rate, inspections happen only on override rounds; other
/// pre-success rounds replay the best arm found so far.
inline ReservoirRunResult reservation_policy_run(const TailPrior& prior, double y, long horizon,
                                                 std::optional<double> override_rate,
                                                 SplitMix64& rng) {
    if (!(y > 0.0 && y < 1.0))
        throw std::invalid_argument("reservation_policy_run: need 0 < y < 1");
    if (horizon < 1) throw std::invalid_argument("reservation_policy_run: need horizon >= 1");
    const double threshold = 1.0 - y;
    ReservoirRunResult out;
    long t = 0;
    while (t < horizon) {
        const bool inspect = !override_rate || rng.bernoulli(*override_rate);
        if (inspect) {
            const double x = prior.sample(rng);
            ++out.inspections;
            out.regret += 1.0 - x;
            if (x > out.best_found) out.best_found = x;
            ++t;
            if (x >= threshold) break;
        } else {
            out.regret += 1.0 - out.best_found;
            ++t;
        }
    }
    // After the first success every remaining round replays the best arm.
    out.regret += static_cast<double>(horizon - t) * (1.0 - out.best_found);
    return out;
}

/// Gate price matching a tail threshold over a horizon:
/// lambda_y = L * integral_0^y p(s) ds.
inline double horizon_price(const TailPrior& prior, double y, double cap) {
    if (!(y >= 0.0 && y <= 1.0)) throw std::invalid_argument("horizon_price: need 0 <= y <= 1");
    if (y == 0.0) return 0.0;
    return cap * adaptive_simpson([&](double s) { return prior.tail(s); }, 0.0, y, 1e-10);
}

struct TailRateResult {
    std::vector<double> horizons;
    std::vector<double> mean_regret;
    std::vector<double> regret_stderr;
    LineFit fit;  // log mean-regret vs log horizon
};

/// Runs the reservation policy at y_T = T^{-1/(alpha+1)} (or the throttled
/// analogue) across horizons and fits the log-log regret slope.
inline TailRateResult tail_rate_experiment(const TailPrior& prior,
                                           const std::vector<long>& horizons, int seeds,
                                           std::optional<double> override_rate,
                                           std::uint64_t base_seed) {
    if (horizons.size() < 2)
        throw std::invalid_argument("tail_rate_experiment: need at least two horizons");
    if (seeds < 1) throw std::invalid_argument("tail_rate_experiment: need at least one seed");
    const double alpha = prior.tail_exponent();
    TailRateResult result;
    for (std::size_t c = 0; c < horizons.size(); ++c) {
        const long horizon = horizons[c];
        const double effective =
            override_rate ? *override_rate * static_cast<double>(horizon)
                          : static_cast<double>(horizon);
        const double y = std::pow(effective, -1.0 / (alpha + 1.0));
        std::vector<double> regrets(seeds);
        for (int s = 0; s < seeds; ++s) {
            SplitMix64 rng = stream_for(base_seed, "reservoir", c, s, StreamRole::environment);
            regrets[s] = reservation_policy_run(prior, y, horizon, override_rate, rng).regret;
        }
        result.horizons.push_back(static_cast<double>(horizon));
        result.mean_regret.push_back(mean(regrets));
        result.regret_stderr.push_back(standard_error(regrets));
    }
    result.fit = loglog_fit(result.horizons, result.mean_regret);
    return result;
}

}  // namespace delight
