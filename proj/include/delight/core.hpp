#pragma once

// Delight-gated exploration core: the annealed override schedule, capped
// relative surprisal, the delight gate and its override distribution, the
// host/override acting mixture, the fresh-arm shutoff threshold, and the
// reservation indices that tie the gate to costly-search eligibility.
//
// Everything here is a pure function of its inputs plus a caller-supplied
// random stream.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "delight/rng.hpp"

namespace delight {

enum class HostMode { greedy, boltzmann };

struct DelightConfig {
    double gate_price = 0.1;       // lambda, reward x surprisal units
    double surprisal_cap = 10.0;   // L, nats
    double half_life = 100.0;      // M, rounds
    HostMode host_mode = HostMode::greedy;
    double host_temperature = 0.01;  // tau, reward units (boltzmann only)

    void validate() const {
        if (!(gate_price > 0.0)) throw std::invalid_argument("DelightConfig: gate_price must be > 0");
        if (!(surprisal_cap > 0.0))
            throw std::invalid_argument("DelightConfig: surprisal_cap must be > 0");
        if (!(half_life > 0.0)) throw std::invalid_argument("DelightConfig: half_life must be > 0");
        if (host_mode == HostMode::boltzmann && !(host_temperature > 0.0))
            throw std::invalid_argument("DelightConfig: host_temperature must be > 0");
    }
};

/// Annealed override rate M/(M+t); t counts from 0.
inline double epsilon_schedule(double half_life, long t) {
    return half_life / (half_life + static_cast<double>(t));
}

// Lowest-index argmax, for deterministic tie-breaking across runs.
inline std::size_t argmax_lowest(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

/// One-hot distribution on the lowest-index argmax of the scores.
inline std::vector<double> greedy_policy(std::span<const double> scores) {
    std::vector<double> probs(scores.size(), 0.0);
    probs[argmax_lowest(scores)] = 1.0;
    return probs;
}

/// Softmax of scores/tau, computed in log space with max subtraction so that
/// near-zero temperatures do not overflow.
inline std::vector<double> boltzmann_policy(std::span<const double> scores, double tau) {
    const double top = scores[argmax_lowest(scores)];
    std::vector<double> probs(scores.size());
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        probs[i] = std::exp((scores[i] - top) / tau);
        total += probs[i];
    }
    for (auto& p : probs) p /= total;
    return probs;
}

inline std::vector<double> host_policy(std::span<const double> scores, const DelightConfig& cfg) {
    return cfg.host_mode == HostMode::greedy ? greedy_policy(scores)
                                             : boltzmann_policy(scores, cfg.host_temperature);
}

/// Capped relative surprisal: s(a) = min{[-log pi(a) - l_min]^+, cap}.
/// The host's most likely action scores 0; zero-probability actions score cap.
inline std::vector<double> surprisal(std::span<const double> host_probs, double cap) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> nll(host_probs.size());
    double nll_min = inf;
    for (std::size_t i = 0; i < host_probs.size(); ++i) {
        nll[i] = host_probs[i] > 0.0 ? -std::log(host_probs[i]) : inf;
        nll_min = std::min(nll_min, nll[i]);
    }
    std::vector<double> out(host_probs.size());
    for (std::size_t i = 0; i < host_probs.size(); ++i) {
        const double rel = nll[i] - nll_min;
        out[i] = rel > cap ? cap : (rel > 0.0 ? rel : 0.0);
    }
    return out;
}

struct GateResult {
    std::vector<double> delight;        // ei * surprisal, elementwise
    std::vector<std::size_t> gated_set; // indices with delight >= lambda (inclusive)
};

inline GateResult gate(std::span<const double> ei, std::span<const double> surp,
                       double gate_price) {
    if (ei.size() != surp.size()) throw std::invalid_argument("gate: length mismatch");
    GateResult r;
    r.delight.resize(ei.size());
    for (std::size_t i = 0; i < ei.size(); ++i) {
        r.delight[i] = ei[i] * surp[i];
        if (r.delight[i] >= gate_price) r.gated_set.push_back(i);
    }
    return r;
}

/// Override distribution q(a) proportional to delight on the gated set;
/// exactly the host distribution when the gate is empty.
inline std::vector<double> override_distribution(std::span<const double> delight,
                                                 std::span<const std::size_t> gated_set,
                                                 std::span<const double> host_probs) {
    if (gated_set.empty()) return std::vector<double>(host_probs.begin(), host_probs.end());
    std::vector<double> q(delight.size(), 0.0);
    double total = 0.0;
    for (std::size_t a : gated_set) total += delight[a];
    for (std::size_t a : gated_set) q[a] = delight[a] / total;
    return q;
}

struct ActResult {
    std::size_t action = 0;
    bool used_override = false;
};

/// Draw from (1-eps)*host + eps*override, reporting which branch fired.
inline ActResult act(std::span<const double> host_probs, std::span<const double> override_dist,
                     double eps, SplitMix64& rng) {
    ActResult r;
    r.used_override = rng.bernoulli(eps);
    r.action = r.used_override ? rng.categorical(override_dist) : rng.categorical(host_probs);
    return r;
}

// Full per-round gate evaluation, bundled for instrumentation.
struct GateDecision {
    std::vector<double> ei;
    std::vector<double> surprisal;
    std::vector<double> delight;
    std::vector<std::size_t> gated_set;
    std::vector<double> override_dist;
    double baseline = 0.0;  // v_t

    bool gate_empty() const { return gated_set.empty(); }
};

inline GateDecision make_gate_decision(std::vector<double> ei, std::span<const double> host_probs,
                                       double baseline, double gate_price, double cap) {
    GateDecision d;
    d.baseline = baseline;
    d.surprisal = surprisal(host_probs, cap);
    auto g = gate(ei, d.surprisal, gate_price);
    d.delight = std::move(g.delight);
    d.gated_set = std::move(g.gated_set);
    d.override_dist = override_distribution(d.delight, d.gated_set, host_probs);
    d.ei = std::move(ei);
    return d;
}

/// Baseline above which no untried Beta(1,1) arm passes the gate:
/// 1 - sqrt(2*lambda/cap). Empty when lambda >= cap/2 (shutoff everywhere).
inline std::optional<double> fresh_arm_threshold(double gate_price, double cap) {
    if (!(gate_price > 0.0) || !(cap > 0.0))
        throw std::invalid_argument("fresh_arm_threshold: lambda and cap must be > 0");
    if (gate_price >= 0.5 * cap) return std::nullopt;
    return 1.0 - std::sqrt(2.0 * gate_price / cap);
}

inline constexpr double kEmptyReservation = -std::numeric_limits<double>::infinity();

/// Generalized inverse sup{z : surp * g(z) >= lambda} for a nonincreasing
/// continuous tail-value function g, by bisection on
/// [support_lo - 1, support_hi]. Returns -inf when the superlevel set is
/// empty over the bracket.
inline double reservation_index(const std::function<double(double)>& tail_value,
                                double support_lo, double support_hi, double surp,
                                double gate_price, double tol = 1e-10, int max_iter = 200) {
    double lo = support_lo - 1.0;
    double hi = support_hi;
    auto passes = [&](double z) { return surp * tail_value(z) >= gate_price; };
    if (!passes(lo)) return kEmptyReservation;
    if (passes(hi)) return hi;
    for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (passes(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

/// Pandora reservation value: the same generalized inverse at unit surprisal
/// and cost c, i.e. sup{z : g(z) >= c}.
inline double pandora_reservation(const std::function<double(double)>& tail_value,
                                  double support_lo, double support_hi, double cost,
                                  double tol = 1e-10, int max_iter = 200) {
    return reservation_index(tail_value, support_lo, support_hi, 1.0, cost, tol, max_iter);
}

}  // namespace delight
