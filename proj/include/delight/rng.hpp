#pragma once

// Counter-based splittable pseudorandom streams (SplitMix64) plus the small
// set of distributions the simulators need. Every stream is keyed by a 64-bit
// id derived from (base seed, agent name, condition index, seed index, role),
// so results are reproducible independent of thread count and run order.

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>

namespace delight {

// SplitMix64 output function (Steele, Lea & Flood 2014; Vigna's constants).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ (v + kGolden + (h << 6) + (h >> 2)));
}

constexpr std::uint64_t hash_string(std::string_view s) {
    // FNV-1a, then one avalanche pass.
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return mix64(h);
}

class SplitMix64 {
  public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next_u64() {
        state_ += kGolden;
        return mix64(state_);
    }

    // Uniform in [0, 1), 53-bit mantissa.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe under log().
    double next_double_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    bool bernoulli(double p) { return next_double() < p; }

    // Standard normal via Box-Muller with a cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_double_open();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    // Gamma(shape, 1) via Marsaglia-Tsang squeeze; boosted for shape < 1.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double u = next_double_open();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = next_double_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }

    // Index draw from a probability vector; assumes entries sum to ~1.
    std::size_t categorical(std::span<const double> probs) {
        const double u = next_double();
        double cum = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            cum += probs[i];
            if (u < cum) return i;
        }
        return probs.empty() ? 0 : probs.size() - 1;
    }

    void dirichlet(std::span<const double> concentration, std::span<double> out) {
        double sum = 0.0;
        for (std::size_t i = 0; i < concentration.size(); ++i) {
            out[i] = gamma(concentration[i]);
            sum += out[i];
        }
        if (sum <= 0.0) {
            const double p = 1.0 / static_cast<double>(out.size());
            for (auto& o : out) o = p;
            return;
        }
        for (auto& o : out) o /= sum;
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

enum class StreamRole : std::uint64_t { environment = 0, agent = 1, auxiliary = 2 };

// Documented splitting rule: one independent stream per
// (base seed, agent name, condition index, seed index, role) tuple.
inline std::uint64_t derive_stream(std::uint64_t base_seed, std::string_view agent_name,
                                   std::uint64_t condition_index, std::uint64_t seed_index,
                                   StreamRole role) {
    std::uint64_t h = mix64(base_seed ^ kGolden);
    h = hash_combine(h, hash_string(agent_name));
    h = hash_combine(h, condition_index);
    h = hash_combine(h, seed_index);
    h = hash_combine(h, static_cast<std::uint64_t>(role));
    return h;
}

inline SplitMix64 stream_for(std::uint64_t base_seed, std::string_view agent_name,
                             std::uint64_t condition_index, std::uint64_t seed_index,
                             StreamRole role) {
    return SplitMix64(derive_stream(base_seed, agent_name, condition_index, seed_index, role));
}

}  // namespace delight
