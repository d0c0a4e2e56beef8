#pragma once

// Environment families with ground-truth regret accounting: Bernoulli bandit,
// linear Gaussian bandit, DeepSea grid MDP. Regret increments always use true
// means / optimal returns, never realized noise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "delight/rng.hpp"

namespace delight {

struct StepOutcome {
    double reward = 0.0;
    double regret_increment = 0.0;
};

// ---------------------------------------------------------------------------
// Bernoulli bandit
// ---------------------------------------------------------------------------

struct BernoulliEnv {
    std::vector<double> means;
    double best_mean = 0.0;
};

inline BernoulliEnv sample_bernoulli_env(int num_arms, SplitMix64& rng) {
    if (num_arms < 1) throw std::invalid_argument("sample_bernoulli_env: need at least one arm");
    BernoulliEnv env;
    env.means.resize(num_arms);
    for (auto& m : env.means) m = rng.next_double();
    env.best_mean = *std::max_element(env.means.begin(), env.means.end());
    return env;
}

inline BernoulliEnv fixed_bernoulli_env(std::vector<double> means) {
    BernoulliEnv env;
    env.best_mean = *std::max_element(means.begin(), means.end());
    env.means = std::move(means);
    return env;
}

inline StepOutcome step_bernoulli(const BernoulliEnv& env, std::size_t action, SplitMix64& rng) {
    if (action >= env.means.size()) throw std::out_of_range("step_bernoulli: invalid action");
    StepOutcome out;
    out.reward = rng.bernoulli(env.means[action]) ? 1.0 : 0.0;
    out.regret_increment = env.best_mean - env.means[action];
    return out;
}

// ---------------------------------------------------------------------------
// Linear Gaussian bandit
// ---------------------------------------------------------------------------

struct LinearEnv {
    int num_arms = 0;
    int dim = 0;
    std::vector<double> features;   // K x d, row-major; rows drawn N(0, I/d)
    std::vector<double> theta_star; // d, drawn N(0, I)
    std::vector<double> true_means; // K
    double noise_sigma = 0.0;
    double best_mean = 0.0;

    std::span<const double> arm_features(std::size_t a) const {
        return {features.data() + a * static_cast<std::size_t>(dim),
                static_cast<std::size_t>(dim)};
    }
};

inline LinearEnv sample_linear_env(int num_arms, int dim, double noise_sigma, SplitMix64& rng) {
    if (num_arms < 1 || dim < 1)
        throw std::invalid_argument("sample_linear_env: need K >= 1 and d >= 1");
    if (noise_sigma < 0.0) throw std::invalid_argument("sample_linear_env: sigma must be >= 0");
    LinearEnv env;
    env.num_arms = num_arms;
    env.dim = dim;
    env.noise_sigma = noise_sigma;
    env.features.resize(static_cast<std::size_t>(num_arms) * dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    for (auto& f : env.features) f = scale * rng.normal();
    env.theta_star.resize(dim);
    for (auto& t : env.theta_star) t = rng.normal();
    env.true_means.resize(num_arms);
    for (int a = 0; a < num_arms; ++a) {
        double acc = 0.0;
        for (int j = 0; j < dim; ++j)
            acc += env.features[a * static_cast<std::size_t>(dim) + j] * env.theta_star[j];
        env.true_means[a] = acc;
    }
    env.best_mean = *std::max_element(env.true_means.begin(), env.true_means.end());
    return env;
}

inline StepOutcome step_linear(const LinearEnv& env, std::size_t action, SplitMix64& rng) {
    if (action >= env.true_means.size()) throw std::out_of_range("step_linear: invalid action");
    StepOutcome out;
    out.reward = env.true_means[action] + env.noise_sigma * rng.normal();
    out.regret_increment = env.best_mean - env.true_means[action];
    return out;
}

// ---------------------------------------------------------------------------
// DeepSea MDP
// ---------------------------------------------------------------------------

// Depth-H grid with binary actions. Every step descends one row; a per-state
// flip bit maps the raw action onto {left, right}. Rightward moves cost
// move_cost each, and taking a rightward move from the bottom-right cell pays
// the treasure. Exactly one raw action sequence reaches it.
class DeepSeaEnv {
  public:
    DeepSeaEnv(int depth, std::uint64_t instance_seed, double move_cost_scale = 0.01,
               double treasure_reward = 1.0)
        : depth_(depth), move_cost_(move_cost_scale / depth), treasure_(treasure_reward) {
        if (depth < 1) throw std::invalid_argument("DeepSeaEnv: depth must be >= 1");
        SplitMix64 rng(mix64(instance_seed ^ 0xD5EA5EEDull));
        flip_.resize(static_cast<std::size_t>(depth) * depth);
        for (auto& f : flip_) f = rng.bernoulli(0.5) ? 1 : 0;
        reset();
    }

    int depth() const { return depth_; }
    int num_states() const { return depth_ * depth_; }
    static constexpr int num_actions() { return 2; }
    double move_cost() const { return move_cost_; }
    double treasure_reward() const { return treasure_; }

    int state() const { return row_ * depth_ + col_; }
    bool done() const { return row_ >= depth_; }

    int reset() {
        row_ = 0;
        col_ = 0;
        return state();
    }

    struct Transition {
        int next_state = 0;
        double reward = 0.0;
        bool done = false;
    };

    Transition step(int action_bit) {
        if (done()) throw std::logic_error("DeepSeaEnv: step after episode end");
        if (action_bit != 0 && action_bit != 1)
            throw std::out_of_range("DeepSeaEnv: action must be 0 or 1");
        const bool right = (action_bit ^ flip_[state()]) != 0;
        Transition tr;
        if (right) {
            tr.reward -= move_cost_;
            if (row_ == depth_ - 1 && col_ == depth_ - 1) tr.reward += treasure_;
        }
        const int next_col = right ? std::min(col_ + 1, depth_ - 1) : std::max(col_ - 1, 0);
        ++row_;
        // The row index leaves the grid on the final step; clamp the encoded
        // successor to the last row. Planning never consumes it (V_H = 0).
        const int enc_row = std::min(row_, depth_ - 1);
        col_ = next_col;
        tr.next_state = enc_row * depth_ + col_;
        tr.done = done();
        return tr;
    }

  private:
    int depth_;
    double move_cost_;
    double treasure_;
    std::vector<std::uint8_t> flip_;
    int row_ = 0;
    int col_ = 0;
};

/// Best achievable episode return: the treasure minus depth rightward costs.
inline double deepsea_optimal_return(const DeepSeaEnv& env) {
    return env.treasure_reward() - env.depth() * env.move_cost();
}

}  // namespace delight
