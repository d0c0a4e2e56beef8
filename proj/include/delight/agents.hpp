#pragma once

// Bandit agents behind one select/update interface: delight-gated exploration
// (Bernoulli and linear posteriors), Thompson sampling, annealed or constant
// epsilon-greedy, UCB1 with infinite fresh-arm index, pure greedy, and a
// fixed-temperature Boltzmann host used by the necessity demos.
//
// DE agents carry always-on structural instrumentation (gated-override
// budget counters, fresh-arm shutoff violations, gated floor violations) that
// the verification suite asserts over.

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "delight/core.hpp"
#include "delight/posteriors.hpp"
#include "delight/rng.hpp"

namespace delight {

enum class BanditAlgo {
    de_bernoulli,
    de_linear,
    thompson_bernoulli,
    thompson_linear,
    eps_greedy,
    ucb,
    greedy,
};

namespace detail {

struct EiKey {
    std::uint64_t a_bits;
    std::uint64_t b_bits;
    bool operator==(const EiKey&) const = default;
};

struct EiKeyHash {
    std::size_t operator()(const EiKey& k) const {
        return static_cast<std::size_t>(mix64(k.a_bits ^ (k.b_bits * kGolden)));
    }
};

}  // namespace detail

class BanditAgent {
  public:
    // --- factories -----------------------------------------------------

    static BanditAgent de_bernoulli(int num_arms, DelightConfig cfg, bool cold_start = false) {
        cfg.validate();
        BanditAgent a(BanditAlgo::de_bernoulli, num_arms);
        a.config_ = cfg;
        a.cold_start_ = cold_start;
        return a;
    }

    static BanditAgent thompson_bernoulli(int num_arms) {
        return BanditAgent(BanditAlgo::thompson_bernoulli, num_arms);
    }

    static BanditAgent eps_greedy_bernoulli(int num_arms, double half_life,
                                            std::optional<double> fixed_epsilon = std::nullopt) {
        BanditAgent a(BanditAlgo::eps_greedy, num_arms);
        a.config_.half_life = half_life;
        a.fixed_epsilon_ = fixed_epsilon;
        return a;
    }

    static BanditAgent ucb(int num_arms) { return BanditAgent(BanditAlgo::ucb, num_arms); }

    static BanditAgent greedy_bernoulli(int num_arms) {
        return BanditAgent(BanditAlgo::greedy, num_arms);
    }

    // Fixed-temperature Boltzmann host with no override: a DE agent whose
    // gate never opens and whose schedule is pinned at zero.
    static BanditAgent warm_host_bernoulli(int num_arms, double temperature) {
        BanditAgent a(BanditAlgo::de_bernoulli, num_arms);
        a.config_.gate_price = std::numeric_limits<double>::max();
        a.config_.host_mode = HostMode::boltzmann;
        a.config_.host_temperature = temperature;
        a.fixed_epsilon_ = 0.0;
        return a;
    }

    static BanditAgent de_linear(std::vector<double> features, int num_arms, int dim, double eta,
                                 double noise_var, DelightConfig cfg) {
        cfg.validate();
        BanditAgent a(BanditAlgo::de_linear, num_arms);
        a.config_ = cfg;
        a.init_linear(std::move(features), dim, eta, noise_var);
        return a;
    }

    static BanditAgent thompson_linear(std::vector<double> features, int num_arms, int dim,
                                       double eta, double noise_var) {
        BanditAgent a(BanditAlgo::thompson_linear, num_arms);
        a.init_linear(std::move(features), dim, eta, noise_var);
        return a;
    }

    static BanditAgent eps_greedy_linear(std::vector<double> features, int num_arms, int dim,
                                         double eta, double noise_var, double half_life,
                                         std::optional<double> fixed_epsilon = std::nullopt) {
        BanditAgent a(BanditAlgo::eps_greedy, num_arms);
        a.config_.half_life = half_life;
        a.fixed_epsilon_ = fixed_epsilon;
        a.init_linear(std::move(features), dim, eta, noise_var);
        return a;
    }

    // --- core interface -------------------------------------------------

    std::size_t select(SplitMix64& rng) {
        last_was_gated_override_ = false;
        if (cold_start_ && t_ < num_arms_) {
            const auto action = static_cast<std::size_t>(t_);
            note_selection(action);
            return action;
        }
        switch (algo_) {
            case BanditAlgo::de_bernoulli: return de_select_bernoulli(rng);
            case BanditAlgo::de_linear: return de_select_linear(rng);
            case BanditAlgo::thompson_bernoulli: return thompson_select_bernoulli(rng);
            case BanditAlgo::thompson_linear: return thompson_select_linear(rng);
            case BanditAlgo::eps_greedy: return eps_greedy_select(rng);
            case BanditAlgo::ucb: return ucb_select();
            case BanditAlgo::greedy: {
                const auto action = argmax_lowest(posterior_means());
                note_selection(action);
                return action;
            }
        }
        throw std::logic_error("BanditAgent: unknown algorithm");
    }

    void update(std::size_t action, double reward) {
        if (action >= static_cast<std::size_t>(num_arms_))
            throw std::out_of_range("BanditAgent::update: invalid action");
        if (linear_backed()) {
            lin_.update(arm_features(action), reward);
        } else {
            arms_[action] = beta_update(arms_[action], reward != 0.0);
        }
        ++pulls_[action];
        ++t_;
    }

    // --- probes -----------------------------------------------------------

    int num_arms() const { return num_arms_; }
    long round() const { return t_; }
    const DelightConfig& config() const { return config_; }

    void set_fixed_epsilon(std::optional<double> eps) { fixed_epsilon_ = eps; }

    // Injects posterior state directly (tests and demos).
    void set_beta_arm(std::size_t a, BetaPosterior post, std::uint64_t pulls) {
        arms_.at(a) = post;
        pulls_.at(a) = pulls;
    }
    bool linear_backed() const { return lin_.dim() > 0; }
    std::uint64_t pull_count(std::size_t a) const { return pulls_[a]; }
    const std::vector<BetaPosterior>& beta_arms() const { return arms_; }
    const LinearGaussianPosterior& linear_posterior() const { return lin_; }

    std::vector<double> posterior_means() const {
        std::vector<double> means(num_arms_);
        if (linear_backed()) {
            for (int a = 0; a < num_arms_; ++a) {
                double acc = 0.0;
                const auto x = arm_features(a);
                for (int j = 0; j < feat_dim_; ++j) acc += x[j] * lin_.mean()[j];
                means[a] = acc;
            }
        } else {
            for (int a = 0; a < num_arms_; ++a) means[a] = beta_mean(arms_[a]);
        }
        return means;
    }

    bool last_was_gated_override() const { return last_was_gated_override_; }
    std::uint64_t gated_override_rounds() const { return gated_override_rounds_; }
    std::uint64_t fresh_selections() const { return fresh_selections_; }
    std::uint64_t fresh_gated_overrides() const { return fresh_gated_overrides_; }
    std::uint64_t fresh_overrides_above_shutoff() const { return fresh_overrides_above_shutoff_; }
    std::uint64_t shutoff_violations() const { return shutoff_violations_; }
    std::uint64_t floor_violations() const { return floor_violations_; }
    std::uint64_t gate_empty_mismatches() const { return gate_empty_mismatches_; }
    const std::vector<std::uint64_t>& override_selections() const { return override_selections_; }

    std::uint64_t distinct_arms_played() const {
        std::uint64_t n = 0;
        for (auto p : pulls_) n += p > 0 ? 1 : 0;
        return n;
    }

  private:
    BanditAgent(BanditAlgo algo, int num_arms)
        : algo_(algo), num_arms_(num_arms), arms_(num_arms), pulls_(num_arms, 0),
          override_selections_(num_arms, 0) {
        if (num_arms < 1) throw std::invalid_argument("BanditAgent: need at least one arm");
    }

    void init_linear(std::vector<double> features, int dim, double eta, double noise_var) {
        if (features.size() != static_cast<std::size_t>(num_arms_) * dim)
            throw std::invalid_argument("BanditAgent: features must be K x d");
        features_ = std::move(features);
        feat_dim_ = dim;
        lin_ = LinearGaussianPosterior(dim, eta, noise_var);
        arms_.clear();
    }

    std::span<const double> arm_features(std::size_t a) const {
        return {features_.data() + a * static_cast<std::size_t>(feat_dim_),
                static_cast<std::size_t>(feat_dim_)};
    }

    double epsilon() const {
        return fixed_epsilon_ ? *fixed_epsilon_ : epsilon_schedule(config_.half_life, t_);
    }

    void note_selection(std::size_t action) {
        if (pulls_[action] == 0) ++fresh_selections_;
    }

    std::size_t finish_de_round(const GateDecision& decision, SplitMix64& rng) {
        // Gate-empty => acting distribution must equal the host exactly.
        if (decision.gate_empty()) {
            for (std::size_t i = 0; i < decision.override_dist.size(); ++i)
                if (decision.override_dist[i] != host_scratch_[i]) {
                    ++gate_empty_mismatches_;
                    break;
                }
        }
        const ActResult r = act(host_scratch_, decision.override_dist, epsilon(), rng);
        const bool gated_selection = r.used_override && !decision.gate_empty();
        last_was_gated_override_ = gated_selection;
        if (gated_selection) {
            ++gated_override_rounds_;
            ++override_selections_[r.action];
            // delight >= lambda and surprisal <= cap imply ei * cap >= lambda.
            if (!(decision.ei[r.action] * config_.surprisal_cap >= config_.gate_price))
                ++floor_violations_;
            if (pulls_[r.action] == 0) {
                ++fresh_gated_overrides_;
                const auto v_off =
                    fresh_arm_threshold(config_.gate_price, config_.surprisal_cap);
                if (!linear_backed() && v_off && decision.baseline > *v_off)
                    ++fresh_overrides_above_shutoff_;
            }
        }
        note_selection(r.action);
        return r.action;
    }

    std::size_t de_select_bernoulli(SplitMix64& rng) {
        const std::vector<double> means = posterior_means();
        const double baseline = means[argmax_lowest(means)];
        host_scratch_ = host_policy(means, config_);

        std::vector<double> ei(num_arms_);
        ei_memo_.clear();
        for (int a = 0; a < num_arms_; ++a) {
            const detail::EiKey key{std::bit_cast<std::uint64_t>(arms_[a].alpha),
                                    std::bit_cast<std::uint64_t>(arms_[a].beta)};
            auto [it, inserted] = ei_memo_.try_emplace(key, 0.0);
            if (inserted) it->second = beta_ei(arms_[a], baseline);
            ei[a] = it->second;
        }

        GateDecision decision = make_gate_decision(std::move(ei), host_scratch_, baseline,
                                                   config_.gate_price, config_.surprisal_cap);

        // Fresh-arm shutoff: above v_off the gate may not contain untried arms.
        const auto v_off = fresh_arm_threshold(config_.gate_price, config_.surprisal_cap);
        if (v_off && baseline > *v_off) {
            for (std::size_t a : decision.gated_set)
                if (pulls_[a] == 0) ++shutoff_violations_;
        }
        return finish_de_round(decision, rng);
    }

    std::size_t de_select_linear(SplitMix64& rng) {
        std::vector<double> mu(num_arms_);
        std::vector<double> sd(num_arms_);
        for (int a = 0; a < num_arms_; ++a) {
            const Predictive p = lin_.predictive(arm_features(a));
            mu[a] = p.mean;
            sd[a] = std::sqrt(p.variance);
        }
        const double baseline = mu[argmax_lowest(mu)];
        host_scratch_ = host_policy(mu, config_);
        std::vector<double> ei(num_arms_);
        for (int a = 0; a < num_arms_; ++a) ei[a] = gaussian_ei(mu[a], sd[a], baseline);
        GateDecision decision = make_gate_decision(std::move(ei), host_scratch_, baseline,
                                                   config_.gate_price, config_.surprisal_cap);
        return finish_de_round(decision, rng);
    }

    std::size_t thompson_select_bernoulli(SplitMix64& rng) {
        std::vector<double> draws(num_arms_);
        for (int a = 0; a < num_arms_; ++a) draws[a] = rng.beta(arms_[a].alpha, arms_[a].beta);
        const auto action = argmax_lowest(draws);
        note_selection(action);
        return action;
    }

    std::size_t thompson_select_linear(SplitMix64& rng) {
        const std::vector<double> theta = lin_.sample(rng);
        std::vector<double> scores(num_arms_);
        for (int a = 0; a < num_arms_; ++a) {
            double acc = 0.0;
            const auto x = arm_features(a);
            for (int j = 0; j < feat_dim_; ++j) acc += x[j] * theta[j];
            scores[a] = acc;
        }
        const auto action = argmax_lowest(scores);
        note_selection(action);
        return action;
    }

    std::size_t eps_greedy_select(SplitMix64& rng) {
        std::size_t action;
        if (rng.bernoulli(epsilon())) {
            action = std::min(static_cast<std::size_t>(rng.next_double() * num_arms_),
                              static_cast<std::size_t>(num_arms_ - 1));
        } else {
            action = argmax_lowest(posterior_means());
        }
        note_selection(action);
        return action;
    }

    std::size_t ucb_select() {
        for (int a = 0; a < num_arms_; ++a)
            if (pulls_[a] == 0) {
                note_selection(static_cast<std::size_t>(a));
                return static_cast<std::size_t>(a);
            }
        std::vector<double> index(num_arms_);
        const double log_t = std::log(static_cast<double>(std::max<long>(t_, 1)));
        for (int a = 0; a < num_arms_; ++a) {
            const double n = static_cast<double>(pulls_[a]);
            const double empirical = (arms_[a].alpha - 1.0) / n;
            index[a] = empirical + std::sqrt(2.0 * log_t / n);
        }
        const auto action = argmax_lowest(index);
        note_selection(action);
        return action;
    }

    BanditAlgo algo_;
    int num_arms_;
    DelightConfig config_{};
    std::optional<double> fixed_epsilon_;
    bool cold_start_ = false;

    std::vector<BetaPosterior> arms_;
    LinearGaussianPosterior lin_;
    std::vector<double> features_;
    int feat_dim_ = 0;

    long t_ = 0;
    std::vector<std::uint64_t> pulls_;
    std::vector<std::uint64_t> override_selections_;
    std::uint64_t gated_override_rounds_ = 0;
    std::uint64_t fresh_selections_ = 0;
    std::uint64_t fresh_gated_overrides_ = 0;
    std::uint64_t fresh_overrides_above_shutoff_ = 0;
    std::uint64_t shutoff_violations_ = 0;
    std::uint64_t floor_violations_ = 0;
    std::uint64_t gate_empty_mismatches_ = 0;
    bool last_was_gated_override_ = false;

    std::vector<double> host_scratch_;
    std::unordered_map<detail::EiKey, double, detail::EiKeyHash> ei_memo_;
};

/// Information-gain budget for linear DE runs:
/// gamma_T = d * log(1 + T/(eta * sigma^2 * d)).
inline double linear_information_gain(int dim, long horizon, double eta, double noise_var) {
    return dim * std::log(1.0 + static_cast<double>(horizon) / (eta * noise_var * dim));
}

/// Upper bound on gated-override rounds: 2*gamma_T / min{1, lambda^2/(L^2 sigma^2)}.
inline double linear_override_budget(int dim, long horizon, double eta, double noise_var,
                                     double gate_price, double cap) {
    const double ratio = gate_price * gate_price / (cap * cap * noise_var);
    return 2.0 * linear_information_gain(dim, horizon, eta, noise_var) / std::min(1.0, ratio);
}

/// Post-separation gated-pull budget per arm: ceil(L / (2*lambda*gap)).
inline double gap_override_budget(double gate_price, double cap, double gap) {
    return std::ceil(cap / (2.0 * gate_price * gap));
}

}  // namespace delight
