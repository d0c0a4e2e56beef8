#pragma once

// Finite-horizon planning and the sequential agents: delight-gated
// exploration with a frozen-plan Boltzmann host and an online posterior-mean
// evaluator, posterior-sampling RL, and epsilon-greedy over planned values.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "delight/core.hpp"
#include "delight/environments.hpp"
#include "delight/posteriors.hpp"
#include "delight/rng.hpp"

namespace delight {

struct PlanningModel {
    int num_states = 0;
    int num_actions = 0;
    int horizon = 0;
    std::vector<double> transitions;  // S*A*S, rows stochastic
    std::vector<double> rewards;      // S*A

    PlanningModel() = default;
    PlanningModel(MeanModel model, int h)
        : num_states(model.num_states), num_actions(model.num_actions), horizon(h),
          transitions(std::move(model.transitions)), rewards(std::move(model.rewards)) {}
};

// Nonstationary finite-horizon action values Q_h(s,a).
struct QFunction {
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> values;

    double at(int h, int s, int a) const {
        return values[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
    }
    std::span<const double> row(int h, int s) const {
        return {values.data() + (static_cast<std::size_t>(h) * num_states + s) * num_actions,
                static_cast<std::size_t>(num_actions)};
    }
};

namespace detail {

// Exact backward induction: Q_h(s,a) = r(s,a) + sum_s' P(s'|s,a) V_{h+1}(s'),
// V_H = 0. Deterministic evaluation order, so replanning on an unchanged
// model reproduces Q bitwise.
inline void backward_induction(std::span<const double> transitions,
                               std::span<const double> rewards, int S, int A, int H,
                               QFunction& out, std::vector<double>& value_scratch) {
    out.horizon = H;
    out.num_states = S;
    out.num_actions = A;
    out.values.assign(static_cast<std::size_t>(H) * S * A, 0.0);
    value_scratch.assign(static_cast<std::size_t>(2) * S, 0.0);
    double* v_next = value_scratch.data();       // V_{h+1}
    double* v_here = value_scratch.data() + S;   // V_h
    for (int h = H - 1; h >= 0; --h) {
        for (int s = 0; s < S; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < A; ++a) {
                const std::size_t row = (static_cast<std::size_t>(s) * A + a) * S;
                double acc = 0.0;
                for (int t = 0; t < S; ++t) acc += transitions[row + t] * v_next[t];
                const double q = rewards[static_cast<std::size_t>(s) * A + a] + acc;
                out.values[(static_cast<std::size_t>(h) * S + s) * A + a] = q;
                if (q > best) best = q;
            }
            v_here[s] = best;
        }
        std::swap(v_next, v_here);
    }
}

}  // namespace detail

inline QFunction plan(const PlanningModel& model) {
    if (model.num_states <= 0 || model.num_actions <= 0 || model.horizon <= 0)
        throw std::invalid_argument("plan: empty model");
    QFunction q;
    std::vector<double> scratch;
    detail::backward_induction(model.transitions, model.rewards, model.num_states,
                               model.num_actions, model.horizon, q, scratch);
    return q;
}

inline TabularModelPosterior make_deepsea_posterior(const DeepSeaEnv& env,
                                                    double prior_concentration = 1.0) {
    return TabularModelPosterior(env.num_states(), DeepSeaEnv::num_actions(), -env.move_cost(),
                                 env.treasure_reward(), prior_concentration);
}

struct EpisodeStats {
    double episode_return = 0.0;
    std::uint64_t gated_override_steps = 0;
};

// ---------------------------------------------------------------------------
// DE on MDPs: freeze a posterior-mean plan and Boltzmann host per episode,
// evaluate improvement online against the frozen baseline, gate, act.
// ---------------------------------------------------------------------------

class DeMdpAgent {
  public:
    DeMdpAgent(int num_states, int num_actions, int horizon, double r_min, double r_max,
               DelightConfig cfg, double prior_concentration = 1.0)
        : S_(num_states), A_(num_actions), H_(horizon), config_(cfg),
          post_(num_states, num_actions, r_min, r_max, prior_concentration) {
        config_.validate();
    }

    const TabularModelPosterior& posterior() const { return post_; }
    long episode() const { return episode_; }
    std::uint64_t gated_override_steps() const { return gated_override_steps_; }
    std::uint64_t floor_violations() const { return floor_violations_; }
    std::uint64_t gate_empty_mismatches() const { return gate_empty_mismatches_; }

    void set_fixed_epsilon(std::optional<double> eps) { fixed_epsilon_ = eps; }

    // Freeze the plan and host for the coming episode.
    void begin_episode() {
        post_.posterior_mean_model_into(model_scratch_);
        detail::backward_induction(model_scratch_.transitions, model_scratch_.rewards, S_, A_, H_,
                                   frozen_plan_, value_scratch_);
        frozen_host_.assign(frozen_plan_.values.size(), 0.0);
        frozen_vplan_.assign(static_cast<std::size_t>(H_) * S_, 0.0);
        for (int h = 0; h < H_; ++h) {
            for (int s = 0; s < S_; ++s) {
                const auto q_row = frozen_plan_.row(h, s);
                std::vector<double> host = boltzmann_policy(q_row, config_.host_temperature);
                double v = 0.0;
                for (int a = 0; a < A_; ++a) {
                    frozen_host_[(static_cast<std::size_t>(h) * S_ + s) * A_ + a] = host[a];
                    v += host[a] * q_row[a];
                }
                frozen_vplan_[static_cast<std::size_t>(h) * S_ + s] = v;
            }
        }
    }

    std::span<const double> frozen_host_row(int h, int s) const {
        return {frozen_host_.data() + (static_cast<std::size_t>(h) * S_ + s) * A_,
                static_cast<std::size_t>(A_)};
    }
    double frozen_state_value(int h, int s) const {
        return frozen_vplan_[static_cast<std::size_t>(h) * S_ + s];
    }
    const QFunction& frozen_plan() const { return frozen_plan_; }

    // One gated selection at (state, step): replan on the live posterior,
    // score improvement against the frozen baseline, gate, mix with the host.
    int select_action(int state, int step, SplitMix64& rng) {
        post_.posterior_mean_model_into(model_scratch_);
        detail::backward_induction(model_scratch_.transitions, model_scratch_.rewards, S_, A_, H_,
                                   q_post_, value_scratch_);
        const double v_plan = frozen_state_value(step, state);
        std::vector<double> ei(A_);
        for (int a = 0; a < A_; ++a) {
            const double gain = q_post_.at(step, state, a) - v_plan;
            ei[a] = gain > 0.0 ? gain : 0.0;
        }
        const auto host = frozen_host_row(step, state);
        GateDecision decision =
            make_gate_decision(std::move(ei), host, v_plan, config_.gate_price,
                               config_.surprisal_cap);
        if (decision.gate_empty()) {
            for (std::size_t i = 0; i < decision.override_dist.size(); ++i)
                if (decision.override_dist[i] != host[i]) {
                    ++gate_empty_mismatches_;
                    break;
                }
        }
        const double eps =
            fixed_epsilon_ ? *fixed_epsilon_ : epsilon_schedule(config_.half_life, episode_);
        const ActResult r = act(host, decision.override_dist, eps, rng);
        if (r.used_override && !decision.gate_empty()) {
            ++gated_override_steps_;
            if (!(decision.ei[r.action] * config_.surprisal_cap >= config_.gate_price))
                ++floor_violations_;
        }
        return static_cast<int>(r.action);
    }

    void observe(int s, int a, int s_next, double reward) { post_.observe(s, a, s_next, reward); }

    void end_episode() { ++episode_; }

    EpisodeStats run_episode(DeepSeaEnv& env, SplitMix64& rng) {
        begin_episode();
        EpisodeStats stats;
        const std::uint64_t gated_before = gated_override_steps_;
        int s = env.reset();
        for (int h = 0; h < H_; ++h) {
            const int a = select_action(s, h, rng);
            const auto tr = env.step(a);
            observe(s, a, tr.next_state, tr.reward);
            stats.episode_return += tr.reward;
            s = tr.next_state;
        }
        end_episode();
        stats.gated_override_steps = gated_override_steps_ - gated_before;
        return stats;
    }

  private:
    int S_, A_, H_;
    DelightConfig config_;
    TabularModelPosterior post_;
    std::optional<double> fixed_epsilon_;
    long episode_ = 0;

    MeanModel model_scratch_;
    QFunction frozen_plan_;
    QFunction q_post_;
    std::vector<double> frozen_host_;
    std::vector<double> frozen_vplan_;
    std::vector<double> value_scratch_;

    std::uint64_t gated_override_steps_ = 0;
    std::uint64_t floor_violations_ = 0;
    std::uint64_t gate_empty_mismatches_ = 0;
};

// ---------------------------------------------------------------------------
// PSRL: sample a full MDP from the posterior each episode, act greedily on
// its optimal plan, update the posterior online.
// ---------------------------------------------------------------------------

class PsrlAgent {
  public:
    PsrlAgent(int num_states, int num_actions, int horizon, double r_min, double r_max,
              double prior_concentration = 1.0)
        : S_(num_states), A_(num_actions), H_(horizon),
          post_(num_states, num_actions, r_min, r_max, prior_concentration) {}

    const TabularModelPosterior& posterior() const { return post_; }
    long episode() const { return episode_; }

    void observe(int s, int a, int s_next, double reward) { post_.observe(s, a, s_next, reward); }

    EpisodeStats run_episode(DeepSeaEnv& env, SplitMix64& rng) {
        MeanModel sampled = post_.sample_model(rng);
        detail::backward_induction(sampled.transitions, sampled.rewards, S_, A_, H_, q_,
                                   value_scratch_);
        EpisodeStats stats;
        int s = env.reset();
        for (int h = 0; h < H_; ++h) {
            const int a = static_cast<int>(argmax_lowest(q_.row(h, s)));
            const auto tr = env.step(a);
            post_.observe(s, a, tr.next_state, tr.reward);
            stats.episode_return += tr.reward;
            s = tr.next_state;
        }
        ++episode_;
        return stats;
    }

  private:
    int S_, A_, H_;
    TabularModelPosterior post_;
    long episode_ = 0;
    QFunction q_;
    std::vector<double> value_scratch_;
};

// ---------------------------------------------------------------------------
// Annealed epsilon-greedy over values planned on the posterior-mean model.
// ---------------------------------------------------------------------------

class EpsGreedyQAgent {
  public:
    EpsGreedyQAgent(int num_states, int num_actions, int horizon, double r_min, double r_max,
                    double half_life, double prior_concentration = 1.0)
        : S_(num_states), A_(num_actions), H_(horizon), half_life_(half_life),
          post_(num_states, num_actions, r_min, r_max, prior_concentration) {}

    const TabularModelPosterior& posterior() const { return post_; }
    void set_fixed_epsilon(std::optional<double> eps) { fixed_epsilon_ = eps; }

    EpisodeStats run_episode(DeepSeaEnv& env, SplitMix64& rng) {
        post_.posterior_mean_model_into(model_scratch_);
        detail::backward_induction(model_scratch_.transitions, model_scratch_.rewards, S_, A_, H_,
                                   q_, value_scratch_);
        const double eps =
            fixed_epsilon_ ? *fixed_epsilon_ : epsilon_schedule(half_life_, episode_);
        EpisodeStats stats;
        int s = env.reset();
        for (int h = 0; h < H_; ++h) {
            int a;
            if (rng.bernoulli(eps)) {
                a = static_cast<int>(std::min(static_cast<std::size_t>(rng.next_double() * A_),
                                              static_cast<std::size_t>(A_ - 1)));
            } else {
                a = static_cast<int>(argmax_lowest(q_.row(h, s)));
            }
            const auto tr = env.step(a);
            post_.observe(s, a, tr.next_state, tr.reward);
            stats.episode_return += tr.reward;
            s = tr.next_state;
        }
        ++episode_;
        return stats;
    }

  private:
    int S_, A_, H_;
    double half_life_;
    TabularModelPosterior post_;
    std::optional<double> fixed_epsilon_;
    long episode_ = 0;
    QFunction q_;
    MeanModel model_scratch_;
    std::vector<double> value_scratch_;
};

}  // namespace delight
