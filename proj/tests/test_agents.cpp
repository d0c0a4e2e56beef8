#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "delight/agents.hpp"
#include "delight/environments.hpp"
#include "delight/rng.hpp"

using namespace delight;

TEST_CASE("de agent gates fresh arms below the shutoff and excludes them above") {
    DelightConfig cfg;

    // All arms fresh: baseline 0.5 < v_off, non-host fresh arms are gated,
    // so forced override rounds select them.
    BanditAgent agent = BanditAgent::de_bernoulli(3, cfg);
    agent.set_fixed_epsilon(1.0);
    SplitMix64 rng(5);
    bool picked_nonhost = false;
    for (int i = 0; i < 50; ++i) {
        const std::size_t a = agent.select(rng);
        CHECK(agent.last_was_gated_override());
        if (a != 0) picked_nonhost = true;
    }
    CHECK(picked_nonhost);
    CHECK(agent.gated_override_rounds() == 50);
    CHECK(agent.shutoff_violations() == 0);
    CHECK(agent.floor_violations() == 0);

    // One resolved arm above v_off: fresh arms are excluded from the gate,
    // and the override falls back to the host.
    BanditAgent hot = BanditAgent::de_bernoulli(3, cfg);
    hot.set_beta_arm(0, BetaPosterior{90.0, 10.0}, 98);
    hot.set_fixed_epsilon(1.0);
    for (int i = 0; i < 200; ++i) {
        const std::size_t a = hot.select(rng);
        CHECK(a == 0);  // gate empty: override == greedy host
        CHECK_FALSE(hot.last_was_gated_override());
    }
    CHECK(hot.shutoff_violations() == 0);
    CHECK(hot.fresh_overrides_above_shutoff() == 0);

    // Host branch: with epsilon pinned at zero DE is greedy on means.
    BanditAgent host_only = BanditAgent::de_bernoulli(3, cfg);
    host_only.set_beta_arm(1, BetaPosterior{4.0, 2.0}, 4);
    host_only.set_fixed_epsilon(0.0);
    CHECK(host_only.select(rng) == 1);
}

TEST_CASE("thompson sampling argmaxes posterior draws") {
    SplitMix64 rng(6);
    BanditAgent single = BanditAgent::thompson_bernoulli(1);
    for (int i = 0; i < 10; ++i) CHECK(single.select(rng) == 0);

    BanditAgent skewed = BanditAgent::thompson_bernoulli(2);
    skewed.set_beta_arm(0, BetaPosterior{1e6, 1.0}, 1000000);
    skewed.set_beta_arm(1, BetaPosterior{1.0, 1e6}, 1000000);
    long first = 0;
    for (int i = 0; i < 10000; ++i) first += skewed.select(rng) == 0 ? 1 : 0;
    CHECK(first > 9990);
}

TEST_CASE("thompson sampling on a linear posterior") {
    // d=1 posterior concentrated at theta ~ 1; arms are +1 and -1.
    std::vector<double> features = {1.0, -1.0};
    BanditAgent agent = BanditAgent::thompson_linear(features, 2, 1, 1.0, 1.0);
    for (int i = 0; i < 300; ++i) agent.update(0, 1.0);
    SplitMix64 rng(7);
    for (int i = 0; i < 100; ++i) CHECK(agent.select(rng) == 0);
}

TEST_CASE("epsilon greedy mixes uniform and greedy branches") {
    SplitMix64 rng(8);

    BanditAgent uniform = BanditAgent::eps_greedy_bernoulli(4, 100.0, 1.0);
    std::vector<long> counts(4, 0);
    const long n = 200000;
    for (long i = 0; i < n; ++i) ++counts[uniform.select(rng)];
    for (int k = 0; k < 4; ++k) {
        const double se = std::sqrt(0.25 * 0.75 * n);
        CHECK(std::fabs(counts[k] - 0.25 * n) <= 4.0 * se);
    }

    BanditAgent greedy = BanditAgent::eps_greedy_bernoulli(3, 100.0, 0.0);
    greedy.set_beta_arm(2, BetaPosterior{5.0, 1.0}, 4);
    for (int i = 0; i < 20; ++i) CHECK(greedy.select(rng) == 2);

    // K=2, eps=0.5, means (0.9, 0.1): arm 0 with probability 0.75.
    BanditAgent half = BanditAgent::eps_greedy_bernoulli(2, 100.0, 0.5);
    half.set_beta_arm(0, BetaPosterior{9.0, 1.0}, 8);
    half.set_beta_arm(1, BetaPosterior{1.0, 9.0}, 8);
    long zero = 0;
    for (long i = 0; i < n; ++i) zero += half.select(rng) == 0 ? 1 : 0;
    const double se = std::sqrt(0.75 * 0.25 * n);
    CHECK(std::fabs(zero - 0.75 * n) <= 4.0 * se);
}

TEST_CASE("ucb prefers unpulled arms then uses the UCB1 index") {
    SplitMix64 rng(9);
    BanditAgent agent = BanditAgent::ucb(3);
    CHECK(agent.select(rng) == 0);
    agent.update(0, 1.0);
    CHECK(agent.select(rng) == 1);
    agent.update(1, 0.0);
    CHECK(agent.select(rng) == 2);
    agent.update(2, 0.0);
    // All pulled once: empirical means 1, 0, 0 -> arm 0 wins the index.
    CHECK(agent.select(rng) == 0);

    BanditAgent ties = BanditAgent::ucb(3);
    for (int a = 0; a < 3; ++a) {
        CHECK(ties.select(rng) == static_cast<std::size_t>(a));
        ties.update(a, 0.0);
    }
    CHECK(ties.select(rng) == 0);  // equal means tie-break to lowest index

    // K >= T: a fresh arm every round.
    const int T = 50;
    BanditAgent wide = BanditAgent::ucb(T + 1);
    for (int t = 0; t < T; ++t) {
        const std::size_t a = wide.select(rng);
        CHECK(wide.pull_count(a) == 0);
        wide.update(a, 0.0);
    }
    CHECK(wide.distinct_arms_played() == static_cast<std::uint64_t>(T));
}

TEST_CASE("update routes rewards to the right posterior and leaves counters") {
    SplitMix64 rng(10);
    BanditAgent bern = BanditAgent::de_bernoulli(2, DelightConfig{});
    const auto overrides_before = bern.gated_override_rounds();
    bern.update(1, 1.0);
    CHECK(bern.beta_arms()[1].alpha == 2.0);
    CHECK(bern.beta_arms()[1].beta == 1.0);
    CHECK(bern.gated_override_rounds() == overrides_before);
    CHECK(bern.round() == 1);
    CHECK_THROWS_AS(bern.update(5, 1.0), std::out_of_range);

    std::vector<double> features = {1.0, 0.0, 0.0, 1.0};
    BanditAgent lin = BanditAgent::de_linear(features, 2, 2, 1.0, 1.0, DelightConfig{});
    lin.update(0, 1.0);
    CHECK(lin.linear_posterior().mean()[0] == Catch::Approx(0.5).margin(1e-12));
    CHECK(lin.posterior_means()[0] == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("cold start pulls every arm once before gating") {
    BanditAgent agent = BanditAgent::de_bernoulli(4, DelightConfig{}, true);
    SplitMix64 rng(11);
    for (int t = 0; t < 4; ++t) {
        CHECK(agent.select(rng) == static_cast<std::size_t>(t));
        agent.update(t, 0.0);
    }
}

TEST_CASE("budget helper formulas") {
    CHECK(linear_information_gain(2, 100, 1.0, 1.0) ==
          Catch::Approx(2.0 * std::log(51.0)).margin(1e-12));
    CHECK(2.0 * linear_information_gain(2, 100, 1.0, 1.0) ==
          Catch::Approx(15.727302530897303).margin(1e-9));
    CHECK(gap_override_budget(0.1, 10.0, 0.5) == 100.0);
}

TEST_CASE("identical seeds and configs give identical action sequences") {
    for (int variant = 0; variant < 2; ++variant) {
        auto run = [&](std::uint64_t seed) {
            std::vector<std::size_t> actions;
            SplitMix64 env_rng(seed);
            const BernoulliEnv env = sample_bernoulli_env(5, env_rng);
            BanditAgent agent = variant == 0 ? BanditAgent::de_bernoulli(5, DelightConfig{})
                                             : BanditAgent::thompson_bernoulli(5);
            SplitMix64 agent_rng(seed ^ 0xABCDEF);
            for (int t = 0; t < 300; ++t) {
                const std::size_t a = agent.select(agent_rng);
                actions.push_back(a);
                agent.update(a, step_bernoulli(env, a, env_rng).reward);
            }
            return actions;
        };
        CHECK(run(77) == run(77));
    }
}
