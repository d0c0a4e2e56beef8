#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "delight/core.hpp"
#include "delight/environments.hpp"
#include "delight/rng.hpp"

using namespace delight;

TEST_CASE("bernoulli environment sampling and stepping") {
    SplitMix64 rng(1);
    const BernoulliEnv one = sample_bernoulli_env(1, rng);
    CHECK(one.best_mean == one.means[0]);
    CHECK(step_bernoulli(one, 0, rng).regret_increment == 0.0);

    SplitMix64 r1(42), r2(42);
    const BernoulliEnv a = sample_bernoulli_env(20, r1);
    const BernoulliEnv b = sample_bernoulli_env(20, r2);
    CHECK(a.means == b.means);

    const BernoulliEnv det = fixed_bernoulli_env({1.0, 0.3});
    for (int i = 0; i < 50; ++i) CHECK(step_bernoulli(det, 0, rng).reward == 1.0);
    CHECK(step_bernoulli(det, 0, rng).regret_increment == 0.0);
    CHECK(step_bernoulli(det, 1, rng).regret_increment == Catch::Approx(0.7));
    CHECK_THROWS_AS(step_bernoulli(det, 2, rng), std::out_of_range);

    long wins = 0;
    const long n = 100000;
    for (long i = 0; i < n; ++i) wins += step_bernoulli(det, 1, rng).reward > 0.5 ? 1 : 0;
    const double se = std::sqrt(0.3 * 0.7 * n);
    CHECK(std::fabs(wins - 0.3 * n) <= 4.0 * se);

    SplitMix64 big_rng(7);
    const BernoulliEnv big = sample_bernoulli_env(100000, big_rng);
    CHECK(big.best_mean > 0.999);
}

TEST_CASE("linear environment rewards and regret use true means") {
    SplitMix64 rng(2);
    const LinearEnv noiseless = sample_linear_env(10, 3, 0.0, rng);
    for (int a = 0; a < 10; ++a) {
        const auto out = step_linear(noiseless, a, rng);
        CHECK(out.reward == Catch::Approx(noiseless.true_means[a]).margin(1e-12));
        CHECK(out.regret_increment >= 0.0);
    }
    const std::size_t best =
        argmax_lowest(std::span<const double>(noiseless.true_means));
    CHECK(step_linear(noiseless, best, rng).regret_increment == 0.0);
    CHECK_THROWS_AS(step_linear(noiseless, 10, rng), std::out_of_range);

    // Feature law: E ||x_a||^2 = 1.
    const LinearEnv wide = sample_linear_env(10000, 8, 1.0, rng);
    double acc = 0.0;
    for (int a = 0; a < wide.num_arms; ++a) {
        double n2 = 0.0;
        for (double f : wide.arm_features(a)) n2 += f * f;
        acc += n2;
    }
    CHECK(acc / wide.num_arms == Catch::Approx(1.0).epsilon(0.05));
}

TEST_CASE("deepsea episode structure") {
    const int depth = 6;
    DeepSeaEnv env(depth, 999);
    CHECK(deepsea_optimal_return(env) == Catch::Approx(0.99).margin(1e-12));
    // The cost scales with depth, so the optimum is depth-independent.
    CHECK(deepsea_optimal_return(DeepSeaEnv(2, 1)) == Catch::Approx(0.99).margin(1e-12));
    CHECK(deepsea_optimal_return(DeepSeaEnv(10, 1)) == Catch::Approx(0.99).margin(1e-12));

    // All-right trajectory: probe each step's rightward raw action by trying
    // one that increases the column.
    env.reset();
    double ret = 0.0;
    int steps = 0;
    while (!env.done()) {
        DeepSeaEnv probe = env;
        const int col_before = probe.state() % depth;
        const auto tr = probe.step(0);
        const int col_after = tr.next_state % depth;
        // Rightward moves raise the column, or pay a nonzero reward when
        // clamped at the right edge.
        const bool zero_moves_right =
            col_after > col_before || (col_before == depth - 1 && tr.reward != 0.0);
        const auto real = env.step(zero_moves_right ? 0 : 1);
        ret += real.reward;
        ++steps;
    }
    CHECK(steps == depth);
    CHECK(ret == Catch::Approx(0.99).margin(1e-12));
    CHECK_THROWS_AS(env.step(0), std::logic_error);

    // All-left trajectory scores exactly zero.
    DeepSeaEnv left(depth, 999);
    left.reset();
    double left_ret = 0.0;
    while (!left.done()) {
        DeepSeaEnv probe = left;
        const auto tr = probe.step(0);
        const bool zero_moves_right = tr.reward < 0.0;
        left_ret += left.step(zero_moves_right ? 1 : 0).reward;
    }
    CHECK(left_ret == 0.0);

    CHECK_THROWS_AS(DeepSeaEnv(4, 1).step(3), std::out_of_range);
}

TEST_CASE("deepsea has exactly one rewarding action sequence") {
    for (int depth : {2, 4, 6, 8, 10}) {
        int winners = 0;
        const double optimal = 1.0 - 0.01;
        for (std::uint64_t bits = 0; bits < (1ull << depth); ++bits) {
            DeepSeaEnv env(depth, 31337 + depth);
            env.reset();
            double ret = 0.0;
            for (int h = 0; h < depth; ++h) ret += env.step((bits >> h) & 1ull).reward;
            if (std::fabs(ret - optimal) < 1e-12) ++winners;
        }
        CHECK(winners == 1);
    }
}

TEST_CASE("deepsea instances are reproducible from the seed") {
    auto rollout = [](std::uint64_t seed) {
        DeepSeaEnv env(5, seed);
        env.reset();
        std::vector<int> states;
        while (!env.done()) states.push_back(env.step(1).next_state);
        return states;
    };
    CHECK(rollout(123) == rollout(123));
}
