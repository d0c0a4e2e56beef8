#pragma once

// Machine-checkable property suite spanning every module: numeric oracles
// (quadrature / Monte Carlo), structural gate invariants, budget bounds, and
// harness determinism. Each property reports a measured value against its
// tolerance; the CLI `verify` subcommand exits nonzero if any fails.

#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "delight/agents.hpp"
#include "delight/core.hpp"
#include "delight/environments.hpp"
#include "delight/harness.hpp"
#include "delight/mdp.hpp"
#include "delight/posteriors.hpp"
#include "delight/quadrature.hpp"
#include "delight/reservoir.hpp"
#include "delight/rng.hpp"
#include "delight/special_math.hpp"
#include "delight/stats.hpp"

#include "json.hpp"

namespace delight {

// ---------------------------------------------------------------------------
// Independent oracles
// ---------------------------------------------------------------------------

inline double beta_pdf(double a, double b, double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    return std::exp(log_norm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
}

/// I_x(a,b) by direct quadrature of the Beta density.
inline double reg_inc_beta_oracle(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    // Integrate the smaller piece for accuracy.
    if (x <= 0.5)
        return tanh_sinh([&](double t) { return beta_pdf(a, b, t); }, 0.0, x, 1e-13);
    return 1.0 - tanh_sinh([&](double t) { return beta_pdf(a, b, t); }, x, 1.0, 1e-13);
}

/// E[(X-v)^+] for X ~ Beta(a,b) by quadrature of (x-v) against the density.
inline double beta_ei_oracle(double a, double b, double v) {
    if (v >= 1.0) return 0.0;
    const double lo = v > 0.0 ? v : 0.0;
    return tanh_sinh([&](double x) { return (x - v) * beta_pdf(a, b, x); }, lo, 1.0, 1e-13);
}

struct MonteCarloEstimate {
    double mean = 0.0;
    double stderr = 0.0;
};

/// E[(X - v)^+] for X ~ N(mu, sigma^2), by plain Monte Carlo.
inline MonteCarloEstimate gaussian_ei_mc(double mu, double sigma, double v, long samples,
                                         SplitMix64& rng) {
    double acc = 0.0, acc2 = 0.0;
    for (long i = 0; i < samples; ++i) {
        const double x = mu + sigma * rng.normal();
        const double g = x > v ? x - v : 0.0;
        acc += g;
        acc2 += g * g;
    }
    MonteCarloEstimate est;
    est.mean = acc / samples;
    const double var = acc2 / samples - est.mean * est.mean;
    est.stderr = std::sqrt((var > 0.0 ? var : 0.0) / samples);
    return est;
}

/// One-step knowledge gradient for arm `target` of an independent Beta-arm
/// instance: simulate one pull, recompute the best posterior mean.
inline MonteCarloEstimate knowledge_gradient_mc(const std::vector<BetaPosterior>& arms,
                                                std::size_t target, long sims,
                                                SplitMix64& rng) {
    std::vector<double> means(arms.size());
    for (std::size_t i = 0; i < arms.size(); ++i) means[i] = beta_mean(arms[i]);
    const double v = means[argmax_lowest(means)];
    double best_other = 0.0;
    for (std::size_t i = 0; i < arms.size(); ++i)
        if (i != target && means[i] > best_other) best_other = means[i];

    const double p = means[target];
    double acc = 0.0, acc2 = 0.0;
    for (long i = 0; i < sims; ++i) {
        const bool success = rng.bernoulli(p);  // posterior-predictive pull
        const BetaPosterior updated = beta_update(arms[target], success);
        const double new_best = std::max(best_other, beta_mean(updated));
        const double g = new_best > v ? new_best - v : 0.0;
        acc += g;
        acc2 += g * g;
    }
    MonteCarloEstimate est;
    est.mean = acc / sims;
    const double var = acc2 / sims - est.mean * est.mean;
    est.stderr = std::sqrt((var > 0.0 ? var : 0.0) / sims);
    return est;
}

// ---------------------------------------------------------------------------
// Verification report
// ---------------------------------------------------------------------------

struct PropertyResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyReport {
    std::vector<PropertyResult> results;

    bool all_pass() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return true;
    }
};

inline nlohmann::json verify_to_json(const VerifyReport& report) {
    nlohmann::json j;
    j["all_pass"] = report.all_pass();
    j["properties"] = nlohmann::json::array();
    for (const auto& r : report.results) {
        j["properties"].push_back({{"name", r.name},
                                   {"pass", r.pass},
                                   {"measured", r.measured},
                                   {"tolerance", r.tolerance},
                                   {"detail", r.detail}});
    }
    return j;
}

namespace detail {

inline void add(VerifyReport& rep, std::string name, bool pass, double measured, double tolerance,
                std::string detail = "") {
    rep.results.push_back({std::move(name), pass, measured, tolerance, std::move(detail)});
}

// Largest |I_x(a,b) + I_{1-x}(b,a) - 1| over random inputs.
inline void check_special_math(VerifyReport& rep, SplitMix64& rng) {
    double worst_reflect = 0.0;
    double worst_oracle = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double a = rng.uniform(0.5, 20.0);
        const double b = rng.uniform(0.5, 20.0);
        const double x = rng.next_double();
        worst_reflect = std::max(
            worst_reflect, std::fabs(reg_inc_beta(a, b, x) + reg_inc_beta(b, a, 1.0 - x) - 1.0));
        worst_oracle =
            std::max(worst_oracle, std::fabs(reg_inc_beta(a, b, x) - reg_inc_beta_oracle(a, b, x)));
    }
    add(rep, "special_math/reg_inc_beta_reflection", worst_reflect <= 1e-10, worst_reflect, 1e-10);
    add(rep, "special_math/reg_inc_beta_vs_quadrature", worst_oracle <= 1e-8, worst_oracle, 1e-8);

    bool monotone = true;
    for (int trial = 0; trial < 50 && monotone; ++trial) {
        const double a = rng.uniform(0.5, 20.0);
        const double b = rng.uniform(0.5, 20.0);
        double prev = 0.0;
        for (int k = 0; k <= 100; ++k) {
            const double x = k / 100.0;
            const double v = reg_inc_beta(a, b, x);
            if (v + 1e-14 < prev) monotone = false;
            prev = v;
        }
        if (reg_inc_beta(a, b, 0.0) != 0.0 || reg_inc_beta(a, b, 1.0) != 1.0) monotone = false;
    }
    add(rep, "special_math/reg_inc_beta_monotone_endpoints", monotone, monotone ? 0.0 : 1.0, 0.0);

    double worst_phi = 0.0;
    bool phi_monotone = true;
    double prev = -1.0;
    for (int k = -600; k <= 600; ++k) {
        const double z = k / 100.0;
        worst_phi = std::max(worst_phi, std::fabs(std_normal_cdf(z) + std_normal_cdf(-z) - 1.0));
        const double c = std_normal_cdf(z);
        if (c < prev) phi_monotone = false;
        prev = c;
    }
    add(rep, "special_math/normal_cdf_reflection", worst_phi <= 1e-10 && phi_monotone, worst_phi,
        1e-10);

    double worst_quad = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double z = rng.uniform(0.0, 4.0);
        const double by_quad =
            0.5 + adaptive_simpson([](double t) { return std_normal_pdf(t); }, 0.0, z, 1e-12);
        worst_quad = std::max(worst_quad, std::fabs(std_normal_cdf(z) - by_quad));
    }
    add(rep, "special_math/normal_cdf_vs_quadrature", worst_quad <= 1e-10, worst_quad, 1e-10);
}

inline void check_posteriors(VerifyReport& rep, SplitMix64& rng) {
    double worst_ei = 0.0;
    double worst_bound = 0.0;
    for (int i = 0; i < 1000; ++i) {
        BetaPosterior post{rng.uniform(1.0, 200.0), rng.uniform(1.0, 200.0)};
        const double v = rng.next_double();
        const double ei = beta_ei(post, v);
        worst_ei = std::max(worst_ei, std::fabs(ei - beta_ei_oracle(post.alpha, post.beta, v)));
        const double m = beta_mean(post);
        if (v > m) {
            const double second_moment = beta_variance(post) / (v - m);
            worst_bound = std::max(worst_bound, ei - second_moment);
        }
    }
    add(rep, "posteriors/beta_ei_vs_quadrature", worst_ei <= 1e-6, worst_ei, 1e-6);
    add(rep, "posteriors/beta_ei_second_moment_bound", worst_bound <= 1e-10, worst_bound, 1e-10);

    bool gaussian_ok = true;
    double worst_gap = 0.0;
    for (int i = 0; i < 500; ++i) {
        const double s = rng.uniform(0.0, 3.0);
        const double mu = rng.uniform(-2.0, 2.0);
        const double v = rng.uniform(mu, mu + 4.0);  // mu <= v
        const double ei = gaussian_ei(mu, s, v);
        if (ei < 0.0) gaussian_ok = false;
        worst_gap = std::max(worst_gap, ei - s);
        // Nonincreasing in the baseline.
        if (gaussian_ei(mu, s, v + 0.1) > ei + 1e-12) gaussian_ok = false;
    }
    add(rep, "posteriors/gaussian_ei_bounded_by_sd", gaussian_ok && worst_gap <= 1e-12, worst_gap,
        1e-12);

    bool beta_monotone = true;
    for (int i = 0; i < 200 && beta_monotone; ++i) {
        BetaPosterior post{rng.uniform(1.0, 50.0), rng.uniform(1.0, 50.0)};
        double prev = beta_ei(post, 0.0);
        for (int k = 1; k <= 20; ++k) {
            const double cur = beta_ei(post, k / 20.0);
            if (cur > prev + 1e-12 || cur < 0.0) beta_monotone = false;
            prev = cur;
        }
    }
    add(rep, "posteriors/beta_ei_nonincreasing_in_baseline", beta_monotone,
        beta_monotone ? 0.0 : 1.0, 0.0);

    // One-step knowledge gradient never exceeds expected improvement.
    int kg_failures = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<BetaPosterior> arms(3);
        for (auto& armp : arms) {
            const double n = std::floor(rng.uniform(0.0, 30.0));
            const double s = std::floor(rng.uniform(0.0, n + 1.0));
            armp = BetaPosterior{1.0 + s, 1.0 + n - s};
        }
        const std::size_t target = static_cast<std::size_t>(rng.uniform(0.0, 3.0)) % 3;
        std::vector<double> means(3);
        for (int k = 0; k < 3; ++k) means[k] = beta_mean(arms[k]);
        const double v = means[argmax_lowest(means)];
        const auto kg = knowledge_gradient_mc(arms, target, 2000, rng);
        if (kg.mean > beta_ei(arms[target], v) + 3.0 * kg.stderr) ++kg_failures;
    }
    add(rep, "posteriors/knowledge_gradient_below_ei", kg_failures == 0,
        static_cast<double>(kg_failures), 0.0, "failures out of 1000 random instances");

    // Covariance symmetry and positive definiteness across many updates.
    LinearGaussianPosterior lin(8, 1.0, 1.0);
    std::vector<double> x(8);
    for (int i = 0; i < 500; ++i) {
        for (auto& xi : x) xi = rng.normal() / std::sqrt(8.0);
        lin.update(x, rng.normal());
    }
    double asym = 0.0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            asym = std::max(asym, std::fabs(lin.covariance()[i * 8 + j] -
                                            lin.covariance()[j * 8 + i]));
    double min_pivot = 1.0;
    for (double p : lin.cholesky_pivots()) min_pivot = std::min(min_pivot, p);
    add(rep, "posteriors/linear_update_symmetry", asym <= 1e-10, asym, 1e-10);
    add(rep, "posteriors/linear_update_positive_definite", min_pivot > 0.0, min_pivot, 0.0,
        "smallest Cholesky pivot");
}

inline void check_delight_core(VerifyReport& rep, SplitMix64& rng) {
    // Acting identity: empirical mixture over 1e6 draws, chi-square with
    // K-1 = 2 dof; critical value at the 1e-4 level is -2 ln(1e-4).
    {
        const std::vector<double> host = {0.6, 0.3, 0.1};
        const std::vector<double> override_dist = {0.1, 0.2, 0.7};
        const double eps = 0.35;
        const long n = 1000000;
        std::vector<long> counts(3, 0);
        for (long i = 0; i < n; ++i) ++counts[act(host, override_dist, eps, rng).action];
        double chi2 = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double expected = n * ((1.0 - eps) * host[k] + eps * override_dist[k]);
            chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
        }
        const double critical = -2.0 * std::log(1e-4);
        add(rep, "delight/acting_identity_chi_square", chi2 <= critical, chi2, critical);
    }

    // Gate-empty fallback returns the host distribution bitwise.
    {
        bool exact = true;
        for (int i = 0; i < 200 && exact; ++i) {
            const int k = 2 + static_cast<int>(rng.uniform(0.0, 6.0));
            std::vector<double> scores(k);
            for (auto& sc : scores) sc = rng.next_double();
            const auto host = boltzmann_policy(scores, 0.3);
            std::vector<double> ei(k, 0.0);  // zero improvement: gate empty
            const auto decision = make_gate_decision(ei, host, 0.5, 0.1, 10.0);
            if (!decision.gate_empty()) exact = false;
            for (int a = 0; a < k; ++a)
                if (decision.override_dist[a] != host[a]) exact = false;
        }
        add(rep, "delight/gate_empty_returns_host", exact, exact ? 0.0 : 1.0, 0.0);
    }

    // Gated floor: every gated action satisfies ei * cap >= price.
    {
        bool floor_ok = true;
        bool surp_ok = true;
        for (int i = 0; i < 500 && floor_ok; ++i) {
            const int k = 2 + static_cast<int>(rng.uniform(0.0, 8.0));
            std::vector<double> scores(k), ei(k);
            for (auto& sc : scores) sc = rng.next_double();
            for (auto& e : ei) e = rng.uniform(0.0, 0.3);
            const auto host = boltzmann_policy(scores, rng.uniform(0.05, 1.0));
            const auto surp = surprisal(host, 10.0);
            double min_s = 1e300;
            for (double s : surp) {
                if (s < 0.0 || s > 10.0) surp_ok = false;
                min_s = std::min(min_s, s);
            }
            if (min_s != 0.0) surp_ok = false;
            const auto g = gate(ei, surp, 0.1);
            for (std::size_t a : g.gated_set)
                if (!(ei[a] * 10.0 >= 0.1)) floor_ok = false;
        }
        add(rep, "delight/gated_floor", floor_ok, floor_ok ? 0.0 : 1.0, 0.0);
        add(rep, "delight/surprisal_bounds", surp_ok, surp_ok ? 0.0 : 1.0, 0.0);
    }

    // Fresh-arm shutoff is pointwise in the baseline.
    {
        const auto v_off = fresh_arm_threshold(0.1, 10.0);
        bool shutoff = v_off.has_value();
        const BetaPosterior fresh;
        for (int i = 0; i < 1000 && shutoff; ++i) {
            const double v = *v_off + (1.0 - *v_off) * (i + 1) / 1001.0;
            if (beta_ei(fresh, v) * 10.0 >= 0.1) shutoff = false;
        }
        add(rep, "delight/fresh_arm_shutoff_pointwise", shutoff, shutoff ? 0.0 : 1.0, 0.0,
            "v_off = 1 - sqrt(2*lambda/L)");
    }

    // Reservation index: closed forms and monotonicity.
    {
        auto uniform_tail = [](double z) {
            if (z <= 0.0) return 0.5 - z;
            if (z >= 1.0) return 0.0;
            return 0.5 * (1.0 - z) * (1.0 - z);
        };
        const double r1 = reservation_index(uniform_tail, 0.0, 1.0, 10.0, 0.1);
        const double r2 = reservation_index(uniform_tail, 0.0, 1.0, 5.0, 0.1);
        const double e1 = std::fabs(r1 - (1.0 - std::sqrt(0.02)));
        const double e2 = std::fabs(r2 - 0.8);
        bool monotone = true;
        double prev_lambda = reservation_index(uniform_tail, 0.0, 1.0, 10.0, 0.01);
        for (double lam : {0.05, 0.1, 0.2, 0.5, 1.0}) {
            const double cur = reservation_index(uniform_tail, 0.0, 1.0, 10.0, lam);
            if (cur > prev_lambda + 1e-9) monotone = false;
            prev_lambda = cur;
        }
        double prev_surp = reservation_index(uniform_tail, 0.0, 1.0, 0.5, 0.1);
        for (double sp : {1.0, 2.0, 5.0, 10.0, 50.0}) {
            const double cur = reservation_index(uniform_tail, 0.0, 1.0, sp, 0.1);
            if (cur + 1e-9 < prev_surp) monotone = false;
            prev_surp = cur;
        }
        add(rep, "delight/reservation_closed_forms", e1 <= 1e-8 && e2 <= 1e-8, std::max(e1, e2),
            1e-8);
        add(rep, "delight/reservation_monotonicity", monotone, monotone ? 0.0 : 1.0, 0.0);
    }
}

inline void check_agents(VerifyReport& rep) {
    // Linear budget: gated-override rounds within the information budget.
    {
        ExperimentSpec spec;
        spec.family = EnvFamily::linear;
        spec.agents = {"de"};
        spec.conditions = {Condition{20, 2, 1.0, 0}};
        spec.horizon = 300;
        spec.seeds = 20;
        spec.base_seed = 11;
        bool ok = true;
        double worst = 0.0;
        for (int s = 0; s < spec.seeds; ++s) {
            const RegretTrace tr = run_one(spec, "de", 0, s);
            ok = ok && tr.linear_budget_ok;
            worst = std::max(worst, static_cast<double>(tr.final_gated_overrides()));
        }
        add(rep, "agents/linear_selected_override_budget", ok, worst,
            linear_override_budget(2, 300, 1.0, 1.0, 0.1, 10.0),
            "max gated-override rounds vs 2*gamma_T bound");
    }

    // Post-separation gated-pull budget per arm (cold start, privileged means).
    {
        const std::vector<double> means = {0.9, 0.4, 0.55, 0.25, 0.7};
        const std::size_t best_arm = 0;
        bool ok = true;
        double worst_ratio = 0.0;
        for (int s = 0; s < 20 && ok; ++s) {
            const BernoulliEnv env = fixed_bernoulli_env(means);
            SplitMix64 env_rng = stream_for(21, "gap-budget", 0, s, StreamRole::environment);
            SplitMix64 agent_rng = stream_for(21, "gap-budget", 0, s, StreamRole::agent);
            BanditAgent agent = BanditAgent::de_bernoulli(5, DelightConfig{}, true);
            std::vector<bool> separated(5, false);
            std::vector<std::uint64_t> post_separation_overrides(5, 0);
            for (long t = 0; t < 3000; ++t) {
                const std::size_t a = agent.select(agent_rng);
                if (agent.last_was_gated_override() && separated[a])
                    ++post_separation_overrides[a];
                const StepOutcome out = step_bernoulli(env, a, env_rng);
                agent.update(a, out.reward);
                const auto post_means = agent.posterior_means();
                for (std::size_t arm = 0; arm < 5; ++arm) {
                    if (arm == best_arm || separated[arm]) continue;
                    const double gap = means[best_arm] - means[arm];
                    if (post_means[best_arm] - post_means[arm] >= 0.5 * gap)
                        separated[arm] = true;
                }
            }
            for (std::size_t arm = 0; arm < 5; ++arm) {
                if (arm == best_arm) continue;
                const double budget =
                    gap_override_budget(0.1, 10.0, means[best_arm] - means[arm]);
                worst_ratio =
                    std::max(worst_ratio, post_separation_overrides[arm] / budget);
                if (post_separation_overrides[arm] > budget) ok = false;
            }
        }
        add(rep, "agents/post_separation_gap_budget", ok, worst_ratio, 1.0,
            "worst instrumented count / ceil(L/(2*lambda*gap))");
    }

    // Thermostat contrast on a K = T+1 instance.
    {
        const long T = 200;
        const int K = static_cast<int>(T) + 1;
        bool ucb_ok = true, de_ok = true;
        for (int s = 0; s < 10; ++s) {
            SplitMix64 env_rng = stream_for(31, "thermostat", 0, s, StreamRole::environment);
            const BernoulliEnv env = sample_bernoulli_env(K, env_rng);
            SplitMix64 ucb_rng = stream_for(31, "thermostat-ucb", 0, s, StreamRole::agent);
            SplitMix64 env_rng_ucb = env_rng;
            RegretTrace ucb_tr =
                run_bandit_on(env, BanditAgent::ucb(K), T, env_rng_ucb, ucb_rng);
            if (ucb_tr.distinct_arms_played != static_cast<std::uint64_t>(T)) ucb_ok = false;
            SplitMix64 de_rng = stream_for(31, "thermostat-de", 0, s, StreamRole::agent);
            SplitMix64 env_rng_de = env_rng;
            RegretTrace de_tr = run_bandit_on(env, BanditAgent::de_bernoulli(K, DelightConfig{}),
                                              T, env_rng_de, de_rng);
            if (de_tr.fresh_overrides_above_shutoff != 0 || de_tr.shutoff_violations != 0)
                de_ok = false;
        }
        add(rep, "agents/thermostat_ucb_plays_T_fresh_arms", ucb_ok, ucb_ok ? 0.0 : 1.0, 0.0);
        add(rep, "agents/thermostat_de_no_fresh_override_above_shutoff", de_ok, de_ok ? 0.0 : 1.0,
            0.0);
    }

    // Determinism: identical seeds and configs give identical traces.
    {
        ExperimentSpec spec;
        spec.family = EnvFamily::bernoulli;
        spec.agents = {"de"};
        spec.conditions = {Condition{10, 0, 1.0, 0}};
        spec.horizon = 500;
        spec.seeds = 1;
        spec.base_seed = 41;
        const RegretTrace a = run_one(spec, "de", 0, 0);
        const RegretTrace b = run_one(spec, "de", 0, 0);
        const bool same = a.cumulative == b.cumulative && a.gated_overrides == b.gated_overrides &&
                          a.fresh_selections == b.fresh_selections;
        add(rep, "agents/determinism", same, same ? 0.0 : 1.0, 0.0);
    }
}

inline void check_environments(VerifyReport& rep, SplitMix64& rng) {
    bool nonneg = true;
    {
        const BernoulliEnv env = sample_bernoulli_env(10, rng);
        for (int i = 0; i < 200; ++i) {
            const auto out =
                step_bernoulli(env, static_cast<std::size_t>(rng.uniform(0.0, 10.0)), rng);
            if (out.regret_increment < 0.0) nonneg = false;
        }
        const LinearEnv lin = sample_linear_env(20, 4, 1.0, rng);
        for (int i = 0; i < 200; ++i) {
            const auto out = step_linear(lin, static_cast<std::size_t>(rng.uniform(0.0, 20.0)), rng);
            if (out.regret_increment < 0.0) nonneg = false;
        }
    }
    add(rep, "environments/regret_increments_nonnegative", nonneg, nonneg ? 0.0 : 1.0, 0.0);

    // Exactly one of the 2^H raw action sequences reaches the treasure.
    {
        bool unique = true;
        for (int depth : {2, 5, 8, 12}) {
            int winners = 0;
            for (std::uint64_t bits = 0; bits < (1ull << depth); ++bits) {
                DeepSeaEnv env(depth, 7777 + depth);
                env.reset();
                double ret = 0.0;
                for (int h = 0; h < depth; ++h) ret += env.step((bits >> h) & 1ull).reward;
                const double optimal = deepsea_optimal_return(env);
                if (std::fabs(ret - optimal) < 1e-12) ++winners;
            }
            if (winners != 1) unique = false;
        }
        add(rep, "environments/deepsea_unique_treasure_path", unique, unique ? 0.0 : 1.0, 0.0,
            "enumerated depths 2, 5, 8, 12");
    }

    // Environment sampling is a pure function of (parameters, seed).
    {
        SplitMix64 r1(99), r2(99);
        const BernoulliEnv e1 = sample_bernoulli_env(50, r1);
        const BernoulliEnv e2 = sample_bernoulli_env(50, r2);
        add(rep, "environments/sampling_determinism", e1.means == e2.means,
            e1.means == e2.means ? 0.0 : 1.0, 0.0);
    }
}

inline void check_mdp(VerifyReport& rep, SplitMix64& rng) {
    // Backward-induction fixed point: replanning reproduces Q bitwise.
    {
        const int S = 6, A = 2, H = 5;
        PlanningModel model;
        model.num_states = S;
        model.num_actions = A;
        model.horizon = H;
        model.transitions.resize(static_cast<std::size_t>(S) * A * S);
        model.rewards.resize(static_cast<std::size_t>(S) * A);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                double total = 0.0;
                std::vector<double> row(S);
                for (int t = 0; t < S; ++t) {
                    row[t] = rng.next_double_open();
                    total += row[t];
                }
                for (int t = 0; t < S; ++t)
                    model.transitions[(static_cast<std::size_t>(s) * A + a) * S + t] =
                        row[t] / total;
                model.rewards[static_cast<std::size_t>(s) * A + a] = rng.uniform(-1.0, 1.0);
            }
        const QFunction q1 = plan(model);
        const QFunction q2 = plan(model);
        add(rep, "mdp/backward_induction_fixed_point", q1.values == q2.values,
            q1.values == q2.values ? 0.0 : 1.0, 0.0);
    }

    // Host-value identity and the stale-plan property along an episode.
    {
        DeepSeaEnv env(6, 2024);
        DeMdpAgent agent(env.num_states(), DeepSeaEnv::num_actions(), 6, -env.move_cost(),
                         env.treasure_reward(), DelightConfig{});
        agent.begin_episode();
        double worst = 0.0;
        for (int h = 0; h < 6; ++h)
            for (int s = 0; s < env.num_states(); ++s) {
                const auto host = agent.frozen_host_row(h, s);
                const auto q_row = agent.frozen_plan().row(h, s);
                double v = 0.0;
                for (int a = 0; a < 2; ++a) v += host[a] * q_row[a];
                worst = std::max(worst, std::fabs(v - agent.frozen_state_value(h, s)));
            }
        add(rep, "mdp/host_weighted_value_identity", worst <= 1e-12, worst, 1e-12);

        const std::vector<double> frozen_before(
            agent.frozen_plan().values.begin(), agent.frozen_plan().values.end());
        std::vector<double> vplan_before;
        for (int h = 0; h < 6; ++h)
            for (int s = 0; s < env.num_states(); ++s)
                vplan_before.push_back(agent.frozen_state_value(h, s));
        SplitMix64 ep_rng(5150);
        int s = env.reset();
        for (int h = 0; h < 6; ++h) {
            const int a = agent.select_action(s, h, ep_rng);
            const auto tr = env.step(a);
            agent.observe(s, a, tr.next_state, tr.reward);
            s = tr.next_state;
        }
        bool frozen_same =
            frozen_before == std::vector<double>(agent.frozen_plan().values.begin(),
                                                 agent.frozen_plan().values.end());
        std::size_t k = 0;
        for (int h = 0; h < 6 && frozen_same; ++h)
            for (int st = 0; st < env.num_states(); ++st)
                if (vplan_before[k++] != agent.frozen_state_value(h, st)) frozen_same = false;
        add(rep, "mdp/stale_plan_frozen_within_episode", frozen_same, frozen_same ? 0.0 : 1.0,
            0.0);
    }

    // Boltzmann commitment at tau = 0.01 on a 0.1 value gap.
    {
        const std::vector<double> q = {0.5, 0.4};
        const auto host = boltzmann_policy(q, 0.01);
        add(rep, "mdp/boltzmann_tail_mass", host[0] >= 1.0 - 1e-4, host[0], 1.0 - 1e-4);
    }
}

inline void check_reservoir(VerifyReport& rep) {
    // Unthrottled inspections are geometric with success probability p(y).
    {
        const TailPrior prior = uniform_prior();
        const double y = 0.5;
        const int seeds = 10000;
        std::vector<double> inspections(seeds);
        std::vector<double> regrets(seeds);
        for (int s = 0; s < seeds; ++s) {
            SplitMix64 rng = stream_for(61, "reservoir-geom", 0, s, StreamRole::environment);
            const auto run = reservation_policy_run(prior, y, 10000, std::nullopt, rng);
            inspections[s] = static_cast<double>(run.inspections);
            regrets[s] = run.regret;
        }
        const double expect = 1.0 / prior.tail(y);
        const double m = mean(inspections);
        const double se = standard_error(inspections);
        add(rep, "reservoir/geometric_inspections", std::fabs(m - expect) <= 3.0 * se,
            std::fabs(m - expect), 3.0 * se, "mean inspections vs 1/p(y)");
        const double bound = 1.0 / prior.tail(y) + 10000.0 * y;
        const double mr = mean(regrets);
        const double mse = standard_error(regrets);
        add(rep, "reservoir/threshold_regret_bound", mr <= bound + 3.0 * mse, mr, bound,
            "mean regret vs 1/p(y) + T*y");
    }

    // Horizon pricing: closed form, monotone in y, linear in the cap.
    {
        const TailPrior prior = uniform_prior();
        double worst = 0.0;
        bool monotone = true;
        double prev = -1.0;
        for (int k = 1; k <= 10; ++k) {
            const double y = k / 10.0;
            const double price = horizon_price(prior, y, 10.0);
            worst = std::max(worst, std::fabs(price - 10.0 * y * y / 2.0));
            if (price < prev) monotone = false;
            prev = price;
            if (std::fabs(horizon_price(prior, y, 20.0) - 2.0 * price) > 1e-9) monotone = false;
        }
        add(rep, "reservoir/horizon_price_closed_form", worst <= 1e-9 && monotone, worst, 1e-9);
    }

    // Internal consistency: the reservation index at the horizon price
    // recovers the threshold 1 - y.
    {
        auto uniform_tail = [](double z) {
            if (z <= 0.0) return 0.5 - z;
            if (z >= 1.0) return 0.0;
            return 0.5 * (1.0 - z) * (1.0 - z);
        };
        double worst = 0.0;
        for (double y : {0.1, 0.2, 0.4, 0.7}) {
            const double lam = horizon_price(uniform_prior(), y, 10.0);
            const double z = reservation_index(uniform_tail, 0.0, 1.0, 10.0, lam);
            worst = std::max(worst, std::fabs(z - (1.0 - y)));
        }
        add(rep, "reservoir/price_threshold_correspondence", worst <= 1e-8, worst, 1e-8);
    }
}

inline void check_harness(VerifyReport& rep) {
    ExperimentSpec spec;
    spec.family = EnvFamily::bernoulli;
    spec.agents = {"de", "thompson"};
    spec.conditions = {Condition{10, 0, 1.0, 0}};
    spec.horizon = 300;
    spec.seeds = 5;
    spec.base_seed = 71;
    const SweepOutput a = run_sweep(spec);
    const SweepOutput b = run_sweep(spec);

    bool deterministic = a.summary.rows.size() == b.summary.rows.size();
    for (std::size_t i = 0; deterministic && i < a.summary.rows.size(); ++i)
        deterministic = a.summary.rows[i].mean_regret == b.summary.rows[i].mean_regret &&
                        a.summary.rows[i].stderr_regret == b.summary.rows[i].stderr_regret;
    add(rep, "harness/bit_determinism", deterministic, deterministic ? 0.0 : 1.0, 0.0);

    bool monotone = true;
    for (const RegretTrace& tr : a.traces)
        for (std::size_t t = 1; t < tr.cumulative.size(); ++t)
            if (tr.cumulative[t] + 1e-15 < tr.cumulative[t - 1]) monotone = false;
    add(rep, "harness/trace_monotonicity", monotone, monotone ? 0.0 : 1.0, 0.0);

    // Aggregation recomputed from the serialized CSV matches the summary.
    {
        std::ostringstream csv;
        write_raw_csv(csv, spec, a.traces);
        std::istringstream in(csv.str());
        const auto rows = read_raw_csv(in);
        double worst = 0.0;
        const auto checkpoints = checkpoint_rounds(spec.horizon);
        for (const ConditionSummary& row : a.summary.rows) {
            for (std::size_t c = 0; c < checkpoints.size(); ++c) {
                std::vector<double> values;
                for (const RawCsvRow& r : rows)
                    if (r.agent == row.agent && r.t == checkpoints[c]) {
                        values.push_back(r.cumulative_regret);
                    }
                worst = std::max(worst, std::fabs(mean(values) - row.mean_regret[c]));
                worst =
                    std::max(worst, std::fabs(standard_error(values) - row.stderr_regret[c]));
            }
        }
        add(rep, "harness/aggregation_matches_raw_csv", worst <= 1e-12, worst, 1e-12);
    }
}

}  // namespace detail

/// Runs the full property and oracle suite; see the individual checks above.
inline VerifyReport run_verification(std::uint64_t base_seed = 1) {
    VerifyReport rep;
    SplitMix64 rng(mix64(base_seed ^ 0x5EC0FDA7A11C4EEDull));
    detail::check_special_math(rep, rng);
    detail::check_posteriors(rep, rng);
    detail::check_delight_core(rep, rng);
    detail::check_agents(rep);
    detail::check_environments(rep, rng);
    detail::check_mdp(rep, rng);
    detail::check_reservoir(rep);
    detail::check_harness(rep);
    return rep;
}

}  // namespace delight
