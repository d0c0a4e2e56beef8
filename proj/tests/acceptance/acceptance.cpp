// Acceptance suite: runs each criterion end to end at its stated tolerance
// and prints one [PASS]/[FAIL] line per criterion. Usage:
//
//   acceptance            run all criteria
//   acceptance 3 5        run criteria 3 and 5
//
// Exit code: number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "delight/delight.hpp"

using namespace delight;

namespace {

struct CriterionResult {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

const ConditionSummary& row_for(const SweepSummary& summary, const std::string& agent,
                                int condition_index) {
    for (const auto& row : summary.rows)
        if (row.agent == agent && row.condition_index == condition_index) return row;
    throw std::logic_error("missing summary row for " + agent);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// --- 1. Small-world parity: DE within 1.5x of Thompson at K=10. -----------
CriterionResult criterion_small_world_parity() {
    ExperimentSpec spec;
    spec.family = EnvFamily::bernoulli;
    spec.agents = {"de", "thompson"};
    spec.conditions = {Condition{10, 0, 1.0, 0}};
    spec.horizon = 1000;
    spec.seeds = 100;
    spec.base_seed = 1;
    const SweepOutput out = run_sweep(spec);
    const double de = row_for(out.summary, "de", 0).final_mean;
    const double ts = row_for(out.summary, "thompson", 0).final_mean;
    CriterionResult r;
    r.require(de <= 1.5 * ts, "DE mean regret exceeds 1.5x Thompson");
    r.note("DE " + fmt(de) + " vs TS " + fmt(ts) + " (ratio " + fmt(de / ts) + ", limit 1.5)");
    return r;
}

// --- 2. Large-world scaling at K in {10, 100, 1000}. ----------------------
CriterionResult criterion_large_world_scaling() {
    ExperimentSpec spec;
    spec.family = EnvFamily::bernoulli;
    spec.agents = {"de", "thompson", "eps-greedy"};
    spec.conditions = {Condition{10, 0, 1.0, 0}, Condition{100, 0, 1.0, 0},
                       Condition{1000, 0, 1.0, 0}};
    spec.horizon = 1000;
    spec.seeds = 50;
    spec.base_seed = 1;
    const SweepOutput out = run_sweep(spec);
    const auto& de_100 = row_for(out.summary, "de", 1);
    const auto& de_1000 = row_for(out.summary, "de", 2);
    const auto& ts_1000 = row_for(out.summary, "thompson", 2);
    const auto& eg_1000 = row_for(out.summary, "eps-greedy", 2);

    CriterionResult r;
    r.require(de_1000.final_mean + de_1000.final_stderr <
                  ts_1000.final_mean - ts_1000.final_stderr,
              "DE vs Thompson intervals overlap at K=1000");
    r.require(de_1000.final_mean + de_1000.final_stderr <
                  eg_1000.final_mean - eg_1000.final_stderr,
              "DE vs eps-greedy intervals overlap at K=1000");
    r.require(de_1000.final_mean <= 2.0 * de_100.final_mean,
              "DE regret more than doubles from K=100 to K=1000");
    r.note("K=1000: DE " + fmt(de_1000.final_mean) + "+-" + fmt(de_1000.final_stderr) + ", TS " +
           fmt(ts_1000.final_mean) + "+-" + fmt(ts_1000.final_stderr) + ", EG " +
           fmt(eg_1000.final_mean) + "+-" + fmt(eg_1000.final_stderr) + "; DE K=100 " +
           fmt(de_100.final_mean));
    return r;
}

// --- 3. Linear transfer with unchanged hyperparameters. -------------------
CriterionResult criterion_linear_transfer() {
    ExperimentSpec spec;
    spec.family = EnvFamily::linear;
    spec.agents = {"de", "thompson", "eps-greedy"};
    spec.conditions = {Condition{100, 30, 1.0, 0}};
    spec.horizon = 1000;
    spec.seeds = 50;
    spec.base_seed = 1;
    const SweepOutput out = run_sweep(spec);
    const auto& de = row_for(out.summary, "de", 0);
    const auto& ts = row_for(out.summary, "thompson", 0);
    const auto& eg = row_for(out.summary, "eps-greedy", 0);
    CriterionResult r;
    r.require(de.final_mean + de.final_stderr < ts.final_mean - ts.final_stderr,
              "DE vs Thompson intervals overlap");
    r.require(de.final_mean + de.final_stderr < eg.final_mean - eg.final_stderr,
              "DE vs eps-greedy intervals overlap");
    r.note("DE " + fmt(de.final_mean) + "+-" + fmt(de.final_stderr) + ", TS " +
           fmt(ts.final_mean) + "+-" + fmt(ts.final_stderr) + ", EG " + fmt(eg.final_mean) +
           "+-" + fmt(eg.final_stderr));
    return r;
}

// --- 4. DeepSea: DE within 1.2x of PSRL and below 0.3x eps-greedy. --------
CriterionResult criterion_deepsea() {
    ExperimentSpec spec;
    spec.family = EnvFamily::deepsea;
    spec.agents = {"de", "psrl", "eps-greedy"};
    spec.conditions = {Condition{0, 0, 1.0, 10}};
    spec.horizon = 1000;
    spec.seeds = 30;
    spec.base_seed = 1;
    spec.de.host_mode = HostMode::boltzmann;
    const SweepOutput out = run_sweep(spec);
    const double de = row_for(out.summary, "de", 0).final_mean;
    const double psrl = row_for(out.summary, "psrl", 0).final_mean;
    const double eg = row_for(out.summary, "eps-greedy", 0).final_mean;
    CriterionResult r;
    r.require(de <= 1.2 * psrl, "DE regret exceeds 1.2x PSRL");
    r.require(de <= 0.3 * eg, "DE regret exceeds 0.3x eps-greedy");
    r.note("DE " + fmt(de) + ", PSRL " + fmt(psrl) + " (ratio " + fmt(de / psrl) +
           ", limit 1.2), EG " + fmt(eg) + " (ratio " + fmt(de / eg) + ", limit 0.3)");
    return r;
}

// --- 5. Reservoir prior-tail rates. ----------------------------------------
CriterionResult criterion_tail_rates() {
    const std::vector<long> horizons = {1000, 10000, 100000, 1000000};
    CriterionResult r;
    const auto uniform_fit =
        tail_rate_experiment(uniform_prior(), horizons, 200, std::nullopt, 1);
    r.require(uniform_fit.fit.slope >= 0.4 && uniform_fit.fit.slope <= 0.6,
              "uniform-prior slope outside [0.4, 0.6]");
    const auto poly_fit =
        tail_rate_experiment(polynomial_tail_prior(2.0), horizons, 200, std::nullopt, 2);
    r.require(poly_fit.fit.slope >= 0.57 && poly_fit.fit.slope <= 0.77,
              "alpha=2 slope outside [0.57, 0.77]");
    r.note("uniform slope " + fmt(uniform_fit.fit.slope) + " in [0.4,0.6]; alpha=2 slope " +
           fmt(poly_fit.fit.slope) + " in [0.57,0.77]");
    return r;
}

// --- 6. Exact structural invariants. ----------------------------------------
CriterionResult criterion_structural_invariants() {
    CriterionResult r;

    // Fresh-arm shutoff, gate-empty fallback, and gated floor across every
    // round of Bernoulli DE runs at small and large K.
    {
        ExperimentSpec spec;
        spec.family = EnvFamily::bernoulli;
        spec.agents = {"de"};
        spec.conditions = {Condition{10, 0, 1.0, 0}, Condition{1000, 0, 1.0, 0}};
        spec.horizon = 1000;
        spec.seeds = 30;
        spec.base_seed = 1;
        const SweepOutput out = run_sweep(spec);
        std::uint64_t shutoff = 0, empties = 0, floors = 0;
        for (const auto& tr : out.traces) {
            shutoff += tr.shutoff_violations;
            empties += tr.gate_empty_mismatches;
            floors += tr.floor_violations;
        }
        r.require(shutoff == 0, "fresh-arm shutoff violated");
        r.require(empties == 0, "gate-empty acting distribution differed from host");
        r.require(floors == 0, "gated-override selection below the EI floor");
    }

    // Linear selected-override budget on every run.
    {
        ExperimentSpec spec;
        spec.family = EnvFamily::linear;
        spec.agents = {"de"};
        spec.conditions = {Condition{100, 30, 1.0, 0}};
        spec.horizon = 1000;
        spec.seeds = 20;
        spec.base_seed = 1;
        const SweepOutput out = run_sweep(spec);
        bool all_ok = true;
        double max_count = 0.0, bound = 0.0;
        for (const auto& tr : out.traces) {
            all_ok = all_ok && tr.linear_budget_ok;
            max_count = std::max(max_count, static_cast<double>(tr.final_gated_overrides()));
            bound = tr.linear_budget_bound;
        }
        r.require(all_ok, "linear gated-override count exceeded 2*gamma_T budget");
        r.note("linear budget: max count " + fmt(max_count) + " vs bound " + fmt(bound));
    }

    // Post-separation gated-pull budget with the cold-start flag on,
    // instrumented with simulator-privileged true means.
    {
        const std::vector<double> means = {0.9, 0.4, 0.55, 0.25, 0.7};
        const std::size_t best_arm = 0;
        bool ok = true;
        for (int s = 0; s < 30 && ok; ++s) {
            const BernoulliEnv env = fixed_bernoulli_env(means);
            SplitMix64 env_rng = stream_for(6, "gap-budget", 0, s, StreamRole::environment);
            SplitMix64 agent_rng = stream_for(6, "gap-budget", 0, s, StreamRole::agent);
            BanditAgent agent = BanditAgent::de_bernoulli(5, DelightConfig{}, true);
            std::vector<bool> separated(5, false);
            std::vector<std::uint64_t> counts(5, 0);
            for (long t = 0; t < 3000; ++t) {
                const std::size_t a = agent.select(agent_rng);
                if (agent.last_was_gated_override() && separated[a]) ++counts[a];
                agent.update(a, step_bernoulli(env, a, env_rng).reward);
                const auto post_means = agent.posterior_means();
                for (std::size_t arm = 0; arm < 5; ++arm)
                    if (arm != best_arm && !separated[arm] &&
                        post_means[best_arm] - post_means[arm] >=
                            0.5 * (means[best_arm] - means[arm]))
                        separated[arm] = true;
            }
            for (std::size_t arm = 0; arm < 5; ++arm)
                if (arm != best_arm &&
                    counts[arm] > gap_override_budget(0.1, 10.0, means[best_arm] - means[arm]))
                    ok = false;
        }
        r.require(ok, "post-separation selected-pull budget exceeded");
    }

    // Thermostat contrast on K = T + 1.
    {
        const long T = 200;
        const int K = static_cast<int>(T) + 1;
        bool ucb_ok = true, de_ok = true;
        for (int s = 0; s < 10; ++s) {
            SplitMix64 env_seed = stream_for(7, "thermostat", 0, s, StreamRole::environment);
            const BernoulliEnv env = sample_bernoulli_env(K, env_seed);
            SplitMix64 env_a = env_seed, env_b = env_seed;
            SplitMix64 ucb_rng = stream_for(7, "thermostat-ucb", 0, s, StreamRole::agent);
            SplitMix64 de_rng = stream_for(7, "thermostat-de", 0, s, StreamRole::agent);
            const RegretTrace ucb_tr =
                run_bandit_on(env, BanditAgent::ucb(K), T, env_a, ucb_rng);
            const RegretTrace de_tr = run_bandit_on(
                env, BanditAgent::de_bernoulli(K, DelightConfig{}), T, env_b, de_rng);
            if (ucb_tr.distinct_arms_played != static_cast<std::uint64_t>(T)) ucb_ok = false;
            if (de_tr.fresh_overrides_above_shutoff != 0 || de_tr.shutoff_violations != 0)
                de_ok = false;
        }
        r.require(ucb_ok, "UCB did not play T distinct fresh arms at K = T+1");
        r.require(de_ok, "DE selected a fresh override arm above the shutoff baseline");
    }

    if (r.pass) r.note("all structural invariants held exactly");
    return r;
}

// --- 7. Numerical oracles. ---------------------------------------------------
CriterionResult criterion_numerical_oracles() {
    CriterionResult r;
    SplitMix64 rng(0xACCE97);

    double worst_ei = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const BetaPosterior post{rng.uniform(1.0, 200.0), rng.uniform(1.0, 200.0)};
        const double v = rng.next_double();
        worst_ei = std::max(
            worst_ei, std::fabs(beta_ei(post, v) - beta_ei_oracle(post.alpha, post.beta, v)));
    }
    r.require(worst_ei <= 1e-6, "beta_ei deviates from quadrature by " + fmt(worst_ei));

    const auto mc = gaussian_ei_mc(0.0, 0.5, 1.0, 10000000, rng);
    const double gauss_err = std::fabs(gaussian_ei(0.0, 0.5, 1.0) - mc.mean);
    r.require(gauss_err <= 3.0 * mc.stderr,
              "gaussian_ei outside 3 s.e. of the Monte Carlo oracle");

    double worst_reflect = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double a = rng.uniform(0.5, 20.0);
        const double b = rng.uniform(0.5, 20.0);
        const double x = rng.next_double();
        worst_reflect = std::max(
            worst_reflect, std::fabs(reg_inc_beta(a, b, x) + reg_inc_beta(b, a, 1.0 - x) - 1.0));
    }
    r.require(worst_reflect <= 1e-10, "incomplete beta reflection identity broke");

    int kg_failures = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<BetaPosterior> arms(3);
        for (auto& a : arms) {
            const double n = std::floor(rng.uniform(0.0, 30.0));
            const double s = std::floor(rng.uniform(0.0, n + 1.0));
            a = BetaPosterior{1.0 + s, 1.0 + n - s};
        }
        std::vector<double> means(3);
        for (int k = 0; k < 3; ++k) means[k] = beta_mean(arms[k]);
        const double v = means[argmax_lowest(means)];
        const std::size_t target = i % 3;
        const auto kg = knowledge_gradient_mc(arms, target, 2000, rng);
        if (kg.mean > beta_ei(arms[target], v) + 3.0 * kg.stderr) ++kg_failures;
    }
    r.require(kg_failures == 0,
              "knowledge gradient exceeded EI in " + std::to_string(kg_failures) + " instances");

    r.note("beta_ei err " + fmt(worst_ei) + " (tol 1e-6); gaussian err " + fmt(gauss_err) +
           " (3se " + fmt(3.0 * mc.stderr) + "); reflection err " + fmt(worst_reflect) +
           " (tol 1e-10); KG failures " + std::to_string(kg_failures));
    return r;
}

// --- 8. Necessity demos. ------------------------------------------------------
CriterionResult criterion_necessity() {
    const NecessityReport report = necessity_demos(1, 10000, 20);
    CriterionResult r;
    for (const auto& demo : report.demos) {
        r.require(demo.pass, demo.name + " failed (" + demo.detail + ")");
        r.note(demo.name + ": slope " + fmt(demo.tail_slope) +
               (demo.floor > 0.0 ? " floor " + fmt(demo.floor) : ""));
    }
    return r;
}

struct Criterion {
    int number;
    const char* name;
    CriterionResult (*run)();
};

const Criterion kCriteria[] = {
    {1, "small-world parity (K=10 DE within 1.5x Thompson)", criterion_small_world_parity},
    {2, "large-world scaling (K up to 1000)", criterion_large_world_scaling},
    {3, "linear transfer without retuning", criterion_linear_transfer},
    {4, "deepsea (H=10, 1000 episodes)", criterion_deepsea},
    {5, "reservoir prior-tail rates", criterion_tail_rates},
    {6, "exact structural invariants", criterion_structural_invariants},
    {7, "numerical oracles", criterion_numerical_oracles},
    {8, "necessity demos", criterion_necessity},
};

}  // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const Criterion& criterion : kCriteria) {
        if (!selected.empty() && !selected.count(criterion.number)) continue;
        const auto start = std::chrono::steady_clock::now();
        CriterionResult result;
        try {
            result = criterion.run();
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %d: %s (%.1fs) — %s\n", result.pass ? "PASS" : "FAIL",
                    criterion.number, criterion.name, seconds, result.detail.c_str());
        std::fflush(stdout);
        if (!result.pass) ++failures;
    }
    return failures;
}
