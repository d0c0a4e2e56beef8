// Command-line benchmark harness for delight-gated exploration.
//
// Subcommands: run-bandit, run-linear, run-deepsea, run-reservoir, sweep,
// necessity, verify. Flags override config-file keys (one section per
// subcommand). Exit codes: 0 success, 1 config error, 2 verification failure.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "delight/delight.hpp"

namespace {

using delight::Condition;
using delight::EnvFamily;
using delight::ExperimentSpec;
using delight::HostMode;

struct DeFlags {
    double lambda = 0.1;
    double cap = 10.0;
    double half_life = 100.0;
    std::string host = "greedy";
    double tau = 0.01;

    void attach(CLI::App* cmd) {
        cmd->add_option("--lambda", lambda, "Gate price")->capture_default_str();
        cmd->add_option("--cap", cap, "Surprisal cap L (nats)")->capture_default_str();
        cmd->add_option("--half-life", half_life, "Override annealing half-life M")
            ->capture_default_str();
        cmd->add_option("--host", host, "Host mode: greedy or boltzmann")
            ->check(CLI::IsMember({"greedy", "boltzmann"}))
            ->capture_default_str();
        cmd->add_option("--tau", tau, "Boltzmann host temperature")->capture_default_str();
    }

    delight::DelightConfig to_config() const {
        delight::DelightConfig cfg;
        cfg.gate_price = lambda;
        cfg.surprisal_cap = cap;
        cfg.half_life = half_life;
        cfg.host_mode = host == "boltzmann" ? HostMode::boltzmann : HostMode::greedy;
        cfg.host_temperature = tau;
        return cfg;
    }
};

void print_summary(const delight::SweepSummary& summary) {
    std::printf("%-12s %-6s %-6s %-8s %-6s %12s %12s %10s\n", "agent", "K", "d", "sigma", "H",
                "final_mean", "final_se", "overrides");
    for (const auto& row : summary.rows) {
        std::printf("%-12s %-6d %-6d %-8.3g %-6d %12.4f %12.4f %10.1f\n", row.agent.c_str(),
                    row.condition.num_arms, row.condition.dim, row.condition.sigma,
                    row.condition.depth, row.final_mean, row.final_stderr,
                    row.mean_gated_overrides);
        if (row.single_seed_warning)
            std::printf("  warning: single seed, standard errors reported as 0\n");
    }
    const auto violations = summary.total_structural_violations();
    if (violations > 0)
        std::printf("WARNING: %llu structural invariant violations recorded\n",
                    static_cast<unsigned long long>(violations));
}

int run_and_report(const ExperimentSpec& spec) {
    const delight::SweepOutput out = delight::run_sweep(spec);
    print_summary(out.summary);
    if (!out.raw_csv_path.empty())
        std::printf("wrote %s\nwrote %s\n", out.raw_csv_path.c_str(),
                    out.summary_json_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delight-gated exploration benchmark harness"};
    app.set_config("--config", "", "Config file (INI/TOML; one section per subcommand)");
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads,
                   "Worker threads (default: DELIGHT_THREADS env var, then hardware)");
    std::uint64_t base_seed = 1;
    app.add_option("--seed", base_seed, "Base seed for all derived streams")
        ->capture_default_str();
    std::string out_dir;
    app.add_option("--out", out_dir, "Output directory (required for file writes)");

    // --- run-bandit -------------------------------------------------------
    auto* bandit = app.add_subcommand("run-bandit", "Bernoulli bandit experiment");
    int bandit_arms = 10;
    long bandit_horizon = 1000;
    int bandit_seeds = 100;
    bool bandit_cold_start = false;
    std::vector<std::string> bandit_agents = {"de", "thompson", "eps-greedy"};
    DeFlags bandit_de;
    bandit->add_option("--arms,-K", bandit_arms, "Number of arms")->capture_default_str();
    bandit->add_option("--rounds,-T", bandit_horizon, "Rounds per run")->capture_default_str();
    bandit->add_option("--seeds", bandit_seeds, "Independent seeds")->capture_default_str();
    bandit->add_flag("--cold-start", bandit_cold_start, "Force one initial pull per arm");
    bandit->add_option("--agents", bandit_agents,
                       "Agents: de, thompson, eps-greedy, ucb, greedy, warm-host")
        ->delimiter(',')
        ->capture_default_str();
    bandit_de.attach(bandit);

    // --- run-linear -------------------------------------------------------
    auto* linear = app.add_subcommand("run-linear", "Linear Gaussian bandit experiment");
    int linear_arms = 100;
    int linear_dim = 30;
    double linear_sigma = 1.0;
    double linear_eta = 1.0;
    long linear_horizon = 1000;
    int linear_seeds = 100;
    std::vector<std::string> linear_agents = {"de", "thompson", "eps-greedy"};
    DeFlags linear_de;
    linear->add_option("--arms,-K", linear_arms, "Number of arms")->capture_default_str();
    linear->add_option("--dim,-d", linear_dim, "Feature dimension")->capture_default_str();
    linear->add_option("--sigma", linear_sigma, "Observation noise scale")->capture_default_str();
    linear->add_option("--eta", linear_eta, "Prior precision")->capture_default_str();
    linear->add_option("--rounds,-T", linear_horizon, "Rounds per run")->capture_default_str();
    linear->add_option("--seeds", linear_seeds, "Independent seeds")->capture_default_str();
    linear->add_option("--agents", linear_agents, "Agents: de, thompson, eps-greedy")
        ->delimiter(',')
        ->capture_default_str();
    linear_de.attach(linear);

    // --- run-deepsea ------------------------------------------------------
    auto* deepsea = app.add_subcommand("run-deepsea", "DeepSea tabular MDP experiment");
    int deepsea_depth = 10;
    long deepsea_episodes = 1000;
    int deepsea_seeds = 30;
    double deepsea_prior = 0.0;
    double deepsea_cost_scale = 0.01;
    std::vector<std::string> deepsea_agents = {"de", "psrl", "eps-greedy"};
    DeFlags deepsea_de;
    deepsea_de.host = "boltzmann";
    deepsea->add_option("--depth,-H", deepsea_depth, "Grid depth")->capture_default_str();
    deepsea->add_option("--episodes", deepsea_episodes, "Episodes per run")
        ->capture_default_str();
    deepsea->add_option("--seeds", deepsea_seeds, "Independent seeds")->capture_default_str();
    deepsea->add_option("--dirichlet-prior", deepsea_prior,
                        "Transition prior concentration per next state (0 = 1/S)")
        ->capture_default_str();
    deepsea->add_option("--move-cost-scale", deepsea_cost_scale,
                        "Rightward move cost = scale / depth")
        ->capture_default_str();
    deepsea->add_option("--agents", deepsea_agents, "Agents: de, psrl, eps-greedy")
        ->delimiter(',')
        ->capture_default_str();
    deepsea_de.attach(deepsea);

    // --- run-reservoir ----------------------------------------------------
    auto* reservoir = app.add_subcommand("run-reservoir",
                                         "Revealed-value reservoir tail-rate experiment");
    double reservoir_alpha = 1.0;
    std::vector<long> reservoir_horizons = {1000, 10000, 100000, 1000000};
    int reservoir_seeds = 200;
    double reservoir_override = -1.0;  // <= 0: unthrottled
    double reservoir_cap = 10.0;
    reservoir->add_option("--alpha", reservoir_alpha, "Prior tail exponent (1 = uniform)")
        ->capture_default_str();
    reservoir->add_option("--horizons", reservoir_horizons, "Horizons (need >= 2)")
        ->delimiter(',')
        ->capture_default_str();
    reservoir->add_option("--seeds", reservoir_seeds, "Seeds per horizon")
        ->capture_default_str();
    reservoir->add_option("--override-rate", reservoir_override,
                          "Constant override rate (<= 0 for unthrottled)");
    reservoir->add_option("--cap", reservoir_cap, "Surprisal cap used for horizon pricing")
        ->capture_default_str();

    // --- sweep --------------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "Parameter sweeps for any family");
    std::string sweep_family = "bandit";
    std::string sweep_param = "K";
    std::vector<double> sweep_values;
    long sweep_horizon = 1000;
    int sweep_seeds = 100;
    std::vector<std::string> sweep_agents = {"de", "thompson", "eps-greedy"};
    int sweep_arms = 100;
    int sweep_dim = 30;
    double sweep_sigma = 1.0;
    int sweep_depth = 10;
    DeFlags sweep_de;
    sweep->add_option("--family", sweep_family, "bandit, linear, or deepsea")
        ->check(CLI::IsMember({"bandit", "linear", "deepsea"}))
        ->capture_default_str();
    sweep->add_option("--param", sweep_param, "K, d, sigma, H, lambda, or half-life")
        ->check(CLI::IsMember({"K", "d", "sigma", "H", "lambda", "half-life"}))
        ->capture_default_str();
    sweep->add_option("--values", sweep_values, "Sweep values")->delimiter(',')->required();
    sweep->add_option("--rounds,-T", sweep_horizon, "Rounds or episodes per run")
        ->capture_default_str();
    sweep->add_option("--seeds", sweep_seeds, "Independent seeds")->capture_default_str();
    sweep->add_option("--agents", sweep_agents, "Agent list")->delimiter(',')
        ->capture_default_str();
    sweep->add_option("--arms,-K", sweep_arms, "Fixed K when not swept")->capture_default_str();
    sweep->add_option("--dim,-d", sweep_dim, "Fixed d when not swept")->capture_default_str();
    sweep->add_option("--sigma", sweep_sigma, "Fixed sigma when not swept")
        ->capture_default_str();
    sweep->add_option("--depth,-H", sweep_depth, "Fixed H when not swept")->capture_default_str();
    sweep_de.attach(sweep);

    // --- necessity / verify ------------------------------------------------
    auto* necessity = app.add_subcommand("necessity", "Gate-necessity demos");
    long necessity_horizon = 10000;
    int necessity_seeds = 20;
    necessity->add_option("--rounds,-T", necessity_horizon, "Rounds per run")
        ->capture_default_str();
    necessity->add_option("--seeds", necessity_seeds, "Seeds per demo")->capture_default_str();

    auto* verify_cmd = app.add_subcommand("verify", "Run the property and oracle suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (bandit->parsed()) {
            ExperimentSpec spec;
            spec.family = EnvFamily::bernoulli;
            spec.agents = bandit_agents;
            spec.conditions = {Condition{bandit_arms, 0, 1.0, 0}};
            spec.horizon = bandit_horizon;
            spec.seeds = bandit_seeds;
            spec.base_seed = base_seed;
            spec.out_dir = out_dir;
            spec.threads = threads;
            spec.de = bandit_de.to_config();
            spec.cold_start = bandit_cold_start;
            return run_and_report(spec);
        }
        if (linear->parsed()) {
            ExperimentSpec spec;
            spec.family = EnvFamily::linear;
            spec.agents = linear_agents;
            spec.conditions = {Condition{linear_arms, linear_dim, linear_sigma, 0}};
            spec.horizon = linear_horizon;
            spec.seeds = linear_seeds;
            spec.base_seed = base_seed;
            spec.out_dir = out_dir;
            spec.threads = threads;
            spec.de = linear_de.to_config();
            spec.eta = linear_eta;
            return run_and_report(spec);
        }
        if (deepsea->parsed()) {
            ExperimentSpec spec;
            spec.family = EnvFamily::deepsea;
            spec.agents = deepsea_agents;
            spec.conditions = {Condition{0, 0, 1.0, deepsea_depth}};
            spec.horizon = deepsea_episodes;
            spec.seeds = deepsea_seeds;
            spec.base_seed = base_seed;
            spec.out_dir = out_dir;
            spec.threads = threads;
            spec.de = deepsea_de.to_config();
            spec.dirichlet_prior = deepsea_prior;
            spec.move_cost_scale = deepsea_cost_scale;
            return run_and_report(spec);
        }
        if (reservoir->parsed()) {
            const delight::TailPrior prior = reservoir_alpha == 1.0
                                                 ? delight::uniform_prior()
                                                 : delight::polynomial_tail_prior(reservoir_alpha);
            std::optional<double> rate;
            if (reservoir_override > 0.0) rate = reservoir_override;
            const auto result = delight::tail_rate_experiment(prior, reservoir_horizons,
                                                              reservoir_seeds, rate, base_seed);
            nlohmann::json j;
            j["alpha"] = reservoir_alpha;
            j["horizons"] = result.horizons;
            j["mean_regret"] = result.mean_regret;
            j["stderr"] = result.regret_stderr;
            j["slope"] = result.fit.slope;
            j["slope_stderr"] = result.fit.slope_stderr;
            j["intercept"] = result.fit.intercept;
            j["predicted_slope"] = reservoir_alpha / (reservoir_alpha + 1.0);
            nlohmann::json prices = nlohmann::json::array();
            for (double T : result.horizons) {
                const double y = std::pow(T, -1.0 / (reservoir_alpha + 1.0));
                prices.push_back(delight::horizon_price(prior, y, reservoir_cap));
            }
            j["horizon_prices"] = prices;
            std::printf("fitted slope %.4f (se %.4f), theory %.4f\n", result.fit.slope,
                        result.fit.slope_stderr, reservoir_alpha / (reservoir_alpha + 1.0));
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                const auto path = std::filesystem::path(out_dir) / "reservoir_rates.json";
                std::ofstream os(path);
                if (!os) throw std::runtime_error("cannot open " + path.string());
                os << j.dump(2) << "\n";
                std::printf("wrote %s\n", path.string().c_str());
            } else {
                std::cout << j.dump(2) << "\n";
            }
            return 0;
        }
        if (sweep->parsed()) {
            ExperimentSpec base;
            base.agents = sweep_agents;
            base.horizon = sweep_horizon;
            base.seeds = sweep_seeds;
            base.base_seed = base_seed;
            base.threads = threads;
            base.de = sweep_de.to_config();
            Condition cond;
            if (sweep_family == "bandit") {
                base.family = EnvFamily::bernoulli;
                cond = Condition{sweep_arms, 0, 1.0, 0};
            } else if (sweep_family == "linear") {
                base.family = EnvFamily::linear;
                cond = Condition{sweep_arms, sweep_dim, sweep_sigma, 0};
            } else {
                base.family = EnvFamily::deepsea;
                base.de.host_mode = HostMode::boltzmann;
                base.agents = sweep_agents;
                cond = Condition{0, 0, 1.0, sweep_depth};
            }

            const bool env_param = sweep_param == "K" || sweep_param == "d" ||
                                   sweep_param == "sigma" || sweep_param == "H";
            nlohmann::json combined = nlohmann::json::array();
            std::string csv_path;
            std::ofstream csv;
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                csv_path = (std::filesystem::path(out_dir) /
                            (sweep_family + "_sweep_raw.csv")).string();
                csv.open(csv_path);
                if (!csv) throw std::runtime_error("cannot open " + csv_path);
                csv << delight::kRawCsvHeader << "\n";
            }
            if (env_param) {
                base.conditions.clear();
                for (double v : sweep_values) {
                    Condition c = cond;
                    if (sweep_param == "K") c.num_arms = static_cast<int>(v);
                    if (sweep_param == "d") c.dim = static_cast<int>(v);
                    if (sweep_param == "sigma") c.sigma = v;
                    if (sweep_param == "H") c.depth = static_cast<int>(v);
                    base.conditions.push_back(c);
                }
                const auto out = delight::run_sweep(base);
                print_summary(out.summary);
                combined.push_back(delight::summary_to_json(out.summary));
                if (csv.is_open()) {
                    std::ostringstream body;
                    delight::write_raw_csv(body, base, out.traces);
                    const std::string text = body.str();
                    csv << text.substr(text.find('\n') + 1);
                }
            } else {
                base.conditions = {cond};
                for (double v : sweep_values) {
                    ExperimentSpec spec = base;
                    if (sweep_param == "lambda") spec.de.gate_price = v;
                    if (sweep_param == "half-life") spec.de.half_life = v;
                    const auto out = delight::run_sweep(spec);
                    std::printf("--- %s = %g ---\n", sweep_param.c_str(), v);
                    print_summary(out.summary);
                    nlohmann::json entry = delight::summary_to_json(out.summary);
                    entry["swept_param"] = sweep_param;
                    entry["swept_value"] = v;
                    entry["lambda"] = spec.de.gate_price;
                    entry["half_life"] = spec.de.half_life;
                    combined.push_back(std::move(entry));
                    if (csv.is_open()) {
                        std::ostringstream body;
                        delight::write_raw_csv(body, spec, out.traces);
                        const std::string text = body.str();
                        csv << text.substr(text.find('\n') + 1);
                    }
                }
            }
            if (!out_dir.empty()) {
                const auto path = std::filesystem::path(out_dir) /
                                  (sweep_family + "_sweep_summary.json");
                std::ofstream os(path);
                if (!os) throw std::runtime_error("cannot open " + path.string());
                os << combined.dump(2) << "\n";
                std::printf("wrote %s\nwrote %s\n", csv_path.c_str(), path.string().c_str());
            }
            return 0;
        }
        if (necessity->parsed()) {
            const auto report =
                delight::necessity_demos(base_seed, necessity_horizon, necessity_seeds);
            nlohmann::json j = nlohmann::json::array();
            for (const auto& demo : report.demos) {
                std::printf("[%s] %-40s tail slope %.6f floor %.6f  %s\n",
                            demo.pass ? "PASS" : "FAIL", demo.name.c_str(), demo.tail_slope,
                            demo.floor, demo.detail.c_str());
                j.push_back({{"name", demo.name},
                             {"pass", demo.pass},
                             {"tail_slope", demo.tail_slope},
                             {"floor", demo.floor},
                             {"detail", demo.detail}});
            }
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                const auto path = std::filesystem::path(out_dir) / "necessity.json";
                std::ofstream os(path);
                if (!os) throw std::runtime_error("cannot open " + path.string());
                os << j.dump(2) << "\n";
            }
            return report.all_pass() ? 0 : 2;
        }
        if (verify_cmd->parsed()) {
            const auto report = delight::run_verification(base_seed);
            for (const auto& r : report.results) {
                std::printf("[%s] %-50s measured %.3e tol %.3e %s\n", r.pass ? "PASS" : "FAIL",
                            r.name.c_str(), r.measured, r.tolerance, r.detail.c_str());
            }
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                const auto path = std::filesystem::path(out_dir) / "verify.json";
                std::ofstream os(path);
                if (!os) throw std::runtime_error("cannot open " + path.string());
                os << delight::verify_to_json(report).dump(2) << "\n";
            }
            std::printf("%s\n", report.all_pass() ? "all properties passed"
                                                  : "verification FAILED");
            return report.all_pass() ? 0 : 2;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
